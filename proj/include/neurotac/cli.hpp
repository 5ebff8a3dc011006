#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace neurotac {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitUsage = 2,
    kExitMissingInput = 3,
    kExitCorrupt = 4,
    kExitIo = 5,
};

struct RunConfig {
    std::string command;
    std::filesystem::path dataset = "data";
    std::uint64_t seed = 7;
    int trials = 20;
    std::vector<int> pcs;  ///< empty means 1-50 (50 for report)
    bool force_scaling = true;
    bool speed_scaling = true;
    std::filesystem::path out = "out";
    int repeats = 20;
    int rt_repeats = 100;
    int rt_datasets = 3;
    bool write_trains = false;
};

/// Accepts "50", "1-50" or "1,5,10".
std::vector<int> parse_pcs(const std::string& text);

/// Resolved configuration as a single-line JSON object.
std::string config_json(const RunConfig& config);

/// Runs one subcommand and returns its exit code. Progress goes to `log`,
/// errors to `err`.
int run(const RunConfig& config, std::ostream& log, std::ostream& err);

/// Parses argv (config file first, then flags) and runs.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace neurotac
