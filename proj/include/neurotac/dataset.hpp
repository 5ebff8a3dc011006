#pragma once

#include <neurotac/drum_sim.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace neurotac {

/// Binary trace file: 8-byte little-endian header (u16 magic "NT", u16
/// version, u32 n_samples) followed by n_samples frames of 18 u16 readings.
inline constexpr std::uint16_t kTraceMagic = 0x544e;
inline constexpr std::uint16_t kTraceVersion = 1;

void write_trace_file(const std::filesystem::path& path, const SensorTrace& raw);
/// Reads samples only; condition/texture metadata come from the manifest.
SensorTrace read_trace_file(const std::filesystem::path& path);

struct TraceEntry {
    char texture = 'A';
    TrialCondition condition;
    int trial = 0;
    std::uint64_t seed = 0;
    std::string path;  ///< relative to the dataset root
};

struct DatasetManifest {
    std::vector<char> textures;
    std::vector<TrialCondition> conditions;
    int trials_per_cell = 0;
    std::uint64_t seed = 0;
    SimulatorConfig simulator;
    TaxelRange range;  ///< raw per-taxel min/max over the whole dataset
    std::vector<TraceEntry> traces;
};

struct DatasetRequest {
    std::filesystem::path root;
    int trials_per_cell = 20;
    std::uint64_t seed = 7;
    std::vector<char> textures;               ///< empty = all 16
    std::vector<TrialCondition> conditions;   ///< empty = all 15
    SimulatorConfig simulator;                ///< sensor_seed is derived from `seed`
};

/// Enumerates every (texture, condition, trial) entry of a request without
/// simulating anything.
DatasetManifest plan_dataset(const DatasetRequest& request);

/// Simulates and persists all traces, then writes manifest.json.
DatasetManifest generate_dataset(const DatasetRequest& request);

void save_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);
DatasetManifest load_manifest(const std::filesystem::path& path);

/// Read access to a persisted dataset.
class Dataset {
public:
    static Dataset open(const std::filesystem::path& root);

    const DatasetManifest& manifest() const { return manifest_; }
    const std::filesystem::path& root() const { return root_; }
    std::size_t size() const { return manifest_.traces.size(); }

    SensorTrace load_raw(std::size_t entry) const;
    /// Raw trace mapped onto [0, 1] with the manifest's per-taxel range.
    SensorTrace load(std::size_t entry) const;

    /// Entry indices of one (texture, speed, force) cell, in trial order.
    std::vector<std::size_t> cell(char texture, double speed, double force) const;

private:
    std::filesystem::path root_;
    DatasetManifest manifest_;
};

}  // namespace neurotac
