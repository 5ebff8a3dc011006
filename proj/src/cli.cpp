#include <neurotac/cli.hpp>

#include <neurotac/error.hpp>
#include <neurotac/pipeline.hpp>
#include <neurotac/random.hpp>
#include <neurotac/rt_pipeline.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace neurotac {

using nlohmann::json;

namespace {

class MissingInput : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

const std::vector<std::string>& commands() {
    static const std::vector<std::string> names{"gen",       "calibrate",  "encode", "exp-fig3a", "exp-fig3b",
                                                "exp-fig3cf", "exp-fig4", "exp-s5", "report",    "all"};
    return names;
}

std::string pcs_text(const std::vector<int>& pcs) {
    std::string s;
    for (std::size_t i = 0; i < pcs.size(); ++i) s += (i ? "," : "") + std::to_string(pcs[i]);
    return s;
}

std::vector<int> sweep_pcs(const RunConfig& c) {
    if (!c.pcs.empty()) return c.pcs;
    std::vector<int> out;
    for (int p = 1; p <= 50; ++p) out.push_back(p);
    return out;
}

int report_pcs(const RunConfig& c) { return c.pcs.empty() ? 50 : c.pcs.back(); }

std::filesystem::path manifest_path(const RunConfig& c) { return c.dataset / "manifest.json"; }
std::filesystem::path table_path(const RunConfig& c) { return c.dataset / "force_table.json"; }
std::filesystem::path feature_dir(const RunConfig& c) { return c.dataset / "features"; }

Dataset open_dataset(const RunConfig& c) {
    if (!std::filesystem::exists(manifest_path(c))) {
        throw MissingInput("no dataset at " + c.dataset.string() + " (run gen first)");
    }
    return Dataset::open(c.dataset);
}

ForceScalingTable load_table(const RunConfig& c) {
    if (!std::filesystem::exists(table_path(c))) {
        throw MissingInput("no force table at " + table_path(c).string() + " (run calibrate first)");
    }
    return ForceScalingTable::load(table_path(c));
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void cmd_gen(const RunConfig& c, std::ostream& log) {
    DatasetRequest req;
    req.root = c.dataset;
    req.trials_per_cell = c.trials;
    req.seed = c.seed;
    const auto t0 = Clock::now();
    const DatasetManifest m = generate_dataset(req);
    log << "gen: " << m.traces.size() << " traces in " << c.dataset.string() << " (" << seconds_since(t0) << " s)\n";
}

void cmd_calibrate(const RunConfig& c, std::ostream& log) {
    const Dataset ds = open_dataset(c);
    const auto t0 = Clock::now();
    const CalibrationResult r = calibrate(ds);
    const double elapsed = seconds_since(t0);
    r.table.save(table_path(c));

    double worst = 0.0;
    for (double x : r.report.residuals) worst = std::max(worst, x);
    json j;
    j["config"] = json::parse(config_json(c));
    j["total"] = r.report.total;
    j["fixed"] = r.report.fixed;
    j["converged"] = r.report.converged;
    j["clamped"] = r.report.clamped;
    j["converged_fraction"] = r.report.converged_fraction();
    j["max_residual"] = worst;
    j["seconds"] = elapsed;
    std::filesystem::create_directories(c.out);
    const auto path = c.out / "calibration_report.json";
    std::ofstream out(path);
    if (!out) throw IoError(path, "cannot write calibration report");
    out << j.dump(2) << '\n';
    log << "calibrate: " << r.report.converged << " converged, " << r.report.clamped << " clamped ("
        << 100.0 * r.report.converged_fraction() << "%), " << elapsed << " s\n";
}

EncodedDataset encode_all(const RunConfig& c, std::ostream& log) {
    const Dataset ds = open_dataset(c);
    const ForceScalingTable table = load_table(c);
    const auto t0 = Clock::now();
    EncodedDataset data = encode_dataset(ds, table);
    log << "encode: " << ds.size() << " traces, 4 variants (" << seconds_since(t0) << " s)\n";
    std::filesystem::create_directories(feature_dir(c));
    for (Variant v : kVariants) write_feature_csv(feature_path(feature_dir(c), v), data[v]);
    return data;
}

EncodedDataset load_or_encode(const RunConfig& c, std::ostream& log) {
    bool cached = true;
    for (Variant v : kVariants) cached = cached && std::filesystem::exists(feature_path(feature_dir(c), v));
    if (!cached) return encode_all(c, log);
    EncodedDataset data;
    for (Variant v : kVariants) data[v] = read_feature_csv(feature_path(feature_dir(c), v));
    log << "features: loaded from " << feature_dir(c).string() << '\n';
    return data;
}

void cmd_encode(const RunConfig& c, std::ostream& log) {
    const Dataset ds = open_dataset(c);
    const Variant v = variant_of(c.force_scaling, c.speed_scaling);
    std::optional<ForceScalingTable> table;
    if (c.force_scaling) table = load_table(c);

    const auto t0 = Clock::now();
    std::vector<FeatureVector> vectors;
    std::vector<TrialLabel> labels;
    std::filesystem::create_directories(c.out);
    std::ofstream trains_out;
    if (c.write_trains) {
        const auto path = c.out / ("trains_" + variant_name(v) + ".txt");
        trains_out.open(path);
        if (!trains_out) throw IoError(path, "cannot write spike trains");
    }
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const SensorTrace trace = ds.load(i);
        const auto trains = encode_variant(trace, table ? &*table : nullptr, v);
        if (c.write_trains) write_spike_trains(trains_out, trains);
        vectors.push_back(variant_features(trains, v, trace.condition.speed));
        labels.push_back(label_of(ds.manifest().traces[i]));
    }
    const FeatureMatrix m = assemble_and_center(vectors, std::move(labels));
    write_feature_csv(feature_path(c.out, v), m);
    log << "encode: " << variant_name(v) << ", " << m.rows() << " x " << m.cols() << " (" << seconds_since(t0)
        << " s)\n";
}

using TaskResults = std::array<std::array<std::vector<ExperimentResult>, 2>, 4>;
using BucketResults = std::array<std::array<std::vector<ExperimentResult>, 4>, 4>;

OfflineConfig offline_config(const RunConfig& c, std::vector<int> pcs) {
    OfflineConfig oc;
    oc.pcs = std::move(pcs);
    oc.repeats = c.repeats;
    oc.seed = c.seed;
    return oc;
}

void write_variant_sweep(const std::filesystem::path& path, const RunConfig& c,
                         const std::array<const std::vector<ExperimentResult>*, 4>& sweeps) {
    std::vector<ResultRow> rows;
    const auto& base = *sweeps[0];
    for (std::size_t p = 0; p < base.size(); ++p) {
        for (Variant v : kVariants) {
            rows.push_back({variant_name(v), &(*sweeps[static_cast<std::size_t>(v)])[p], &base[p]});
        }
    }
    write_result_csv(path, config_json(c), rows);
}

void write_task(const RunConfig& c, const TaskResults& r, std::size_t task) {
    std::array<const std::vector<ExperimentResult>*, 4> s{};
    for (std::size_t v = 0; v < 4; ++v) s[v] = &r[v][task];
    write_variant_sweep(c.out / (task == 0 ? "fig3a.csv" : "fig3b.csv"), c, s);
}

void write_buckets(const RunConfig& c, const BucketResults& r) {
    for (Bucket b : kBuckets) {
        std::array<const std::vector<ExperimentResult>*, 4> s{};
        for (std::size_t v = 0; v < 4; ++v) s[v] = &r[v][static_cast<std::size_t>(b)];
        write_variant_sweep(c.out / (bucket_name(b) + ".csv"), c, s);
    }
}

std::vector<RtDataset> rt_datasets(const RunConfig& c, std::ostream& log) {
    const auto t0 = Clock::now();
    std::vector<RtDataset> out;
    for (int d = 0; d < c.rt_datasets; ++d) {
        out.push_back(generate_rt_dataset(derive_seed(c.seed, "rt-dataset", {static_cast<std::uint64_t>(d)})));
    }
    log << "rt: " << out.size() << " simulated datasets (" << seconds_since(t0) << " s)\n";
    return out;
}

RtProtocolConfig rt_config(const RunConfig& c) {
    RtProtocolConfig rc;
    rc.repeats = c.rt_repeats;
    rc.seed = c.seed;
    if (!c.pcs.empty()) {
        for (int p : c.pcs) {
            if (p <= kLivePcs) rc.pcs.push_back(p);
        }
    }
    return rc;
}

void cmd_fig4(const RunConfig& c, const std::vector<RtDataset>& data, std::ostream& log) {
    const auto t0 = Clock::now();
    const RtProtocolConfig rc = rt_config(c);
    for (RtProtocol p : {RtProtocol::fig4b_offline, RtProtocol::fig4b_crosssession, RtProtocol::fig4c_extrapolation}) {
        for (const RtResult& r : run_protocol(p, data, rc)) {
            std::string name = protocol_name(p);
            if (p == RtProtocol::fig4c_extrapolation) name = "fig4c-" + r.subset;
            write_rt_csv(c.out / (name + ".csv"), config_json(c), r, false);
        }
    }
    log << "exp-fig4: done (" << seconds_since(t0) << " s)\n";
}

void cmd_s5(const RunConfig& c, const std::vector<RtDataset>& data, std::ostream& log) {
    const auto t0 = Clock::now();
    const auto results = run_protocol(RtProtocol::s5_demo, data, rt_config(c));
    write_rt_csv(c.out / "s5-demo.csv", config_json(c), results.front(), true);

    // The deployable model of the first dataset: 25 PCs, recalibrated mean.
    const RtDataset& d = data.front();
    std::vector<int> labels;
    for (const auto& l : d.train.scaled.labels) labels.push_back(l.texture);
    ClassifierModel model;
    model.pca = pca_fit(d.train.scaled.values, kLivePcs);
    model.lda = lda_fit(pca_project(model.pca, d.train.scaled.values), labels);
    model.session_mean = column_mean(d.recal.scaled.values);
    save_classifier(c.out / "live_model.json", model);

    int correct = 0;
    for (Eigen::Index r = 0; r < d.realtime.scaled.rows(); ++r) {
        FeatureVector f;
        f.mode = FeatureMode::realtime;
        const Eigen::RowVectorXd row = d.realtime.scaled.values.row(r);
        f.values.assign(row.data(), row.data() + row.size());
        correct += classify_live(model, f, d.realtime.scaled.labels[static_cast<std::size_t>(r)].texture).correct;
    }
    log << "exp-s5: live model " << correct << "/" << d.realtime.scaled.rows() << " correct on dataset 0 ("
        << seconds_since(t0) << " s)\n";
}

void cmd_report(const RunConfig& c, const TaskResults& tasks, const BucketResults& buckets, int pcs,
                std::ostream& log) {
    const SummaryTable t = summarize_table(tasks, buckets, pcs);
    write_summary(c.out / "table1.csv", c.out / "table1.txt", config_json(c), t);
    std::ifstream in(c.out / "table1.txt");
    log << in.rdbuf();
}

void dispatch(const RunConfig& c, std::ostream& log) {
    const std::string& cmd = c.command;
    if (cmd != "gen") std::filesystem::create_directories(c.out);
    if (cmd == "gen") {
        cmd_gen(c, log);
    } else if (cmd == "calibrate") {
        cmd_calibrate(c, log);
    } else if (cmd == "encode") {
        cmd_encode(c, log);
    } else if (cmd == "exp-fig3a" || cmd == "exp-fig3b") {
        const EncodedDataset data = load_or_encode(c, log);
        const auto t0 = Clock::now();
        const TaskResults r = run_texture_tasks(data, offline_config(c, sweep_pcs(c)));
        write_task(c, r, cmd == "exp-fig3a" ? 0 : 1);
        log << cmd << ": done (" << seconds_since(t0) << " s)\n";
    } else if (cmd == "exp-fig3cf") {
        const EncodedDataset data = load_or_encode(c, log);
        const auto t0 = Clock::now();
        write_buckets(c, run_extrapolation(data, offline_config(c, sweep_pcs(c))));
        log << cmd << ": done (" << seconds_since(t0) << " s)\n";
    } else if (cmd == "exp-fig4") {
        cmd_fig4(c, rt_datasets(c, log), log);
    } else if (cmd == "exp-s5") {
        cmd_s5(c, rt_datasets(c, log), log);
    } else if (cmd == "report") {
        const EncodedDataset data = load_or_encode(c, log);
        const int pcs = report_pcs(c);
        const OfflineConfig oc = offline_config(c, {pcs});
        cmd_report(c, run_texture_tasks(data, oc), run_extrapolation(data, oc), pcs, log);
    } else if (cmd == "all") {
        const auto t0 = Clock::now();
        json timings;
        auto stage = [&](const char* name, auto&& fn) {
            const auto s0 = Clock::now();
            fn();
            timings[name] = seconds_since(s0);
        };
        stage("gen", [&] { cmd_gen(c, log); });
        stage("calibrate", [&] { cmd_calibrate(c, log); });
        EncodedDataset data;
        stage("encode", [&] { data = encode_all(c, log); });
        const std::vector<int> pcs = sweep_pcs(c);
        const OfflineConfig oc = offline_config(c, pcs);
        TaskResults tasks;
        BucketResults buckets;
        stage("fig3ab", [&] {
            tasks = run_texture_tasks(data, oc);
            write_task(c, tasks, 0);
            write_task(c, tasks, 1);
        });
        stage("fig3cf", [&] {
            buckets = run_extrapolation(data, oc);
            write_buckets(c, buckets);
        });
        std::vector<RtDataset> rt;
        stage("rt_datasets", [&] { rt = rt_datasets(c, log); });
        stage("fig4", [&] { cmd_fig4(c, rt, log); });
        stage("s5", [&] { cmd_s5(c, rt, log); });
        const int at = std::find(pcs.begin(), pcs.end(), 50) != pcs.end() ? 50 : pcs.back();
        stage("report", [&] { cmd_report(c, tasks, buckets, at, log); });
        timings["total"] = seconds_since(t0);
        timings["config"] = json::parse(config_json(c));
        std::ofstream out(c.out / "timings.json");
        if (!out) throw IoError(c.out / "timings.json", "cannot write timings");
        out << timings.dump(2) << '\n';
        log << "all: " << timings["total"].get<double>() << " s\n";
    } else {
        throw UsageError("unknown subcommand '" + cmd + "'");
    }
}

bool parse_switch(const std::string& v, const char* flag) {
    if (v == "on") return true;
    if (v == "off") return false;
    throw UsageError(std::string(flag) + " expects on or off, got '" + v + "'");
}

void apply_config_file(RunConfig& c, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingInput("cannot open config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw FormatError(path, std::string("malformed config file (") + e.what() + ")");
    }
    try {
        if (j.contains("command")) c.command = j.at("command").get<std::string>();
        if (j.contains("dataset")) c.dataset = j.at("dataset").get<std::string>();
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("trials")) c.trials = j.at("trials").get<int>();
        if (j.contains("pcs")) {
            c.pcs = j.at("pcs").is_string() ? parse_pcs(j.at("pcs").get<std::string>()) : j.at("pcs").get<std::vector<int>>();
        }
        if (j.contains("force_scaling")) c.force_scaling = j.at("force_scaling").get<bool>();
        if (j.contains("speed_scaling")) c.speed_scaling = j.at("speed_scaling").get<bool>();
        if (j.contains("out")) c.out = j.at("out").get<std::string>();
        if (j.contains("repeats")) c.repeats = j.at("repeats").get<int>();
        if (j.contains("rt_repeats")) c.rt_repeats = j.at("rt_repeats").get<int>();
        if (j.contains("rt_datasets")) c.rt_datasets = j.at("rt_datasets").get<int>();
    } catch (const json::exception& e) {
        throw FormatError(path, std::string("bad config value (") + e.what() + ")");
    }
}

void validate(const RunConfig& c) {
    if (c.trials < 1) throw UsageError("--trials must be at least 1");
    if (c.repeats < 1 || c.rt_repeats < 1) throw UsageError("--repeats must be at least 1");
    if (c.rt_datasets < 1) throw UsageError("--rt-datasets must be at least 1");
    for (int p : c.pcs) {
        if (p < 1) throw UsageError("PC counts must be positive");
    }
}

}  // namespace

std::vector<int> parse_pcs(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string part;
    auto to_int = [&](const std::string& s) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(s, &used);
        } catch (const std::exception&) {
            throw UsageError("bad PC specification '" + text + "'");
        }
        if (used != s.size() || v < 1) throw UsageError("bad PC specification '" + text + "'");
        return v;
    };
    while (std::getline(ss, part, ',')) {
        const auto dash = part.find('-');
        if (dash == std::string::npos) {
            out.push_back(to_int(part));
        } else {
            const int lo = to_int(part.substr(0, dash));
            const int hi = to_int(part.substr(dash + 1));
            if (hi < lo) throw UsageError("bad PC range '" + part + "'");
            for (int p = lo; p <= hi; ++p) out.push_back(p);
        }
    }
    if (out.empty()) throw UsageError("empty PC specification");
    return out;
}

std::string config_json(const RunConfig& c) {
    json j;
    j["command"] = c.command;
    j["dataset"] = c.dataset.string();
    j["seed"] = c.seed;
    j["trials"] = c.trials;
    j["pcs"] = c.pcs.empty() ? std::string("default") : pcs_text(c.pcs);
    j["force_scaling"] = c.force_scaling;
    j["speed_scaling"] = c.speed_scaling;
    j["out"] = c.out.string();
    j["repeats"] = c.repeats;
    j["rt_repeats"] = c.rt_repeats;
    j["rt_datasets"] = c.rt_datasets;
    return j.dump();
}

int run(const RunConfig& config, std::ostream& log, std::ostream& err) {
    try {
        validate(config);
        dispatch(config, log);
        return kExitOk;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const MissingInput& e) {
        err << "error: " << e.what() << '\n';
        return kExitMissingInput;
    } catch (const FormatError& e) {
        err << "error: " << e.what() << '\n';
        return kExitCorrupt;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Neuromorphic tactile texture pipeline"};
    std::string command;
    std::string config_file;
    std::string dataset;
    std::uint64_t seed = 0;
    int trials = 0;
    std::string pcs;
    std::string force_scaling;
    std::string speed_scaling;
    std::string out_dir;
    int repeats = 0;
    int rt_repeats = 0;
    int rt_count = 0;
    bool trains = false;

    std::string names;
    for (const auto& n : commands()) names += (names.empty() ? "" : ", ") + n;
    app.add_option("command", command, "Subcommand: " + names)->required();
    app.add_option("--config", config_file, "JSON config file; flags override it");
    auto* o_dataset = app.add_option("--dataset", dataset, "Dataset directory");
    auto* o_seed = app.add_option("--seed", seed, "Master seed");
    auto* o_trials = app.add_option("--trials", trials, "Trials per texture and condition");
    auto* o_pcs = app.add_option("--pcs", pcs, "PC counts, e.g. 50, 1-50 or 5,10,25");
    auto* o_force = app.add_option("--force-scaling", force_scaling, "on or off");
    auto* o_speed = app.add_option("--speed-scaling", speed_scaling, "on or off");
    auto* o_out = app.add_option("--out", out_dir, "Output directory");
    auto* o_repeats = app.add_option("--repeats", repeats, "Classification repeats (offline)");
    auto* o_rt_repeats = app.add_option("--rt-repeats", rt_repeats, "Classification repeats per real-time dataset");
    auto* o_rt_count = app.add_option("--rt-datasets", rt_count, "Simulated real-time datasets");
    app.add_flag("--trains", trains, "encode: also write spike trains");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n' << "run with --help for usage\n";
        return kExitUsage;
    }

    RunConfig c;
    try {
        if (!config_file.empty()) apply_config_file(c, config_file);
        c.command = command;
        if (o_dataset->count()) c.dataset = dataset;
        if (o_seed->count()) c.seed = seed;
        if (o_trials->count()) c.trials = trials;
        if (o_pcs->count()) c.pcs = parse_pcs(pcs);
        if (o_force->count()) c.force_scaling = parse_switch(force_scaling, "--force-scaling");
        if (o_speed->count()) c.speed_scaling = parse_switch(speed_scaling, "--speed-scaling");
        if (o_out->count()) c.out = out_dir;
        if (o_repeats->count()) c.repeats = repeats;
        if (o_rt_repeats->count()) c.rt_repeats = rt_repeats;
        if (o_rt_count->count()) c.rt_datasets = rt_count;
        c.write_trains = trains;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const MissingInput& e) {
        err << "error: " << e.what() << '\n';
        return kExitMissingInput;
    } catch (const FormatError& e) {
        err << "error: " << e.what() << '\n';
        return kExitCorrupt;
    }
    if (std::find(commands().begin(), commands().end(), c.command) == commands().end()) {
        err << "error: unknown subcommand '" << c.command << "'\n";
        return kExitUsage;
    }
    return run(c, out, err);
}

}  // namespace neurotac
