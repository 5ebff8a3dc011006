#include <neurotac/dataset.hpp>

#include <neurotac/error.hpp>
#include <neurotac/random.hpp>

#include <json.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace neurotac {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void put_u16(std::vector<unsigned char>& buf, std::uint16_t v) {
    buf.push_back(static_cast<unsigned char>(v & 0xff));
    buf.push_back(static_cast<unsigned char>(v >> 8));
}

std::uint16_t get_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::string trace_name(char texture, const TrialCondition& c, int trial) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "traces/%c_%03d_%04d_%03d.bin", texture,
                  static_cast<int>(std::lround(c.speed)), static_cast<int>(std::lround(c.force)),
                  trial);
    return buf;
}

json simulator_to_json(const SimulatorConfig& s) {
    return {{"noise_sigma", s.noise_sigma},       {"force_exponent", s.force_exponent},
            {"gain_variation", s.gain_variation}, {"contact_level", s.contact_level},
            {"height_gain", s.height_gain},       {"baseline_min", s.baseline_min},
            {"baseline_max", s.baseline_max},     {"typeii_window_ms", s.typeii_window_ms},
            {"phase_range_mm", s.phase_range_mm}, {"force_jitter", s.force_jitter},
            {"quantize", s.quantize},             {"sensor_seed", s.sensor_seed}};
}

SimulatorConfig simulator_from_json(const json& j) {
    SimulatorConfig s;
    s.noise_sigma = j.at("noise_sigma").get<double>();
    s.force_exponent = j.at("force_exponent").get<double>();
    s.gain_variation = j.at("gain_variation").get<double>();
    s.contact_level = j.at("contact_level").get<double>();
    s.height_gain = j.at("height_gain").get<double>();
    s.baseline_min = j.at("baseline_min").get<double>();
    s.baseline_max = j.at("baseline_max").get<double>();
    s.typeii_window_ms = j.at("typeii_window_ms").get<double>();
    s.phase_range_mm = j.at("phase_range_mm").get<double>();
    s.force_jitter = j.at("force_jitter").get<double>();
    s.quantize = j.at("quantize").get<bool>();
    s.sensor_seed = j.at("sensor_seed").get<std::uint64_t>();
    return s;
}

}  // namespace

void write_trace_file(const fs::path& path, const SensorTrace& raw) {
    if (raw.channels != kTaxelCount) throw std::invalid_argument("trace files hold 18 channels");
    std::vector<unsigned char> buf;
    buf.reserve(8 + raw.samples.size() * 2);
    put_u16(buf, kTraceMagic);
    put_u16(buf, kTraceVersion);
    const auto n = static_cast<std::uint32_t>(raw.n_samples);
    put_u16(buf, static_cast<std::uint16_t>(n & 0xffff));
    put_u16(buf, static_cast<std::uint16_t>(n >> 16));
    for (double v : raw.samples) {
        if (!(v >= 0.0 && v <= kFullScale) || v != std::round(v)) {
            throw std::invalid_argument("trace sample is not a 10-bit level");
        }
        put_u16(buf, static_cast<std::uint16_t>(v));
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path, "cannot open trace file for writing");
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError(path, "failed writing trace file");
}

SensorTrace read_trace_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path, "cannot open trace file");
    std::array<unsigned char, 8> header{};
    in.read(reinterpret_cast<char*>(header.data()), header.size());
    if (in.gcount() != 8) throw FormatError(path, "truncated trace header");
    if (get_u16(header.data()) != kTraceMagic) throw FormatError(path, "bad trace magic");
    if (get_u16(header.data() + 2) != kTraceVersion) throw FormatError(path, "unsupported trace version");
    const std::uint32_t n = get_u16(header.data() + 4) | (std::uint32_t{get_u16(header.data() + 6)} << 16);
    std::vector<unsigned char> body(static_cast<std::size_t>(n) * kTaxelCount * 2);
    in.read(reinterpret_cast<char*>(body.data()), static_cast<std::streamsize>(body.size()));
    if (static_cast<std::size_t>(in.gcount()) != body.size()) throw FormatError(path, "truncated trace body");
    SensorTrace trace;
    trace.n_samples = n;
    trace.samples.resize(body.size() / 2);
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
        trace.samples[i] = get_u16(body.data() + 2 * i);
    }
    return trace;
}

DatasetManifest plan_dataset(const DatasetRequest& request) {
    if (request.trials_per_cell < 1) throw std::invalid_argument("trials per cell must be at least 1");
    DatasetManifest m;
    if (request.textures.empty()) {
        for (const auto& spec : texture_set()) m.textures.push_back(spec.id);
    } else {
        for (char id : request.textures) m.textures.push_back(texture_by_id(id).id);
    }
    m.conditions = request.conditions.empty() ? standard_conditions() : request.conditions;
    m.trials_per_cell = request.trials_per_cell;
    m.seed = request.seed;
    m.simulator = request.simulator;
    m.simulator.sensor_seed = derive_seed(request.seed, "sensor");
    for (char texture : m.textures) {
        const auto t = static_cast<std::uint64_t>(texture_index(texture));
        for (std::size_t c = 0; c < m.conditions.size(); ++c) {
            const auto& cond = m.conditions[c];
            for (int trial = 0; trial < m.trials_per_cell; ++trial) {
                TraceEntry e;
                e.texture = texture;
                e.condition = cond;
                e.trial = trial;
                e.seed = derive_seed(request.seed, "trial",
                                     {t, static_cast<std::uint64_t>(std::llround(cond.speed)),
                                      static_cast<std::uint64_t>(std::llround(cond.force)),
                                      static_cast<std::uint64_t>(trial)});
                e.path = trace_name(texture, cond, trial);
                m.traces.push_back(std::move(e));
            }
        }
    }
    return m;
}

DatasetManifest generate_dataset(const DatasetRequest& request) {
    DatasetManifest m = plan_dataset(request);
    std::error_code ec;
    fs::create_directories(request.root / "traces", ec);
    if (ec) throw IoError(request.root / "traces", "cannot create dataset directory");

    const DrumSimulator sim(m.simulator);
    m.range.min.assign(kTaxelCount, std::numeric_limits<double>::infinity());
    m.range.max.assign(kTaxelCount, -std::numeric_limits<double>::infinity());
    for (const auto& e : m.traces) {
        SensorTrace trace = sim.simulate_trial(texture_by_id(e.texture), e.condition, e.seed);
        extend_range(m.range, trace);
        write_trace_file(request.root / e.path, trace);
    }
    finalize_range(m.range);
    save_manifest(request.root / "manifest.json", m);
    return m;
}

void save_manifest(const fs::path& path, const DatasetManifest& m) {
    json j;
    j["format"] = "neurotac-dataset";
    j["version"] = 1;
    j["seed"] = m.seed;
    j["trials_per_cell"] = m.trials_per_cell;
    j["sample_rate_hz"] = kSampleRate;
    j["textures"] = json::array();
    for (char t : m.textures) j["textures"].push_back(std::string(1, t));
    j["conditions"] = json::array();
    for (const auto& c : m.conditions) {
        j["conditions"].push_back({{"speed", c.speed}, {"force", c.force}, {"scan_length", c.scan_length}});
    }
    j["simulator"] = simulator_to_json(m.simulator);
    j["taxel_min"] = m.range.min;
    j["taxel_max"] = m.range.max;
    j["degenerate"] = m.range.degenerate;
    j["traces"] = json::array();
    for (const auto& e : m.traces) {
        j["traces"].push_back({{"texture", std::string(1, e.texture)},
                               {"speed", e.condition.speed},
                               {"force", e.condition.force},
                               {"trial", e.trial},
                               {"seed", e.seed},
                               {"path", e.path}});
    }
    std::ofstream out(path);
    if (!out) throw IoError(path, "cannot open manifest for writing");
    out << j.dump(1) << '\n';
    if (!out) throw IoError(path, "failed writing manifest");
}

DatasetManifest load_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path, "cannot open manifest");
    DatasetManifest m;
    try {
        const json j = json::parse(in);
        if (j.at("format") != "neurotac-dataset") throw FormatError(path, "not a dataset manifest");
        m.seed = j.at("seed").get<std::uint64_t>();
        m.trials_per_cell = j.at("trials_per_cell").get<int>();
        for (const auto& t : j.at("textures")) m.textures.push_back(t.get<std::string>().at(0));
        for (const auto& c : j.at("conditions")) {
            m.conditions.push_back({c.at("speed").get<double>(), c.at("force").get<double>(),
                                    c.at("scan_length").get<double>()});
        }
        m.simulator = simulator_from_json(j.at("simulator"));
        m.range.min = j.at("taxel_min").get<std::vector<double>>();
        m.range.max = j.at("taxel_max").get<std::vector<double>>();
        m.range.degenerate = j.at("degenerate").get<std::vector<bool>>();
        if (m.range.min.size() != kTaxelCount || m.range.max.size() != kTaxelCount ||
            m.range.degenerate.size() != kTaxelCount) {
            throw FormatError(path, "manifest range must list 18 taxels");
        }
        const double scan_length = m.conditions.empty() ? kDefaultScanLength : m.conditions[0].scan_length;
        for (const auto& t : j.at("traces")) {
            TraceEntry e;
            e.texture = t.at("texture").get<std::string>().at(0);
            e.condition = {t.at("speed").get<double>(), t.at("force").get<double>(), scan_length};
            e.trial = t.at("trial").get<int>();
            e.seed = t.at("seed").get<std::uint64_t>();
            e.path = t.at("path").get<std::string>();
            m.traces.push_back(std::move(e));
        }
    } catch (const json::exception& ex) {
        throw FormatError(path, std::string("malformed manifest (") + ex.what() + ")");
    } catch (const std::out_of_range&) {
        throw FormatError(path, "malformed manifest");
    }
    return m;
}

Dataset Dataset::open(const fs::path& root) {
    Dataset d;
    d.root_ = root;
    d.manifest_ = load_manifest(root / "manifest.json");
    return d;
}

SensorTrace Dataset::load_raw(std::size_t entry) const {
    const TraceEntry& e = manifest_.traces.at(entry);
    SensorTrace trace = read_trace_file(root_ / e.path);
    if (trace.n_samples != e.condition.n_samples()) {
        throw FormatError(root_ / e.path, "sample count disagrees with the trial condition");
    }
    trace.condition = e.condition;
    trace.texture = e.texture;
    trace.trial_id = e.trial;
    return trace;
}

SensorTrace Dataset::load(std::size_t entry) const {
    SensorTrace trace = load_raw(entry);
    normalize_trace(trace, manifest_.range);
    return trace;
}

std::vector<std::size_t> Dataset::cell(char texture, double speed, double force) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < manifest_.traces.size(); ++i) {
        const auto& e = manifest_.traces[i];
        if (e.texture == texture && std::abs(e.condition.speed - speed) < 1e-9 &&
            std::abs(e.condition.force - force) < 1e-9) {
            out.push_back(i);
        }
    }
    return out;
}

}  // namespace neurotac
