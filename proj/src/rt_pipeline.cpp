#include <neurotac/rt_pipeline.hpp>

#include <neurotac/error.hpp>
#include <neurotac/random.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>

namespace neurotac {

std::string profile_name(ProfileKind kind) {
    switch (kind) {
    case ProfileKind::slow: return "slow";
    case ProfileKind::medium: return "medium";
    case ProfileKind::fast: return "fast";
    case ProfileKind::slow_to_fast: return "slow-to-fast";
    case ProfileKind::fast_to_slow: return "fast-to-slow";
    }
    return "unknown";
}

ProfileKind profile_from_name(const std::string& name) {
    for (ProfileKind k : kProfiles) {
        if (profile_name(k) == name) return k;
    }
    throw std::invalid_argument("unknown velocity profile '" + name + "'");
}

VelocityProfile VelocityProfile::make(ProfileKind kind, std::uint64_t seed, double jitter) {
    Rng rng(seed);
    VelocityProfile p;
    p.kind = kind;
    p.level = 1.0 + 0.5 * jitter * (2.0 * uniform01(rng) - 1.0);
    p.wobble_amplitude = 0.5 * jitter * uniform01(rng);
    p.wobble_hz = 0.2 + 0.8 * uniform01(rng);
    p.wobble_phase = 6.283185307179586 * uniform01(rng);
    return p;
}

VelocityProfile VelocityProfile::constant(double speed) {
    if (!(speed > 0.0)) throw std::invalid_argument("constant profile speed must be positive");
    VelocityProfile p;
    p.constant_speed = speed;
    return p;
}

double VelocityProfile::nominal(double position_mm) const {
    if (constant_speed > 0.0) return constant_speed;
    const double f = std::clamp(position_mm / kPlateScanMm, 0.0, 1.0);
    switch (kind) {
    case ProfileKind::slow: return 50.0;
    case ProfileKind::medium: return 100.0;
    case ProfileKind::fast: return 150.0;
    case ProfileKind::slow_to_fast: return 50.0 + 100.0 * f;
    case ProfileKind::fast_to_slow: return 150.0 - 100.0 * f;
    }
    return 100.0;
}

double VelocityProfile::velocity(double t, double position_mm) const {
    const double wobble = 1.0 + wobble_amplitude * std::sin(6.283185307179586 * wobble_hz * t + wobble_phase);
    return nominal(position_mm) * level * wobble;
}

SessionParams SessionParams::make(std::uint64_t seed, double gain_spread, double offset_spread) {
    Rng rng(seed);
    SessionParams s;
    s.seed = seed;
    for (int i = 0; i < kGridTaxels; ++i) {
        s.gain[i] = 1.0 + gain_spread * (2.0 * uniform01(rng) - 1.0);
        s.offset[i] = offset_spread * (2.0 * uniform01(rng) - 1.0);
    }
    return s;
}

SessionParams SessionParams::identity() {
    SessionParams s;
    s.gain.fill(1.0);
    s.offset.fill(0.0);
    return s;
}

std::size_t ScanStream::frame_count() const {
    return static_cast<std::size_t>(
        std::count_if(events.begin(), events.end(), [](const ScanEvent& e) { return e.type == ScanEvent::Type::frame; }));
}

std::size_t ScanStream::velocity_updates() const {
    return static_cast<std::size_t>(std::count_if(
        events.begin(), events.end(), [](const ScanEvent& e) {
            return e.type == ScanEvent::Type::velocity || (e.type == ScanEvent::Type::end && e.velocity > 0.0);
        }));
}

ScanSimulator::ScanSimulator(ScanConfig config) : config_(config), sensor_(config.sensor) {}

ScanStream ScanSimulator::simulate_scan(char texture, const VelocityProfile& profile, const SessionParams& session,
                                        std::uint64_t seed) const {
    const TextureSpec& spec = texture_by_id(texture);
    const SimulatorConfig& sc = sensor_.config();
    Rng rng(seed);
    const double start = config_.start_offset_mm * uniform01(rng);
    const double force = config_.force * std::max(0.05, 1.0 + config_.force_jitter * (2.0 * uniform01(rng) - 1.0));

    std::array<double, kGridTaxels> gain{};
    for (int i = 0; i < kGridTaxels; ++i) gain[i] = kFullScale * sensor_.force_gain(i, force);
    const double noise = sc.noise_sigma * kFullScale;
    const std::size_t batch = static_cast<std::size_t>(std::lround(0.1 * kSampleRate));

    ScanStream stream;
    stream.texture = texture;
    stream.profile = profile.kind;
    double x = 0.0;
    double batch_distance = 0.0;
    std::size_t batch_frames = 0;
    std::size_t k = 0;
    constexpr double reach_tol = 1e-9;
    auto tracked = [&](double distance, std::size_t frames) {
        const double avg = distance / (static_cast<double>(frames) / kSampleRate);
        return avg * (1.0 + config_.tracker_noise * (2.0 * uniform01(rng) - 1.0));
    };

    while (x < kPlateScanMm - reach_tol) {
        const double t = static_cast<double>(k) / kSampleRate;
        ScanEvent ev;
        ev.type = ScanEvent::Type::frame;
        ev.time = t;
        std::array<double, 3> pressure{};
        for (int col = 0; col < 3; ++col) {
            pressure[col] = sc.contact_level + sc.height_gain * texture_profile(spec, start + x + col * kTaxelPitchMm);
        }
        for (int i = 0; i < kGridTaxels; ++i) {
            double value = sensor_.baseline(i) + gain[i] * pressure[taxel_col(i)];
            value = session.gain[i] * value + session.offset[i] * kFullScale;
            if (noise > 0.0) value += noise * standard_normal(rng);
            ev.frame[i] = static_cast<std::uint16_t>(std::clamp(std::round(value), 0.0, kFullScale));
        }
        stream.events.push_back(ev);

        const double v = profile.velocity(t, x);
        const double step = v / kSampleRate;
        x += step;
        batch_distance += step;
        ++batch_frames;
        ++k;
        if (batch_frames == batch && x < kPlateScanMm - reach_tol) {
            ScanEvent up;
            up.type = ScanEvent::Type::velocity;
            up.time = static_cast<double>(k) / kSampleRate;
            up.velocity = tracked(batch_distance, batch_frames);
            stream.events.push_back(up);
            batch_distance = 0.0;
            batch_frames = 0;
        }
    }

    ScanEvent end;
    end.type = ScanEvent::Type::end;
    end.time = static_cast<double>(k) / kSampleRate;
    end.velocity = batch_frames > 0 ? tracked(batch_distance, batch_frames) : 0.0;
    stream.events.push_back(end);
    stream.travelled_mm = x;
    return stream;
}

namespace {

constexpr char kStreamMagic[4] = {'N', 'T', 'S', 'S'};
constexpr std::uint16_t kStreamVersion = 1;

template <typename T>
void put(std::ostream& out, T value) {
    static_assert(std::endian::native == std::endian::little, "stream logs are little-endian");
    out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

template <typename T>
T take(std::istream& in, const std::filesystem::path& path) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof value);
    if (!in) throw FormatError(path, "truncated scan stream");
    return value;
}

}  // namespace

void write_scan_stream(const std::filesystem::path& path, const ScanStream& stream) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path, "cannot open scan stream for writing");
    out.write(kStreamMagic, 4);
    put<std::uint16_t>(out, kStreamVersion);
    put<char>(out, stream.texture);
    put<std::uint8_t>(out, static_cast<std::uint8_t>(stream.profile));
    put<double>(out, stream.travelled_mm);
    put<std::uint64_t>(out, stream.events.size());
    for (const auto& e : stream.events) {
        put<std::uint8_t>(out, static_cast<std::uint8_t>(e.type));
        put<double>(out, e.time);
        if (e.type == ScanEvent::Type::frame) {
            for (auto v : e.frame) put<std::uint16_t>(out, v);
        } else {
            put<double>(out, e.velocity);
        }
    }
    if (!out) throw IoError(path, "failed writing scan stream");
}

ScanStream read_scan_stream(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path, "cannot open scan stream");
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kStreamMagic, 4) != 0) throw FormatError(path, "not a scan stream");
    if (take<std::uint16_t>(in, path) != kStreamVersion) throw FormatError(path, "unsupported scan stream version");
    ScanStream s;
    s.texture = take<char>(in, path);
    const auto profile = take<std::uint8_t>(in, path);
    if (profile >= kProfiles.size()) throw FormatError(path, "bad velocity profile code");
    s.profile = static_cast<ProfileKind>(profile);
    s.travelled_mm = take<double>(in, path);
    const auto n = take<std::uint64_t>(in, path);
    s.events.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(n, 1u << 20)));
    for (std::uint64_t i = 0; i < n; ++i) {
        ScanEvent e;
        const auto type = take<std::uint8_t>(in, path);
        if (type < 1 || type > 3) throw FormatError(path, "bad event type");
        e.type = static_cast<ScanEvent::Type>(type);
        e.time = take<double>(in, path);
        if (e.type == ScanEvent::Type::frame) {
            for (auto& v : e.frame) v = take<std::uint16_t>(in, path);
        } else {
            e.velocity = take<double>(in, path);
        }
        s.events.push_back(e);
    }
    return s;
}

TaxelRange stream_range(std::span<const ScanStream> streams) {
    TaxelRange range;
    range.min.assign(kGridTaxels, std::numeric_limits<double>::infinity());
    range.max.assign(kGridTaxels, -std::numeric_limits<double>::infinity());
    for (const auto& s : streams) {
        for (const auto& e : s.events) {
            if (e.type != ScanEvent::Type::frame) continue;
            for (int i = 0; i < kGridTaxels; ++i) {
                range.min[i] = std::min(range.min[i], static_cast<double>(e.frame[i]));
                range.max[i] = std::max(range.max[i], static_cast<double>(e.frame[i]));
            }
        }
    }
    finalize_range(range);
    return range;
}

namespace {

struct Span {
    double scaled_begin;
    double scaled_end;
    double factor;
};

}  // namespace

StreamFeatures run_stream_both(const ScanStream& stream, const TaxelRange& range, const StreamConfig& config) {
    if (!stream.has_end()) throw std::invalid_argument("scan stream has no end-of-scan event");
    if (range.size() != static_cast<std::size_t>(kGridTaxels) || range.degenerate.size() != range.size()) {
        throw std::invalid_argument("stream normalization needs a finalized 9-channel range");
    }
    const double fs = config.encoder.sample_rate;

    std::vector<IzhikevichNeuron> neurons;
    for (int i = 0; i < kGridTaxels; ++i) neurons.emplace_back(config.encoder.sa, fs);
    std::vector<StreamWarpState> warp(kGridTaxels);
    std::vector<std::vector<double>> pending(kGridTaxels);
    StreamFeatures out;
    out.real_trains.resize(kGridTaxels);
    out.scaled_trains.resize(kGridTaxels);
    std::vector<Span> spans;

    std::size_t frames = 0;
    std::size_t batch_frames = 0;
    auto flush = [&](double velocity) {
        const double length = static_cast<double>(batch_frames) / fs;
        for (int i = 0; i < kGridTaxels; ++i) {
            const BatchWarp w = warp_stream_batch(warp[i], pending[i], velocity, config.warp, length);
            warp[i] = w.state;
            auto& dst = out.scaled_trains[i].times;
            dst.insert(dst.end(), w.scaled.begin(), w.scaled.end());
            pending[i].clear();
            if (i == 0) spans.push_back({w.scaled_begin, w.scaled_end, velocity / config.warp.reference_speed});
        }
        batch_frames = 0;
    };

    for (const auto& e : stream.events) {
        switch (e.type) {
        case ScanEvent::Type::frame: {
            const double t = static_cast<double>(frames) / fs;
            for (int i = 0; i < kGridTaxels; ++i) {
                double v = 0.0;
                if (!range.degenerate[i]) {
                    v = std::clamp((e.frame[i] - range.min[i]) / (range.max[i] - range.min[i]), 0.0, 1.0);
                }
                if (neurons[i].step(v)) {
                    pending[i].push_back(t);
                    out.real_trains[i].times.push_back(t);
                }
            }
            ++frames;
            ++batch_frames;
            break;
        }
        case ScanEvent::Type::velocity:
        case ScanEvent::Type::end:
            flush(e.velocity);
            break;
        }
    }

    const double duration = static_cast<double>(frames) / fs;
    const double scaled_duration = warp[0].scaled_clock;
    for (int i = 0; i < kGridTaxels; ++i) {
        out.real_trains[i].duration = duration;
        auto& st = out.scaled_trains[i];
        st.duration = std::max(scaled_duration, st.times.empty() ? 0.0 : st.times.back());
    }

    out.unscaled = build_feature_vector(out.real_trains, FeatureMode::realtime);

    const auto n_windows = static_cast<std::size_t>(kRealtimeWindows);
    const double width = config.scaled_length / static_cast<double>(n_windows);
    std::vector<double> real_time(n_windows, 0.0);
    for (const Span& s : spans) {
        if (!(s.factor > 0.0)) continue;
        for (std::size_t w = 0; w < n_windows; ++w) {
            const double lo = std::max(s.scaled_begin, width * static_cast<double>(w));
            const double hi = std::min(s.scaled_end, width * static_cast<double>(w + 1));
            if (hi > lo) real_time[w] += (hi - lo) / s.factor;
        }
    }
    out.scaled.mode = FeatureMode::realtime;
    out.scaled.values.reserve(feature_length(FeatureMode::realtime));
    for (int i = 0; i < kGridTaxels; ++i) {
        const std::vector<double> counts = windowed_sc(out.scaled_trains[i], width, n_windows);
        for (std::size_t w = 0; w < n_windows; ++w) {
            out.scaled.values.push_back(real_time[w] > 0.0 ? counts[w] / real_time[w] : 0.0);
        }
    }
    return out;
}

FeatureVector run_stream(const ScanStream& stream, const TaxelRange& range, bool speed_scaling,
                         const StreamConfig& config) {
    StreamFeatures f = run_stream_both(stream, range, config);
    return speed_scaling ? std::move(f.scaled) : std::move(f.unscaled);
}

LivePrediction classify_live(const ClassifierModel& model, const FeatureVector& feature, char truth) {
    const auto n = static_cast<Eigen::Index>(feature.values.size());
    if (n != model.pca.mean.size()) {
        throw std::invalid_argument("feature length " + std::to_string(n) + " does not match the model");
    }
    const Eigen::RowVectorXd x = Eigen::Map<const Eigen::RowVectorXd>(feature.values.data(), n);
    const Eigen::RowVectorXd center = model.session_mean ? *model.session_mean : model.pca.mean;
    const Eigen::Index pcs = model.lda.weights.rows();
    const Eigen::RowVectorXd scores = (x - center) * model.pca.components.leftCols(pcs);
    LivePrediction p;
    p.texture = static_cast<char>(lda_predict_one(model.lda, scores));
    p.correct = p.texture == truth;
    return p;
}

namespace {

enum class Collection : std::uint64_t { range = 0, train = 1, recal = 2, realtime = 3 };

std::vector<ScanStream> collect(const ScanSimulator& sim, std::uint64_t seed, Collection which, int per_profile,
                                const SessionParams& session, std::vector<TrialLabel>* labels, int session_id) {
    std::vector<ScanStream> streams;
    const double jitter = sim.config().velocity_jitter;
    for (std::size_t ti = 0; ti < kPlateTextures.size(); ++ti) {
        for (std::size_t pi = 0; pi < kProfiles.size(); ++pi) {
            for (int j = 0; j < per_profile; ++j) {
                const std::initializer_list<std::uint64_t> idx{static_cast<std::uint64_t>(which), ti, pi,
                                                               static_cast<std::uint64_t>(j)};
                const VelocityProfile profile =
                    VelocityProfile::make(kProfiles[pi], derive_seed(seed, "profile", idx), jitter);
                streams.push_back(sim.simulate_scan(kPlateTextures[ti], profile, session, derive_seed(seed, "scan", idx)));
                if (labels) {
                    TrialLabel l;
                    l.texture = kPlateTextures[ti];
                    l.group = group_index(texture_by_id(l.texture).group);
                    l.trial = j;
                    l.profile = profile_name(kProfiles[pi]);
                    l.session = session_id;
                    labels->push_back(std::move(l));
                }
            }
        }
    }
    return streams;
}

RtCollection featurize(std::span<const ScanStream> streams, std::vector<TrialLabel> labels, const TaxelRange& range,
                       const StreamConfig& config) {
    std::vector<FeatureVector> scaled;
    std::vector<FeatureVector> unscaled;
    for (const auto& s : streams) {
        StreamFeatures f = run_stream_both(s, range, config);
        scaled.push_back(std::move(f.scaled));
        unscaled.push_back(std::move(f.unscaled));
    }
    RtCollection c;
    c.scaled = assemble_and_center(scaled, labels);
    c.unscaled = assemble_and_center(unscaled, std::move(labels));
    return c;
}

}  // namespace

RtDataset generate_rt_dataset(std::uint64_t seed, const RtDatasetConfig& config) {
    ScanConfig scan = config.scan;
    scan.sensor.sensor_seed = derive_seed(seed, "rt-sensor");
    const ScanSimulator sim(scan);
    const SessionParams first = SessionParams::make(derive_seed(seed, "session", {0}));
    const SessionParams second = SessionParams::make(derive_seed(seed, "session", {1}));

    RtDataset d;
    const auto initial = collect(sim, seed, Collection::range, config.range_per_profile, first, nullptr, 0);
    d.range = stream_range(initial);

    std::vector<TrialLabel> labels;
    auto streams = collect(sim, seed, Collection::train, config.train_per_profile, first, &labels, 0);
    d.train = featurize(streams, std::move(labels), d.range, config.stream);
    labels.clear();
    streams = collect(sim, seed, Collection::recal, config.recal_per_profile, second, &labels, 1);
    d.recal = featurize(streams, std::move(labels), d.range, config.stream);
    labels.clear();
    streams = collect(sim, seed, Collection::realtime, config.realtime_per_profile, second, &labels, 1);
    d.realtime = featurize(streams, std::move(labels), d.range, config.stream);
    return d;
}

std::string protocol_name(RtProtocol p) {
    switch (p) {
    case RtProtocol::fig4b_offline: return "fig4b-offline";
    case RtProtocol::fig4b_crosssession: return "fig4b-crosssession";
    case RtProtocol::fig4c_extrapolation: return "fig4c-extrapolation";
    case RtProtocol::s5_demo: return "s5-demo";
    }
    return "unknown";
}

namespace {

std::vector<int> texture_labels(const FeatureMatrix& m) {
    std::vector<int> out;
    for (const auto& l : m.labels) out.push_back(l.texture);
    return out;
}

Eigen::MatrixXd rows_of(const Eigen::MatrixXd& x, const std::vector<Eigen::Index>& rows) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), x.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(rows[i]);
    return out;
}

std::vector<int> labels_of(const std::vector<int>& labels, const std::vector<Eigen::Index>& rows) {
    std::vector<int> out;
    for (auto r : rows) out.push_back(labels[static_cast<std::size_t>(r)]);
    return out;
}

bool is_trained_profile(const std::string& profile) {
    return profile == profile_name(ProfileKind::slow) || profile == profile_name(ProfileKind::medium);
}

// Per-texture random subsets of `candidates`, each of size round(fraction * n).
std::vector<Eigen::Index> draw_training(const FeatureMatrix& m, const std::vector<Eigen::Index>& candidates,
                                        double fraction, Rng& rng) {
    std::map<char, std::vector<Eigen::Index>> by_texture;
    for (auto r : candidates) by_texture[m.labels[static_cast<std::size_t>(r)].texture].push_back(r);
    std::vector<Eigen::Index> out;
    for (auto& [tex, rows] : by_texture) {
        shuffle_in_place(rows, rng);
        const auto take = static_cast<std::size_t>(std::lround(fraction * static_cast<double>(rows.size())));
        out.insert(out.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(take));
    }
    return out;
}

void add_outcome(ExperimentResult& r, const std::vector<int>& truth, const std::vector<int>& guess) {
    long correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) correct += truth[i] == guess[i];
    r.accuracies.push_back(truth.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(truth.size()));
    r.tested = truth.size();
    r.confusion += confusion_matrix(truth, guess, r.classes);
}

RtResult blank(RtProtocol p, std::string subset, const std::vector<int>& pcs) {
    RtResult r;
    r.protocol = p;
    r.subset = std::move(subset);
    std::vector<int> classes(kPlateTextures.begin(), kPlateTextures.end());
    for (int pc : pcs) {
        for (auto* side : {&r.scaled, &r.original}) {
            ExperimentResult e;
            e.name = side == &r.scaled ? "speed-scaled" : "original";
            e.pcs = pc;
            e.kind = Dispersion::se;
            e.classes = classes;
            e.confusion = Eigen::MatrixXi::Zero(5, 5);
            side->push_back(std::move(e));
        }
    }
    return r;
}

void merge_into(std::vector<ExperimentResult>& dst, const std::vector<ExperimentResult>& src) {
    for (std::size_t i = 0; i < dst.size(); ++i) {
        dst[i].accuracies.insert(dst[i].accuracies.end(), src[i].accuracies.begin(), src[i].accuracies.end());
        dst[i].confusion += src[i].confusion;
        dst[i].tested = src[i].tested;
    }
}

// Trains on `train_rows` of the training collection and scores test rows of
// `test`, centered with `test_mean`, for both variants.
void score_split(const RtDataset& d, const std::vector<Eigen::Index>& train_rows, const RtCollection& test,
                 const std::vector<Eigen::Index>& test_rows, const Eigen::RowVectorXd& scaled_mean,
                 const Eigen::RowVectorXd& original_mean, const std::vector<int>& pcs, RtResult& out) {
    const std::vector<int> train_labels = labels_of(texture_labels(d.train.scaled), train_rows);
    const std::vector<int> truth = labels_of(texture_labels(test.scaled), test_rows);
    const auto scaled = evaluate_split(rows_of(d.train.scaled.values, train_rows), {train_labels},
                                       rows_of(test.scaled.values, test_rows), pcs, scaled_mean);
    const auto original = evaluate_split(rows_of(d.train.unscaled.values, train_rows), {train_labels},
                                         rows_of(test.unscaled.values, test_rows), pcs, original_mean);
    for (std::size_t p = 0; p < pcs.size(); ++p) {
        add_outcome(out.scaled[p], truth, scaled.labels[0][p]);
        add_outcome(out.original[p], truth, original.labels[0][p]);
    }
}

std::vector<Eigen::Index> all_rows(const FeatureMatrix& m) {
    std::vector<Eigen::Index> rows(static_cast<std::size_t>(m.rows()));
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<Eigen::Index>(i);
    return rows;
}

}  // namespace

std::vector<RtResult> run_protocol(RtProtocol which, std::span<const RtDataset> datasets,
                                   const RtProtocolConfig& config) {
    std::vector<int> pcs = config.pcs;
    if (pcs.empty()) {
        for (int p = 1; p <= kLivePcs; ++p) pcs.push_back(p);
    }
    if (datasets.empty()) throw std::invalid_argument("no real-time datasets supplied");

    std::vector<RtResult> results;
    if (which == RtProtocol::fig4c_extrapolation) {
        results.push_back(blank(which, "trained-profiles", pcs));
        results.push_back(blank(which, "untrained-profiles", pcs));
    } else {
        results.push_back(blank(which, "all", pcs));
    }

    for (std::size_t di = 0; di < datasets.size(); ++di) {
        const RtDataset& d = datasets[di];
        const std::uint64_t seed = derive_seed(config.seed, protocol_name(which), {di});
        if (which == RtProtocol::fig4b_offline) {
            KFoldConfig kf;
            kf.k = 4;
            kf.repeats = config.repeats;
            kf.seed = seed;
            kf.pcs = pcs;
            kf.kind = Dispersion::se;
            const std::vector<int> labels = texture_labels(d.train.scaled);
            merge_into(results[0].scaled, kfold_eval(d.train.scaled.values, labels, kf));
            merge_into(results[0].original, kfold_eval(d.train.unscaled.values, labels, kf));
            continue;
        }

        const Eigen::RowVectorXd scaled_mean = column_mean(d.recal.scaled.values);
        const Eigen::RowVectorXd original_mean = column_mean(d.recal.unscaled.values);
        const std::vector<Eigen::Index> test_all = all_rows(d.realtime.scaled);

        if (which == RtProtocol::s5_demo) {
            score_split(d, all_rows(d.train.scaled), d.realtime, test_all, scaled_mean, original_mean, pcs,
                        results[0]);
            continue;
        }

        for (int rep = 0; rep < config.repeats; ++rep) {
            Rng rng(derive_seed(seed, "repeat", {static_cast<std::uint64_t>(rep)}));
            if (which == RtProtocol::fig4b_crosssession) {
                const auto train = draw_training(d.train.scaled, all_rows(d.train.scaled), config.train_fraction, rng);
                score_split(d, train, d.realtime, test_all, scaled_mean, original_mean, pcs, results[0]);
            } else {
                std::vector<Eigen::Index> candidates;
                for (auto r : all_rows(d.train.scaled)) {
                    if (is_trained_profile(d.train.scaled.labels[static_cast<std::size_t>(r)].profile)) {
                        candidates.push_back(r);
                    }
                }
                const auto train = draw_training(d.train.scaled, candidates, config.train_fraction, rng);
                std::vector<Eigen::Index> seen;
                std::vector<Eigen::Index> unseen;
                for (auto r : test_all) {
                    const bool trained = is_trained_profile(d.realtime.scaled.labels[static_cast<std::size_t>(r)].profile);
                    (trained ? seen : unseen).push_back(r);
                }
                score_split(d, train, d.realtime, seen, scaled_mean, original_mean, pcs, results[0]);
                score_split(d, train, d.realtime, unseen, scaled_mean, original_mean, pcs, results[1]);
            }
        }
    }

    for (auto& r : results) {
        for (auto& e : r.scaled) summarize(e);
        for (auto& e : r.original) summarize(e);
    }
    return results;
}

RtSampleSizes rt_sample_sizes(const RtDatasetConfig& config, double train_fraction) {
    const int textures = static_cast<int>(kPlateTextures.size());
    const int profiles = static_cast<int>(kProfiles.size());
    RtSampleSizes s;
    const SplitSizes folds = kfold_split_sizes(profiles * config.train_per_profile, textures, 4);
    s.offline_train = folds.train;
    s.offline_test = folds.test;
    const auto per_texture = [&](int n) { return static_cast<int>(std::lround(train_fraction * n)); };
    s.cross_train = textures * per_texture(profiles * config.train_per_profile);
    s.cross_test = textures * profiles * config.realtime_per_profile;
    s.extrapolation_train = textures * per_texture(2 * config.train_per_profile);
    s.extrapolation_trained_test = textures * 2 * config.realtime_per_profile;
    s.extrapolation_untrained_test = textures * 3 * config.realtime_per_profile;
    return s;
}

}  // namespace neurotac
