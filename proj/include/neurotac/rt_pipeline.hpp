#pragma once

#include <neurotac/drum_sim.hpp>
#include <neurotac/experiment.hpp>
#include <neurotac/features.hpp>
#include <neurotac/lda.hpp>
#include <neurotac/speed_warp.hpp>
#include <neurotac/spike_codec.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace neurotac {

inline constexpr double kPlateScanMm = 200.0;
inline constexpr std::array<char, 5> kPlateTextures{'A', 'B', 'D', 'L', 'N'};
inline constexpr int kLivePcs = 25;

enum class ProfileKind { slow, medium, fast, slow_to_fast, fast_to_slow };
inline constexpr std::array<ProfileKind, 5> kProfiles{ProfileKind::slow, ProfileKind::medium, ProfileKind::fast,
                                                      ProfileKind::slow_to_fast, ProfileKind::fast_to_slow};

std::string profile_name(ProfileKind kind);
ProfileKind profile_from_name(const std::string& name);

/// Operator hand speed over one scan.
///
/// Nominal speed is 50, 100 or 150 mm/s, or a ramp between 50 and 150 that
/// is linear in position. The realization multiplies it by a per-scan level
/// and a slow sinusoidal wobble, together within +-10%.
struct VelocityProfile {
    ProfileKind kind = ProfileKind::medium;
    double level = 1.0;
    double wobble_amplitude = 0.0;
    double wobble_hz = 0.5;
    double wobble_phase = 0.0;
    double constant_speed = 0.0;  ///< overrides the kind when positive

    static VelocityProfile make(ProfileKind kind, std::uint64_t seed, double jitter = 0.10);
    /// Exactly the nominal speed, no jitter.
    static VelocityProfile constant(double speed);

    double nominal(double position_mm) const;
    double velocity(double t, double position_mm) const;
};

/// Per-session sensor drift on the 9 taxels: readings become
/// gain * raw + offset * full scale.
struct SessionParams {
    std::array<double, kGridTaxels> gain{};
    std::array<double, kGridTaxels> offset{};
    std::uint64_t seed = 0;

    static SessionParams make(std::uint64_t seed, double gain_spread = 0.10, double offset_spread = 0.02);
    static SessionParams identity();
};

struct ScanEvent {
    enum class Type : std::uint8_t { frame = 1, velocity = 2, end = 3 };
    Type type = Type::frame;
    double time = 0.0;                            ///< s since scan start
    std::array<std::uint16_t, kGridTaxels> frame{};
    double velocity = 0.0;                        ///< mm/s, for velocity and end events
};

/// Time-ordered tactile frames (1 kHz) and tracker velocity updates (every
/// 100 ms, each the average over the preceding batch). The end event
/// carries the average velocity of the final partial batch.
struct ScanStream {
    char texture = 'A';
    ProfileKind profile = ProfileKind::medium;
    std::vector<ScanEvent> events;
    double travelled_mm = 0.0;  ///< integrated true position at the last frame

    std::size_t frame_count() const;
    /// Velocity events plus an end event that closes a batch.
    std::size_t velocity_updates() const;
    bool has_end() const { return !events.empty() && events.back().type == ScanEvent::Type::end; }
};

struct ScanConfig {
    SimulatorConfig sensor;          ///< top layer of this sensor is used
    double force = kReferenceForce;  ///< nominal operator force, g
    double force_jitter = 0.10;      ///< per-scan relative spread
    double tracker_noise = 0.03;     ///< relative error of each velocity update
    double velocity_jitter = 0.10;
    double start_offset_mm = 0.0;    ///< random plate position at scan start
};

class ScanSimulator {
public:
    explicit ScanSimulator(ScanConfig config = {});

    const ScanConfig& config() const { return config_; }

    ScanStream simulate_scan(char texture, const VelocityProfile& profile, const SessionParams& session,
                             std::uint64_t seed) const;

private:
    ScanConfig config_;
    DrumSimulator sensor_;
};

/// Binary log: "NTSS", u16 version, texture, profile, then one record per
/// event (u8 type, f64 time, payload).
void write_scan_stream(const std::filesystem::path& path, const ScanStream& stream);
ScanStream read_scan_stream(const std::filesystem::path& path);

/// Raw min/max of the 9 channels over a set of streams.
TaxelRange stream_range(std::span<const ScanStream> streams);

struct StreamConfig {
    WarpConfig warp = WarpConfig::streaming();
    EncoderConfig encoder;
    double scaled_length = 2.0;  ///< s of scaled time per scan
};

struct StreamFeatures {
    FeatureVector scaled;    ///< speed scaling on
    FeatureVector unscaled;  ///< speed scaling off
    std::vector<SpikeTrain> real_trains;
    std::vector<SpikeTrain> scaled_trains;
};

/// Causal SA encoding of the 9 channels with batch warping; both feature
/// variants come from the same spikes. Throws std::invalid_argument for a
/// stream without an end event.
StreamFeatures run_stream_both(const ScanStream& stream, const TaxelRange& range, const StreamConfig& config = {});

FeatureVector run_stream(const ScanStream& stream, const TaxelRange& range, bool speed_scaling,
                         const StreamConfig& config = {});

struct LivePrediction {
    char texture = 'A';
    bool correct = false;
};

/// Subtracts the model's session mean, projects on its PCs and predicts.
LivePrediction classify_live(const ClassifierModel& model, const FeatureVector& feature, char truth);

/// Trials per (texture, profile) for each collection.
struct RtDatasetConfig {
    int range_per_profile = 2;        ///< initial normalization scans
    int train_per_profile = 4;
    int recal_per_profile = 2;
    int realtime_per_profile = 4;
    ScanConfig scan;
    StreamConfig stream;
};

/// Features of one collection, rows ordered texture, profile, trial.
struct RtCollection {
    FeatureMatrix scaled;
    FeatureMatrix unscaled;
};

/// One simulated dataset: training collection in one session, recalibration
/// and real-time collections in a later session, same physical sensor.
struct RtDataset {
    RtCollection train;
    RtCollection recal;
    RtCollection realtime;
    TaxelRange range;
};

RtDataset generate_rt_dataset(std::uint64_t seed, const RtDatasetConfig& config = {});

enum class RtProtocol { fig4b_offline, fig4b_crosssession, fig4c_extrapolation, s5_demo };

std::string protocol_name(RtProtocol p);

struct RtProtocolConfig {
    int repeats = 100;
    std::vector<int> pcs;  ///< defaults to 1..25
    std::uint64_t seed = 1;
    double train_fraction = 0.75;
};

/// Accuracy samples per PC for both variants; `subset` names the test set
/// ("all", "trained-profiles", "untrained-profiles").
struct RtResult {
    RtProtocol protocol = RtProtocol::fig4b_offline;
    std::string subset = "all";
    std::vector<ExperimentResult> scaled;
    std::vector<ExperimentResult> original;
};

/// Runs a protocol over every dataset and pools the repeats, so each point
/// has datasets.size() * repeats samples (one per dataset for s5_demo).
std::vector<RtResult> run_protocol(RtProtocol which, std::span<const RtDataset> datasets,
                                   const RtProtocolConfig& config);

/// Sample sizes of the protocols for a dataset configuration.
struct RtSampleSizes {
    int offline_train = 0;
    int offline_test = 0;
    int cross_train = 0;
    int cross_test = 0;
    int extrapolation_train = 0;
    int extrapolation_trained_test = 0;
    int extrapolation_untrained_test = 0;
};

RtSampleSizes rt_sample_sizes(const RtDatasetConfig& config, double train_fraction = 0.75);

}  // namespace neurotac
