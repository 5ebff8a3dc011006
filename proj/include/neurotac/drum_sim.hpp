#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace neurotac {

inline constexpr int kTaxelCount = 18;   ///< two layers of a 3x3 grid
inline constexpr int kGridTaxels = 9;    ///< one layer
inline constexpr double kSampleRate = 1000.0;
inline constexpr double kTaxelPitchMm = 5.0;
inline constexpr int kQuantLevels = 1024;
inline constexpr double kFullScale = kQuantLevels - 1;

inline constexpr std::array<double, 5> kSpeeds{40.0, 60.0, 80.0, 100.0, 120.0};
inline constexpr std::array<double, 3> kForces{250.0, 500.0, 1000.0};
inline constexpr double kReferenceForce = 500.0;
inline constexpr double kDefaultScanLength = 240.0;

enum class TextureGroup { smooth, circular_ridges, rectangular_ridges, waves };

std::string_view group_name(TextureGroup group);
inline int group_index(TextureGroup group) { return static_cast<int>(group); }

struct TextureSpec {
    char id = 'A';
    TextureGroup group = TextureGroup::smooth;
    double height_scale = 1.0;
    double space_scale = 1.0;
    double base_height_mm = 1.0;
    double base_spacing_mm = 6.0;

    double period_mm() const { return base_spacing_mm * space_scale; }
    double amplitude_mm() const { return base_height_mm * height_scale; }
};

/// The 16 textures A-P: smooth control, then circular ridges, rectangular
/// ridges and waves, each as base, double height, double space, half height,
/// half space.
const std::vector<TextureSpec>& texture_set();
const TextureSpec& texture_by_id(char id);
/// Position of a texture in texture_set(); throws on unknown ids.
int texture_index(char id);

/// Surface height under a point at `position_mm` along the scan.
double texture_profile(const TextureSpec& spec, double position_mm);

struct TrialCondition {
    double speed = 120.0;                   ///< mm/s
    double force = 500.0;                   ///< grams
    double scan_length = kDefaultScanLength;  ///< mm

    double duration() const { return scan_length / speed; }
    std::size_t n_samples() const;
};

/// The 15 speed-force combinations, speed-major.
std::vector<TrialCondition> standard_conditions(double scan_length = kDefaultScanLength);
int speed_index(double speed);
int force_index(double force);

/// One trial of readings, frame-major (`channels` values per time step).
struct SensorTrace {
    std::vector<double> samples;
    std::size_t n_samples = 0;
    int channels = kTaxelCount;
    double sample_rate = kSampleRate;
    TrialCondition condition;
    char texture = 'A';
    int trial_id = 0;

    double at(std::size_t t, int taxel) const { return samples[t * channels + taxel]; }
    double& at(std::size_t t, int taxel) { return samples[t * channels + taxel]; }
    std::vector<double> channel(int taxel) const;
    double duration() const { return static_cast<double>(n_samples) / sample_rate; }
};

/// Taxel index within the array. Layer 0 is the top (Type I) layer, layer 1
/// the bottom (Type II) layer. Columns run along the scan direction.
inline constexpr int taxel_id(int layer, int row, int col) { return layer * 9 + row * 3 + col; }
inline constexpr int taxel_col(int taxel) { return taxel % 3; }
inline constexpr int taxel_row(int taxel) { return (taxel % 9) / 3; }
inline constexpr int taxel_layer(int taxel) { return taxel / 9; }

struct SimulatorConfig {
    double noise_sigma = 0.01;      ///< fraction of full scale, pre-quantization
    double force_exponent = 0.7;    ///< g(F) = (F / 500)^exponent
    double gain_variation = 0.05;   ///< per-taxel multiplicative spread
    double contact_level = 0.10;    ///< fraction of full scale at 500 g, flat surface
    double height_gain = 0.18;      ///< fraction of full scale per mm of relief at 500 g
    double baseline_min = 60.0;     ///< per-taxel baseline, counts
    double baseline_max = 140.0;
    double typeii_window_ms = 50.0; ///< temporal box of the bottom layer
    double phase_range_mm = 0.0;    ///< random drum position at trial start
    double force_jitter = 0.0;      ///< per-trial relative force error (std dev)
    bool quantize = true;
    std::uint64_t sensor_seed = 1;  ///< fixes per-taxel gain and baseline
};

/// Synthetic rotating-drum apparatus with one physical sensor.
class DrumSimulator {
public:
    explicit DrumSimulator(SimulatorConfig config = {});

    const SimulatorConfig& config() const { return config_; }

    /// Saturating force gain of one taxel (strictly increasing, concave).
    double force_gain(int taxel, double force) const;
    double baseline(int taxel) const { return baseline_[taxel]; }

    /// Raw (unnormalized) readings in ADC counts.
    SensorTrace simulate_trial(const TextureSpec& spec, const TrialCondition& condition,
                               std::uint64_t seed) const;

private:
    SimulatorConfig config_;
    std::array<double, kTaxelCount> gain_scale_{};
    std::array<double, kTaxelCount> baseline_{};
};

/// Per-taxel normalization bounds.
struct TaxelRange {
    std::vector<double> min;
    std::vector<double> max;
    std::vector<bool> degenerate;

    std::size_t size() const { return min.size(); }
};

/// Min/max of every channel over the given traces.
TaxelRange compute_range(std::span<const SensorTrace> traces, int channels = kTaxelCount);
void extend_range(TaxelRange& range, const SensorTrace& trace);
/// Flags channels whose min equals max.
void finalize_range(TaxelRange& range);

/// Affine map of every channel onto [0, 1]; out-of-range values are clipped
/// and degenerate channels become 0.
void normalize_trace(SensorTrace& trace, const TaxelRange& range);

}  // namespace neurotac
