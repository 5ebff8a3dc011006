#include <neurotac/drum_sim.hpp>

#include <neurotac/random.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace neurotac {

std::string_view group_name(TextureGroup group) {
    switch (group) {
    case TextureGroup::smooth: return "smooth";
    case TextureGroup::circular_ridges: return "circular_ridges";
    case TextureGroup::rectangular_ridges: return "rectangular_ridges";
    case TextureGroup::waves: return "waves";
    }
    return "unknown";
}

const std::vector<TextureSpec>& texture_set() {
    static const std::vector<TextureSpec> set = [] {
        std::vector<TextureSpec> out;
        out.push_back({'A', TextureGroup::smooth, 1.0, 1.0});
        // base, double height, double space, half height, half space
        constexpr std::array<std::pair<double, double>, 5> variants{
            {{1.0, 1.0}, {2.0, 1.0}, {1.0, 2.0}, {0.5, 1.0}, {1.0, 0.5}}};
        char id = 'B';
        for (auto group : {TextureGroup::circular_ridges, TextureGroup::rectangular_ridges,
                           TextureGroup::waves}) {
            for (auto [height, space] : variants) {
                out.push_back({id++, group, height, space});
            }
        }
        return out;
    }();
    return set;
}

int texture_index(char id) {
    const auto& set = texture_set();
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (set[i].id == id) return static_cast<int>(i);
    }
    throw std::invalid_argument(std::string("unknown texture id '") + id + "'");
}

const TextureSpec& texture_by_id(char id) { return texture_set()[texture_index(id)]; }

double texture_profile(const TextureSpec& spec, double position_mm) {
    if (spec.group == TextureGroup::smooth) return 0.0;
    const double period = spec.period_mm();
    const double height = spec.amplitude_mm();
    double phase = std::fmod(position_mm, period);
    if (phase < 0.0) phase += period;
    switch (spec.group) {
    case TextureGroup::waves:
        return 0.5 * height * (1.0 + std::sin(2.0 * std::numbers::pi * phase / period));
    case TextureGroup::rectangular_ridges:
        return phase < 0.5 * period ? height : 0.0;
    case TextureGroup::circular_ridges: {
        // semicircular bump over the first half period, flat gap after it
        const double quarter = 0.25 * period;
        if (phase >= 0.5 * period) return 0.0;
        const double x = (phase - quarter) / quarter;
        return height * std::sqrt(std::max(0.0, 1.0 - x * x));
    }
    case TextureGroup::smooth: break;
    }
    return 0.0;
}

std::size_t TrialCondition::n_samples() const {
    return static_cast<std::size_t>(std::llround(duration() * kSampleRate));
}

std::vector<TrialCondition> standard_conditions(double scan_length) {
    std::vector<TrialCondition> out;
    for (double speed : kSpeeds) {
        for (double force : kForces) out.push_back({speed, force, scan_length});
    }
    return out;
}

int speed_index(double speed) {
    for (std::size_t i = 0; i < kSpeeds.size(); ++i) {
        if (std::abs(kSpeeds[i] - speed) < 1e-9) return static_cast<int>(i);
    }
    throw std::invalid_argument("speed " + std::to_string(speed) + " is not a drum speed");
}

int force_index(double force) {
    for (std::size_t i = 0; i < kForces.size(); ++i) {
        if (std::abs(kForces[i] - force) < 1e-9) return static_cast<int>(i);
    }
    throw std::invalid_argument("force " + std::to_string(force) + " is not a drum force");
}

std::vector<double> SensorTrace::channel(int taxel) const {
    std::vector<double> out(n_samples);
    for (std::size_t t = 0; t < n_samples; ++t) out[t] = samples[t * channels + taxel];
    return out;
}

DrumSimulator::DrumSimulator(SimulatorConfig config) : config_(config) {
    Rng rng = make_rng(config_.sensor_seed, "sensor");
    for (int i = 0; i < kTaxelCount; ++i) {
        gain_scale_[i] = 1.0 + config_.gain_variation * (2.0 * uniform01(rng) - 1.0);
        baseline_[i] = config_.baseline_min +
                       (config_.baseline_max - config_.baseline_min) * uniform01(rng);
    }
}

double DrumSimulator::force_gain(int taxel, double force) const {
    return gain_scale_[taxel] * std::pow(force / kReferenceForce, config_.force_exponent);
}

SensorTrace DrumSimulator::simulate_trial(const TextureSpec& spec, const TrialCondition& condition,
                                          std::uint64_t seed) const {
    if (!(condition.speed > 0.0)) throw std::invalid_argument("speed must be positive");
    if (!(condition.force > 0.0)) throw std::invalid_argument("force must be positive");
    if (!(condition.scan_length > 0.0)) throw std::invalid_argument("scan length must be positive");

    Rng rng(seed);
    const double phase = config_.phase_range_mm * uniform01(rng);
    double force = condition.force;
    if (config_.force_jitter > 0.0) {
        force *= std::max(0.05, 1.0 + config_.force_jitter * standard_normal(rng));
    }

    const std::size_t n = condition.n_samples();
    const auto window = static_cast<std::size_t>(
        std::max(1.0, std::round(config_.typeii_window_ms * kSampleRate / 1000.0)));
    const std::size_t history = window - 1;

    // Relief-driven pressure per column (rows see identical ridges), including
    // the samples before t = 0 that feed the bottom layer's temporal box.
    std::vector<std::array<double, 3>> pressure(n + history);
    for (std::size_t k = 0; k < pressure.size(); ++k) {
        const double t = (static_cast<double>(k) - static_cast<double>(history)) / kSampleRate;
        const double x = phase + condition.speed * t;
        for (int col = 0; col < 3; ++col) {
            pressure[k][col] = config_.contact_level +
                               config_.height_gain * texture_profile(spec, x + col * kTaxelPitchMm);
        }
    }

    // Bottom layer: 3-taxel spatial box along the scan, then a trailing
    // temporal box of `window` samples.
    std::vector<std::array<double, 3>> deep(n);
    std::array<double, 3> running{0.0, 0.0, 0.0};
    auto spatial = [&](std::size_t k, int col) {
        const int lo = std::max(0, col - 1);
        const int hi = std::min(2, col + 1);
        double acc = 0.0;
        for (int c = lo; c <= hi; ++c) acc += pressure[k][c];
        return acc / (hi - lo + 1);
    };
    for (std::size_t k = 0; k < pressure.size(); ++k) {
        for (int col = 0; col < 3; ++col) {
            running[col] += spatial(k, col);
            if (k >= window) running[col] -= spatial(k - window, col);
            if (k >= history) deep[k - history][col] = running[col] / static_cast<double>(window);
        }
    }

    std::array<double, kTaxelCount> gain{};
    for (int i = 0; i < kTaxelCount; ++i) gain[i] = kFullScale * force_gain(i, force);

    SensorTrace trace;
    trace.n_samples = n;
    trace.condition = condition;
    trace.texture = spec.id;
    trace.samples.resize(n * kTaxelCount);
    const double noise = config_.noise_sigma * kFullScale;
    for (std::size_t t = 0; t < n; ++t) {
        for (int i = 0; i < kTaxelCount; ++i) {
            const int col = taxel_col(i);
            const double drive = taxel_layer(i) == 0 ? pressure[t + history][col] : deep[t][col];
            double value = baseline_[i] + gain[i] * drive;
            if (noise > 0.0) value += noise * standard_normal(rng);
            if (config_.quantize) value = std::clamp(std::round(value), 0.0, kFullScale);
            trace.samples[t * kTaxelCount + i] = value;
        }
    }
    return trace;
}

TaxelRange compute_range(std::span<const SensorTrace> traces, int channels) {
    TaxelRange range;
    range.min.assign(channels, std::numeric_limits<double>::infinity());
    range.max.assign(channels, -std::numeric_limits<double>::infinity());
    for (const auto& trace : traces) extend_range(range, trace);
    finalize_range(range);
    return range;
}

void extend_range(TaxelRange& range, const SensorTrace& trace) {
    const std::size_t channels = range.min.size();
    if (static_cast<std::size_t>(trace.channels) != channels) {
        throw std::invalid_argument("trace channel count does not match the range");
    }
    for (std::size_t t = 0; t < trace.n_samples; ++t) {
        for (std::size_t c = 0; c < channels; ++c) {
            const double v = trace.samples[t * channels + c];
            range.min[c] = std::min(range.min[c], v);
            range.max[c] = std::max(range.max[c], v);
        }
    }
}

void finalize_range(TaxelRange& range) {
    range.degenerate.assign(range.min.size(), false);
    for (std::size_t c = 0; c < range.min.size(); ++c) {
        range.degenerate[c] = !(range.max[c] > range.min[c]);
    }
}

void normalize_trace(SensorTrace& trace, const TaxelRange& range) {
    const std::size_t channels = range.min.size();
    if (static_cast<std::size_t>(trace.channels) != channels) {
        throw std::invalid_argument("trace channel count does not match the normalization range");
    }
    for (std::size_t t = 0; t < trace.n_samples; ++t) {
        for (std::size_t c = 0; c < channels; ++c) {
            double& v = trace.samples[t * channels + c];
            if (range.degenerate[c]) {
                v = 0.0;
            } else {
                v = std::clamp((v - range.min[c]) / (range.max[c] - range.min[c]), 0.0, 1.0);
            }
        }
    }
}

}  // namespace neurotac
