#include <neurotac/spike_codec.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace neurotac {

namespace {

constexpr double kMaxSubstepMs = 0.5;
constexpr double kMaxDeltaV = 1.5;
constexpr double kMinSubstepMs = 1e-4;

void check_finite(std::span<const double> current) {
    for (std::size_t i = 0; i < current.size(); ++i) {
        if (!std::isfinite(current[i])) {
            throw std::domain_error("non-finite input current at sample " + std::to_string(i));
        }
    }
}

}  // namespace

bool is_valid(const SpikeTrain& train) {
    if (!(train.duration >= 0.0)) return false;
    double prev = -std::numeric_limits<double>::infinity();
    for (double t : train.times) {
        if (!(t >= 0.0) || !(t > prev) || t > train.duration) return false;
        prev = t;
    }
    return true;
}

IzhikevichNeuron::IzhikevichNeuron(const IzhikevichParams& params, double sample_rate)
    : params_(params), dt_ms_(1000.0 / sample_rate), state_(NeuronState::resting(params)) {
    if (!(sample_rate > 0.0)) throw std::invalid_argument("sample rate must be positive");
}

bool IzhikevichNeuron::step(double input) {
    const double drive = params_.k * input;
    const double a = params_.a;
    const double b = params_.b;
    double v = state_.v;
    double u = state_.u;
    double remaining = dt_ms_;
    bool fired = false;
    double peak = -std::numeric_limits<double>::infinity();
    while (remaining > 0.0) {
        const double dv = 0.04 * v * v + 5.0 * v + 140.0 - u + drive;
        const double du = a * (b * v - u);
        double h = std::min(remaining, kMaxSubstepMs);
        const double mag = std::abs(dv);
        if (mag * h > kMaxDeltaV) h = std::max(kMaxDeltaV / mag, std::min(remaining, kMinSubstepMs));
        v += h * dv;
        u += h * du;
        remaining = h >= remaining ? 0.0 : remaining - h;
        if (v >= kSpikeThreshold) {
            fired = true;
            peak = std::max(peak, v);
            v = params_.c;
            u += params_.d;
            last_reset_v_ = v;
        }
    }
    state_ = {v, u};
    if (fired) last_peak_ = peak;
    return fired;
}

Integration integrate(const IzhikevichParams& params, std::span<const double> current,
                      double sample_rate) {
    check_finite(current);
    IzhikevichNeuron neuron(params, sample_rate);
    Integration out;
    out.membrane.resize(current.size());
    out.train.duration = static_cast<double>(current.size()) / sample_rate;
    for (std::size_t i = 0; i < current.size(); ++i) {
        if (neuron.step(current[i])) {
            out.membrane[i] = neuron.last_peak();
            out.train.times.push_back(static_cast<double>(i) / sample_rate);
        } else {
            out.membrane[i] = neuron.state().v;
        }
    }
    return out;
}

SpikeTrain fire(const IzhikevichParams& params, std::span<const double> current, double scale,
                double sample_rate) {
    check_finite(current);
    IzhikevichNeuron neuron(params, sample_rate);
    SpikeTrain train;
    train.duration = static_cast<double>(current.size()) / sample_rate;
    for (std::size_t i = 0; i < current.size(); ++i) {
        if (neuron.step(scale * current[i])) train.times.push_back(static_cast<double>(i) / sample_rate);
    }
    return train;
}

Biquad Biquad::lowpass(double cutoff_hz, double sample_rate) {
    if (!(cutoff_hz > 0.0) || !(cutoff_hz < 0.5 * sample_rate)) {
        throw std::invalid_argument("lowpass cutoff must lie in (0, Nyquist)");
    }
    const double w0 = 2.0 * std::numbers::pi * cutoff_hz / sample_rate;
    const double alpha = std::sin(w0) / std::numbers::sqrt2;  // Q = 1/sqrt(2)
    const double cw = std::cos(w0);
    const double a0 = 1.0 + alpha;
    Biquad f;
    f.b0 = 0.5 * (1.0 - cw) / a0;
    f.b1 = (1.0 - cw) / a0;
    f.b2 = f.b0;
    f.a1 = -2.0 * cw / a0;
    f.a2 = (1.0 - alpha) / a0;
    return f;
}

void Biquad::prime(double x) {
    // unity DC gain: y = x at steady state
    z2_ = (b2 - a2) * x;
    z1_ = (b1 - a1) * x + z2_;
}

double Biquad::process(double x) {
    const double y = b0 * x + z1_;
    z1_ = b1 * x - a1 * y + z2_;
    z2_ = b2 * x - a2 * y;
    return y;
}

std::vector<double> ra_drive(std::span<const double> channel, const EncoderConfig& config) {
    std::vector<double> out(channel.size(), 0.0);
    if (channel.empty()) return out;
    check_finite(channel);
    Biquad filter = Biquad::lowpass(config.lowpass_hz, config.sample_rate);
    filter.prime(channel[0]);
    double prev = filter.process(channel[0]);
    for (std::size_t i = 1; i < channel.size(); ++i) {
        const double y = filter.process(channel[i]);
        const double d = (y - prev) * config.sample_rate;
        out[i] = config.rectify_ra ? std::abs(d) : d;
        prev = y;
    }
    return out;
}

SpikeTrain encode_sa(std::span<const double> channel, double coeff, const EncoderConfig& config) {
    if (!(coeff > 0.0) || !std::isfinite(coeff)) {
        throw std::invalid_argument("SA scaling coefficient must be positive");
    }
    return fire(config.sa, channel, coeff, config.sample_rate);
}

SpikeTrain encode_ra(std::span<const double> channel, const EncoderConfig& config) {
    const std::vector<double> drive = ra_drive(channel, config);
    return fire(config.ra, drive, 1.0, config.sample_rate);
}

double spike_rate(const SpikeTrain& train) {
    if (!(train.duration > 0.0)) throw std::invalid_argument("spike rate needs a positive duration");
    return static_cast<double>(train.times.size()) / train.duration;
}

std::vector<SpikeTrain> encode_trial(const SensorTrace& trace, std::span<const double> sa_coeffs,
                                     const EncoderConfig& config) {
    if (trace.channels != kTaxelCount) {
        throw std::invalid_argument("encode_trial expects 18 channels, got " +
                                    std::to_string(trace.channels));
    }
    if (sa_coeffs.size() != static_cast<std::size_t>(kTaxelCount)) {
        throw std::invalid_argument("encode_trial expects 18 coefficients, got " +
                                    std::to_string(sa_coeffs.size()));
    }
    std::vector<SpikeTrain> out(2 * kTaxelCount);
    for (int i = 0; i < kTaxelCount; ++i) {
        const std::vector<double> ch = trace.channel(i);
        out[i] = encode_sa(ch, sa_coeffs[i], config);
        out[kTaxelCount + i] = encode_ra(ch, config);
    }
    return out;
}

void write_spike_trains(std::ostream& out, std::span<const SpikeTrain> trains) {
    char buf[32];
    for (const auto& train : trains) {
        std::snprintf(buf, sizeof buf, "%.3f", train.duration);
        out << buf;
        for (double t : train.times) {
            std::snprintf(buf, sizeof buf, " %.3f", t);
            out << buf;
        }
        out << '\n';
    }
}

std::vector<SpikeTrain> read_spike_trains(std::istream& in) {
    std::vector<SpikeTrain> trains;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream fields(line);
        SpikeTrain train;
        if (!(fields >> train.duration)) throw std::invalid_argument("spike train line lacks a duration");
        double t;
        while (fields >> t) train.times.push_back(t);
        if (!fields.eof()) throw std::invalid_argument("malformed spike time in: " + line);
        trains.push_back(std::move(train));
    }
    return trains;
}

}  // namespace neurotac
