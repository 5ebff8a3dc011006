#pragma once

#include <neurotac/drum_sim.hpp>

#include <iosfwd>
#include <span>
#include <vector>

namespace neurotac {

/// Izhikevich model constants plus the input gain k.
struct IzhikevichParams {
    double a = 0.02;
    double b = 0.2;
    double c = -65.0;
    double d = 6.0;
    double k = 1.0;
};

/// Tonic Spiking preset with the SA and RA input gains.
inline constexpr IzhikevichParams kTonicSa{0.02, 0.2, -65.0, 6.0, 100.0};
inline constexpr IzhikevichParams kTonicRa{0.02, 0.2, -65.0, 6.0, 3.0};

inline constexpr double kSpikeThreshold = 30.0;  ///< mV

struct NeuronState {
    double v = -65.0;
    double u = -13.0;

    static NeuronState resting(const IzhikevichParams& p) { return {p.c, p.b * p.c}; }
};

/// Strictly increasing spike times (s) plus the duration they were drawn from.
struct SpikeTrain {
    std::vector<double> times;
    double duration = 0.0;

    std::size_t size() const { return times.size(); }
    bool empty() const { return times.empty(); }
    bool operator==(const SpikeTrain&) const = default;
};

/// Checks 0 <= t0 < t1 < ... <= duration.
bool is_valid(const SpikeTrain& train);

/// One neuron advanced sample by sample.
///
/// Each sample period is integrated with forward Euler substeps; a substep
/// is at most 0.5 ms and is shortened so that v moves by at most 2 mV. v and
/// u advance together and the reset rule is applied as soon as v >= 30 mV,
/// so several resets can happen inside one sample at very large inputs. At
/// most one spike is reported per sample.
class IzhikevichNeuron {
public:
    explicit IzhikevichNeuron(const IzhikevichParams& params, double sample_rate = kSampleRate);

    /// Integrates one sample of input I (the gain k is applied here).
    /// Returns true if the neuron fired during the sample.
    bool step(double input);

    const NeuronState& state() const { return state_; }
    /// Largest pre-reset voltage of the last step that fired.
    double last_peak() const { return last_peak_; }
    /// Voltage right after the most recent reset.
    double last_reset_v() const { return last_reset_v_; }

private:
    IzhikevichParams params_;
    double dt_ms_;
    NeuronState state_;
    double last_peak_ = 0.0;
    double last_reset_v_ = 0.0;
};

struct Integration {
    std::vector<double> membrane;  ///< v per sample; the pre-reset peak on firing samples
    SpikeTrain train;
};

/// Runs a fresh neuron (v = c, u = b c) over a sampled input current.
/// Throws std::domain_error naming the first non-finite sample.
Integration integrate(const IzhikevichParams& params, std::span<const double> current,
                      double sample_rate = kSampleRate);

/// Spike train only, input multiplied by `scale` before the gain k.
SpikeTrain fire(const IzhikevichParams& params, std::span<const double> current, double scale = 1.0,
                double sample_rate = kSampleRate);

struct EncoderConfig {
    IzhikevichParams sa = kTonicSa;
    IzhikevichParams ra = kTonicRa;
    double lowpass_hz = 20.0;
    bool rectify_ra = false;  ///< use |derivative| instead of the signed one
    double sample_rate = kSampleRate;
};

/// Second-order Butterworth section from the bilinear transform
/// (transposed direct form II).
class Biquad {
public:
    static Biquad lowpass(double cutoff_hz, double sample_rate);

    /// Sets the internal state to the steady state of a constant input.
    void prime(double x);
    double process(double x);

    double b0 = 0, b1 = 0, b2 = 0, a1 = 0, a2 = 0;

private:
    double z1_ = 0, z2_ = 0;
};

/// Input current of the RA neuron before the gain: the lowpassed channel
/// differentiated per second (first difference times the sample rate).
std::vector<double> ra_drive(std::span<const double> channel, const EncoderConfig& config = {});

SpikeTrain encode_sa(std::span<const double> channel, double coeff, const EncoderConfig& config = {});
SpikeTrain encode_ra(std::span<const double> channel, const EncoderConfig& config = {});

/// Spikes per second over the whole train.
double spike_rate(const SpikeTrain& train);

/// SA trains for taxels 1-18 followed by RA trains for taxels 1-18.
std::vector<SpikeTrain> encode_trial(const SensorTrace& trace, std::span<const double> sa_coeffs,
                                     const EncoderConfig& config = {});

/// One line per train: duration then spike times, seconds with 3 decimals.
void write_spike_trains(std::ostream& out, std::span<const SpikeTrain> trains);
std::vector<SpikeTrain> read_spike_trains(std::istream& in);

}  // namespace neurotac
