#include <neurotac/speed_warp.hpp>

#include <stdexcept>
#include <string>

namespace neurotac {

SpikeTrain warp_offline(const SpikeTrain& train, double speed, const WarpConfig& config) {
    if (!(speed > 0.0)) throw std::invalid_argument("warp speed must be positive");
    if (!(config.reference_speed > 0.0)) throw std::invalid_argument("reference speed must be positive");
    const double factor = speed / config.reference_speed;
    SpikeTrain out;
    out.duration = train.duration * factor;
    out.times.reserve(train.times.size());
    for (double t : train.times) out.times.push_back(t * factor);
    return out;
}

BatchWarp warp_stream_batch(const StreamWarpState& state, std::span<const double> spikes,
                            double velocity, const WarpConfig& config, double batch_length) {
    if (!(velocity >= 0.0)) throw std::invalid_argument("velocity must be non-negative");
    if (!(config.reference_speed > 0.0)) throw std::invalid_argument("reference speed must be positive");
    const double length = batch_length < 0.0 ? config.batch_period : batch_length;
    if (!(length >= 0.0)) throw std::invalid_argument("batch length must be non-negative");

    const double factor = velocity / config.reference_speed;
    const double begin = state.real_clock;
    const double end = begin + length;
    constexpr double slack = 1e-9;

    BatchWarp out;
    out.state = state;
    out.scaled_begin = state.scaled_clock;
    out.scaled.reserve(spikes.size());
    double prev = state.has_spike ? state.last_real_spike : 0.0;
    for (std::size_t i = 0; i < spikes.size(); ++i) {
        const double t = spikes[i];
        if (t < begin - slack || t > end + slack) {
            throw std::invalid_argument("spike at " + std::to_string(t) + " s lies outside the batch");
        }
        if ((out.state.has_spike || i > 0) && !(t > prev)) {
            throw std::invalid_argument("spike times out of order at batch index " + std::to_string(i));
        }
        const double anchor = out.state.has_spike ? out.state.last_scaled_spike : 0.0;
        const double scaled = anchor + (t - prev) * factor;
        out.scaled.push_back(scaled);
        out.state.last_real_spike = t;
        out.state.last_scaled_spike = scaled;
        out.state.has_spike = true;
        prev = t;
    }
    out.state.real_clock = end;
    out.state.scaled_clock = state.scaled_clock + length * factor;
    out.scaled_end = out.state.scaled_clock;
    out.frozen = velocity == 0.0;
    return out;
}

}  // namespace neurotac
