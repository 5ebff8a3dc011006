#pragma once

#include <neurotac/spike_codec.hpp>

#include <span>
#include <vector>

namespace neurotac {

struct WarpConfig {
    double reference_speed = 120.0;  ///< mm/s
    double batch_period = 0.1;       ///< s, streaming only

    static WarpConfig offline() { return {120.0, 0.1}; }
    static WarpConfig streaming() { return {100.0, 0.1}; }
};

/// Constant-speed warp: every spike time and the duration are multiplied by
/// speed / reference_speed.
SpikeTrain warp_offline(const SpikeTrain& train, double speed, const WarpConfig& config = {});

/// Per-stream bookkeeping of the incremental warp. Scaled time 0 is anchored
/// at scan start.
struct StreamWarpState {
    double scaled_clock = 0.0;       ///< scaled time at the end of the last batch
    double last_real_spike = 0.0;
    double last_scaled_spike = 0.0;
    double real_clock = 0.0;         ///< real time at the end of the last batch
    bool has_spike = false;
};

struct BatchWarp {
    std::vector<double> scaled;  ///< scaled times of this batch's spikes
    StreamWarpState state;       ///< state after the batch
    double scaled_begin = 0.0;   ///< scaled interval covered by the batch
    double scaled_end = 0.0;
    bool frozen = false;         ///< velocity was zero; the scaled clock did not move
};

/// Warps one batch of real-time spikes.
///
/// Each inter-spike gap, including the gap back to the previous emitted
/// spike (or scan start), is multiplied by velocity / reference_speed of the
/// batch holding the later spike. `batch_length` defaults to the configured
/// batch period; the last batch of a scan may be shorter.
BatchWarp warp_stream_batch(const StreamWarpState& state, std::span<const double> spikes,
                            double velocity, const WarpConfig& config = WarpConfig::streaming(),
                            double batch_length = -1.0);

}  // namespace neurotac
