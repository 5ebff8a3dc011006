#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace neurotac {

using Rng = std::mt19937_64;

/// Derives an independent stream seed from the master seed.
///
/// The tag names the consuming component ("trial", "sensor", "kfold", ...)
/// and the indices select one stream within it. Mixing is FNV-1a over the
/// tag followed by SplitMix64 rounds over each index, so the same
/// (master, tag, indices) always yields the same seed on every platform.
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                          std::initializer_list<std::uint64_t> indices = {});

inline Rng make_rng(std::uint64_t master, std::string_view tag,
                    std::initializer_list<std::uint64_t> indices = {}) {
    return Rng(derive_seed(master, tag, indices));
}

/// Fisher-Yates shuffle driven by raw engine output.
///
/// std::shuffle's use of the engine is implementation-defined; this keeps
/// experiment splits identical across standard libraries.
template <typename T>
void shuffle_in_place(T& items, Rng& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const std::size_t j = rng() % i;
        std::swap(items[i - 1], items[j]);
    }
}

/// Uniform double in [0, 1) from the top 53 bits of one engine draw.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace neurotac

namespace neurotac {

/// Standard normal draw (Box-Muller, cosine branch only).
inline double standard_normal(Rng& rng) {
    const double u1 = 1.0 - uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

}  // namespace neurotac
