#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace lrrl {

using Rng = std::mt19937_64;

// Uniform double in [0, 1) built from the top 53 bits, so results do not
// depend on the standard library's distribution implementations.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Uniform index in [0, n). n must be positive.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)) % n;
}

// Independent stream derived from a run seed and a stream tag.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), 0x9e3779b9u};
    return Rng(seq);
}

}  // namespace lrrl
