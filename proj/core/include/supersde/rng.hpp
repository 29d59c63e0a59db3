#pragma once

#include <array>
#include <cstdint>

namespace supersde {

/// Counter-based RNG (Philox4x32-10). A draw is a pure function of
/// (key, counter), so any consumer can reproduce any value without shared
/// state. This is what makes the common-random-numbers contract exact:
/// the Brownian increment at (path, step) is identical across drifts and
/// mollification levels under the same seed, regardless of scheduling.
struct Philox {
    static std::array<std::uint32_t, 4> block(std::uint64_t key,
                                              std::uint64_t ctr_hi,
                                              std::uint64_t ctr_lo);
};

/// Independent named substreams keyed off one 64-bit seed.
enum class RngStream : std::uint64_t {
    Brownian = 1,
    InitialCondition = 2,
    Synthesis = 3,
    Scrambler = 4,
};

/// Uniform in (0,1]; pure function of its arguments.
double uniform_u01(std::uint64_t seed, RngStream stream, std::uint64_t id,
                   std::uint64_t draw);

/// Standard Gaussian pair via Box-Muller; pure function of its arguments.
/// `id` is typically a path or mode index and `draw` a step/pair counter.
std::array<double, 2> gauss_pair(std::uint64_t seed, RngStream stream,
                                 std::uint64_t id, std::uint64_t draw);

}  // namespace supersde
