#include "supersde/rng.hpp"

#include <cmath>

namespace supersde {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& c, std::uint32_t k0,
                         std::uint32_t k1) {
    const std::uint64_t p0 = std::uint64_t(kPhiloxM0) * c[0];
    const std::uint64_t p1 = std::uint64_t(kPhiloxM1) * c[2];
    const std::uint32_t hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
    const std::uint32_t hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
    c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
}

}  // namespace

std::array<std::uint32_t, 4> Philox::block(std::uint64_t key,
                                           std::uint64_t ctr_hi,
                                           std::uint64_t ctr_lo) {
    std::array<std::uint32_t, 4> c = {
        std::uint32_t(ctr_lo), std::uint32_t(ctr_lo >> 32),
        std::uint32_t(ctr_hi), std::uint32_t(ctr_hi >> 32)};
    std::uint32_t k0 = std::uint32_t(key);
    std::uint32_t k1 = std::uint32_t(key >> 32);
    for (int r = 0; r < 10; ++r) {
        philox_round(c, k0, k1);
        k0 += kPhiloxW0;
        k1 += kPhiloxW1;
    }
    return c;
}

namespace {

inline std::uint64_t stream_key(std::uint64_t seed, RngStream stream) {
    // splitmix64 finaliser mixes the stream tag into the key
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(stream);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline double to_u01(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t x = (std::uint64_t(hi) << 32) | lo;
    // 53-bit mantissa, strictly in (0,1]
    return (double(x >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace

double uniform_u01(std::uint64_t seed, RngStream stream, std::uint64_t id,
                   std::uint64_t draw) {
    const auto b = Philox::block(stream_key(seed, stream), id, draw);
    return to_u01(b[0], b[1]);
}

std::array<double, 2> gauss_pair(std::uint64_t seed, RngStream stream,
                                 std::uint64_t id, std::uint64_t draw) {
    const auto b = Philox::block(stream_key(seed, stream), id, draw);
    const double u1 = to_u01(b[0], b[1]);
    const double u2 = to_u01(b[2], b[3]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * M_PI * u2;
    return {r * std::cos(t), r * std::sin(t)};
}

}  // namespace supersde
