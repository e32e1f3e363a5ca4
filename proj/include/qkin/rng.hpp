#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace qkin {

// Counter-based Philox4x32-10 generator. Draws are pure functions of
// (seed, id0, id1), so any partitioning of work across threads or processes
// reproduces identical streams.
namespace philox {

inline std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                          std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(M0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(M1) * ctr[2];
        const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
        const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += W0;
        key[1] += W1;
    }
    return ctr;
}

}  // namespace philox

class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    // Two independent uniforms in (0, 1), 53-bit resolution.
    std::pair<double, double> uniform_pair(std::uint64_t id0, std::uint64_t id1) const {
        const auto out = philox::block(
            {static_cast<std::uint32_t>(id0), static_cast<std::uint32_t>(id0 >> 32),
             static_cast<std::uint32_t>(id1), static_cast<std::uint32_t>(id1 >> 32)},
            {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
        const std::uint64_t a = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
        const std::uint64_t b = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
        constexpr double scale = 1.0 / 9007199254740992.0;  // 2^-53
        return {((a >> 11) + 0.5) * scale, ((b >> 11) + 0.5) * scale};
    }

    // Two independent standard normals (Box-Muller).
    std::pair<double, double> normal_pair(std::uint64_t id0, std::uint64_t id1) const {
        const auto [u1, u2] = uniform_pair(id0, id1);
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        return {radius * std::cos(angle), radius * std::sin(angle)};
    }

    double normal(std::uint64_t id0, std::uint64_t id1) const {
        return normal_pair(id0, id1).first;
    }

    double uniform(std::uint64_t id0, std::uint64_t id1) const {
        return uniform_pair(id0, id1).first;
    }

  private:
    std::uint64_t seed_;
};

}  // namespace qkin
