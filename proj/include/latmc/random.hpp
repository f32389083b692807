// SPDX-License-Identifier: Apache-2.0
//
// Counter-based random streams. Every trajectory owns a stream addressed by
// (master_seed, point_index, trajectory_index), so results do not depend on
// how trajectories are scheduled across threads.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "params.hpp"
#include "vec3.hpp"

namespace latmc {

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    [[nodiscard]] static constexpr Counter generate(Counter ctr, Key key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// Identifies one independent stream.
struct StreamId {
    std::uint64_t master_seed = 0;
    std::uint32_t point_index = 0;
    std::uint32_t trajectory_index = 0;

    friend constexpr bool operator==(const StreamId&, const StreamId&) = default;
};

/// Reserved point index for analysis-side randomness (bootstrap), far away
/// from any sweep index.
inline constexpr std::uint32_t kAnalysisPointIndex = 0xFFFFFFF0u;

/// Sequential view onto one counter-based stream. Distributions are written
/// out explicitly so that the variates are identical on every platform.
class RandomStream {
public:
    explicit RandomStream(StreamId id = {}) : id_(id) {}

    [[nodiscard]] const StreamId& id() const noexcept { return id_; }

    std::uint64_t next_u64() {
        if (used_ == 2) refill();
        return buffer_[used_++];
    }

    /// Uniform on (0, 1); never returns 0 or 1.
    double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    /// Standard normal by the Box-Muller transform; caches the second variate.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double radius = std::sqrt(-2.0 * std::log(uniform()));
        const double angle = 2.0 * kPi * uniform();
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    /// Unit-mean exponential variate.
    double exponential() { return -std::log(uniform()); }

    /// Uniformly distributed direction on the unit sphere.
    Vec3 unit_vector() {
        const double cos_polar = 2.0 * uniform() - 1.0;
        const double sin_polar = std::sqrt(std::max(0.0, 1.0 - cos_polar * cos_polar));
        const double azimuth = 2.0 * kPi * uniform();
        return {sin_polar * std::cos(azimuth), sin_polar * std::sin(azimuth), cos_polar};
    }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Lemire's multiply-shift with rejection, unbiased.
        std::uint64_t x = next_u64();
        __uint128_t m = static_cast<__uint128_t>(x) * n;
        auto low = static_cast<std::uint64_t>(m);
        if (low < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (low < threshold) {
                x = next_u64();
                m = static_cast<__uint128_t>(x) * n;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

private:
    void refill() {
        const Philox4x32::Counter ctr{static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                                      id_.trajectory_index, id_.point_index};
        const Philox4x32::Key key{static_cast<std::uint32_t>(id_.master_seed),
                                  static_cast<std::uint32_t>(id_.master_seed >> 32)};
        const auto out = Philox4x32::generate(ctr, key);
        buffer_[0] = (std::uint64_t{out[0]} << 32) | out[1];
        buffer_[1] = (std::uint64_t{out[2]} << 32) | out[3];
        ++block_;
        used_ = 0;
    }

    StreamId id_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int used_ = 2;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace latmc
