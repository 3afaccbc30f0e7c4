#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "exitlab/point.hpp"

namespace exitlab {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
/// Stateless: the output is a pure function of (counter, key).
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr Counter apply(Counter ctr, Key key) noexcept {
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

/// Per-replica stream of uniforms and Gaussians.
///
/// The key is the 64-bit master seed and the upper counter words hold the
/// 64-bit stream id (typically the replica index), so stream i is the same
/// sequence no matter which thread, or in which order, replicas are run.
/// Each counter value yields two doubles and hence two Gaussians via Box-Muller.
class ReplicaRng {
public:
    ReplicaRng() = default;
    ReplicaRng(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream) {}

    std::uint64_t seed() const noexcept { return std::uint64_t{key_[0]} | (std::uint64_t{key_[1]} << 32); }
    std::uint64_t stream() const noexcept { return stream_; }
    std::uint64_t counter() const noexcept { return counter_; }

    /// Two 64-bit words from the next counter block.
    std::array<std::uint64_t, 2> next_block() noexcept {
        const Philox4x32::Counter ctr{static_cast<std::uint32_t>(counter_),
                                      static_cast<std::uint32_t>(counter_ >> 32),
                                      static_cast<std::uint32_t>(stream_),
                                      static_cast<std::uint32_t>(stream_ >> 32)};
        ++counter_;
        const auto out = Philox4x32::apply(ctr, key_);
        return {std::uint64_t{out[0]} | (std::uint64_t{out[1]} << 32),
                std::uint64_t{out[2]} | (std::uint64_t{out[3]} << 32)};
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept {
        if (have_uniform_) {
            have_uniform_ = false;
            return to_unit(spare_uniform_);
        }
        const auto words = next_block();
        spare_uniform_ = words[1];
        have_uniform_ = true;
        return to_unit(words[0]);
    }

    double normal() noexcept {
        if (have_normal_) {
            have_normal_ = false;
            return spare_normal_;
        }
        const auto words = next_block();
        // (0, 1] so the logarithm is finite.
        const double u1 = (static_cast<double>(words[0] >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = to_unit(words[1]);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_normal_ = r * std::sin(theta);
        have_normal_ = true;
        return r * std::cos(theta);
    }

    template <std::size_t Dim>
    Point<Dim> normal_vector() noexcept {
        Point<Dim> z{};
        for (auto& v : z) v = normal();
        return z;
    }

private:
    static double to_unit(std::uint64_t w) noexcept { return static_cast<double>(w >> 11) * 0x1.0p-53; }

    Philox4x32::Key key_{0, 0};
    std::uint64_t stream_ = 0;
    std::uint64_t counter_ = 0;
    std::uint64_t spare_uniform_ = 0;
    double spare_normal_ = 0.0;
    bool have_uniform_ = false;
    bool have_normal_ = false;
};

}  // namespace exitlab
