#pragma once

// Counter-based random number generation (Philox4x32-10).
//
// Every consumer of randomness owns an RngStream identified by a 64-bit key
// (derived from the master seed and a path of stream ids) plus a 128-bit
// counter. Streams derived from distinct paths are independent, so parallel
// workers produce identical results regardless of scheduling.
//
// Salmon et al., "Parallel random numbers: as easy as 1, 2, 3", SC 2011.

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace longmix {

namespace detail {

inline void philox_round(std::array<std::uint32_t, 4>& ctr,
                         std::array<std::uint32_t, 2>& key) {
    constexpr std::uint32_t m0 = 0xD2511F53u;
    constexpr std::uint32_t m1 = 0xCD9E8D57u;
    const std::uint64_t p0 = static_cast<std::uint64_t>(m0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(m1) * ctr[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += 0x9E3779B9u;
    key[1] += 0xBB67AE85u;
}

inline std::array<std::uint32_t, 4> philox10(std::array<std::uint32_t, 4> ctr,
                                             std::array<std::uint32_t, 2> key) {
    for (int r = 0; r < 10; ++r) philox_round(ctr, key);
    return ctr;
}

// SplitMix64 finalizer; used to hash stream paths into Philox keys.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace detail

/// One independent random stream. Copyable; copies continue the sequence
/// from the copied state.
class RngStream {
public:
    explicit RngStream(std::uint64_t key = 0) : key_(key) {}

    /// Derive a child stream. The child's sequence is independent of the
    /// parent's and of any sibling derived with a different id path.
    RngStream child(std::uint64_t id) const {
        return RngStream(detail::mix64(key_ ^ detail::mix64(id)));
    }
    RngStream child(std::initializer_list<std::uint64_t> ids) const {
        RngStream s = *this;
        for (auto id : ids) s = s.child(id);
        return s;
    }

    std::uint64_t next_u64() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const std::array<std::uint32_t, 4> out = detail::philox10(
            {static_cast<std::uint32_t>(counter_),
             static_cast<std::uint32_t>(counter_ >> 32), 0u, 0u},
            {static_cast<std::uint32_t>(key_),
             static_cast<std::uint32_t>(key_ >> 32)});
        ++counter_;
        spare_ = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
        have_spare_ = true;
        return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform on [a, b).
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Standard normal via Box-Muller (both variates consumed, one returned).
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(6.283185307179586476925286766559 * u2);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    /// Normal truncated to [lo, hi] by rejection.
    double truncated_normal(double mean, double sd, double lo, double hi) {
        for (;;) {
            const double x = normal(mean, sd);
            if (x >= lo && x <= hi) return x;
        }
    }

    bool bernoulli(double p) { return uniform() < p; }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Rejection to avoid modulo bias.
        const std::uint64_t limit = n * (~std::uint64_t{0} / n);
        for (;;) {
            const std::uint64_t x = next_u64();
            if (x < limit) return x % n;
        }
    }

private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
    std::uint64_t spare_ = 0;
    bool have_spare_ = false;
};

/// Root stream for a run; all other streams derive from it.
inline RngStream master_stream(std::uint64_t seed) {
    return RngStream(detail::mix64(seed));
}

}  // namespace longmix
