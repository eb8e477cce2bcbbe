#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string_view>

#include "demobandit/errors.hpp"

namespace demobandit {

namespace detail {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

// SplitMix64 output function (Steele, Lea, Flood 2014).
inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

inline constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : s) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

}  // namespace detail

// Deterministic counter-based stream (SplitMix64). Identical seeds give
// identical draw sequences on every platform; streams are never shared
// across threads -- each task derives its own via derive_seed.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : seed_(seed), state_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() {
        state_ += detail::kGoldenGamma;
        return detail::mix64(state_);
    }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; the paired draw is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = open_unit();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(angle);
        has_spare_ = true;
        return r * std::cos(angle);
    }

    // Exponential with rate 1; strictly positive.
    double exponential() { return -std::log(open_unit()); }

    // Index draw from a probability vector (assumed normalized).
    std::size_t categorical(std::span<const double> probs) {
        if (probs.empty()) throw ConfigError("categorical: empty probability vector");
        const double u = uniform01();
        double cum = 0.0;
        for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
            cum += probs[i];
            if (u < cum) return i;
        }
        return probs.size() - 1;
    }

private:
    // Uniform on (0, 1): safe under log().
    double open_unit() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    std::uint64_t seed_;
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Child-stream seed: hash of (master_seed, index, purpose tag). Adding new
// purposes or agents never perturbs streams derived under other tags.
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index,
                                 std::string_view tag) {
    std::uint64_t h = detail::mix64(master_seed ^ detail::kGoldenGamma);
    h = detail::mix64(h ^ index) + detail::kGoldenGamma;
    h = detail::mix64(h ^ detail::fnv1a64(tag));
    return h;
}

inline RngStream derive_stream(std::uint64_t master_seed, std::uint64_t index,
                               std::string_view tag) {
    return RngStream(derive_seed(master_seed, index, tag));
}

}  // namespace demobandit
