#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <utility>
#include <vector>

#include "vpforest/errors.hpp"

// Reproducibility layer. Everything here produces the same sequence on any
// conforming implementation: mt19937_64 construction and raw output are
// standard-specified, and the variates are derived from raw draws by fixed
// arithmetic rather than std::*_distribution (whose algorithms are not).

namespace vpforest {

/// One step of the splitmix64 generator; advances `state` and returns a
/// well-mixed 64-bit value.
constexpr std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Collapses an ordered list of components (base seed, tree index, grid cell
/// coordinates, ...) into one seed. Order-sensitive, avalanching, stateless.
inline std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = 0x8f1bbcdcbfa53e0bull;
    for (std::uint64_t part : parts) {
        std::uint64_t s = h ^ part;
        h = splitmix64_next(s);
    }
    return h;
}

/// Deterministic random source. Each instance owns an independent stream
/// selected by its seed; derive per-component streams with mix_seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi). Degenerate ranges collapse to lo.
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Exponential variate with the given rate; rate must be positive
    /// (callers model a zero rate as "the event never happens").
    double exponential(double rate) {
        if (!(rate > 0.0)) {
            throw Error("exponential rate must be positive");
        }
        return -std::log1p(-uniform01()) / rate;
    }

    /// Standard normal via the Box-Muller pair; the second value of each
    /// pair is served on the following call.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform01();  // (0, 1], keeps the log finite
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * pi_ * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    /// Uniform integer in [0, bound), unbiased via rejection from the top.
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) {
            throw Error("bound must be positive");
        }
        const std::uint64_t rem = (0 - bound) % bound;  // 2^64 mod bound
        std::uint64_t x = next_u64();
        while (x < rem) {
            x = next_u64();
        }
        return x % bound;
    }

private:
    static constexpr double pi_ = 3.141592653589793238462643383279502884;

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// In-place Fisher-Yates shuffle driven by `rng` (std::shuffle is not
/// reproducible across standard libraries).
template <typename T>
void shuffle(std::vector<T>& items, Rng& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::swap(items[i - 1], items[rng.below(i)]);
    }
}

}  // namespace vpforest
