#pragma once

#include "predmdp/types.hpp"

#include <cstdint>
#include <string_view>

namespace predmdp {

/// splitmix64 step; the standard 64-bit finalizer used for seed derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives an independent sub-seed from a master seed and a purpose tag.
/// The same (master, tag, index) always yields the same sub-seed, so
/// module-level parallelism never changes results.
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t index = 0);

/// Deterministic 64-bit generator (xoshiro256**). Self-contained so that
/// streams are reproducible independent of the standard library's
/// distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    /// Uniform double in [0, 1).
    double uniform();

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi);

    /// Standard normal via Box-Muller (one cached value).
    double normal();

    /// Gamma(shape, 1) via Marsaglia-Tsang; shape > 0.
    double gamma(double shape);

    /// Index drawn from the categorical distribution given by `probs`
    /// (assumed non-negative, summing to ~1).
    Index categorical(const Vec& probs);

    /// Row drawn uniformly from the probability simplex of dimension n
    /// (normalized Exp(1) coordinates, equivalently Dirichlet(1,...,1)).
    Vec simplex(Index n);

    /// Dirichlet draw with the given concentration vector (entries > 0).
    Vec dirichlet(const Vec& alpha);

private:
    std::uint64_t s_[4];
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

}  // namespace predmdp
