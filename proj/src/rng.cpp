#include "predmdp/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace predmdp {

namespace {

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t index) {
    std::uint64_t state = master ^ fnv1a64(tag);
    splitmix64(state);
    state ^= 0x632be59bd9b4e019ULL + index * 0x9e3779b97f4a7c15ULL;
    return splitmix64(state);
}

Rng::Rng(std::uint64_t seed) {
    // Expand the seed into four non-zero words.
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    cached_normal_ = r * std::sin(theta);
    has_cached_normal_ = true;
    return r * std::cos(theta);
}

double Rng::gamma(double shape) {
    if (shape <= 0.0) throw std::invalid_argument("gamma shape must be positive");
    if (shape < 1.0) {
        // Boost to shape+1 and scale back (Marsaglia-Tsang trick).
        const double u = uniform();
        return gamma(shape + 1.0) * std::pow(u > 0 ? u : 1e-300, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x;
        double v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (u > 0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

Index Rng::categorical(const Vec& probs) {
    const double u = uniform() * probs.sum();
    double acc = 0.0;
    for (Index i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return i;
    }
    return probs.size() - 1;
}

Vec Rng::simplex(Index n) {
    Vec out(n);
    for (Index i = 0; i < n; ++i) {
        double u = uniform();
        while (u <= 0.0) u = uniform();
        out[i] = -std::log(u);
    }
    out /= out.sum();
    return out;
}

Vec Rng::dirichlet(const Vec& alpha) {
    Vec out(alpha.size());
    for (Index i = 0; i < alpha.size(); ++i) out[i] = gamma(alpha[i]);
    const double total = out.sum();
    if (total <= 0.0) {
        // All gammas underflowed; fall back to the mode of the concentration.
        Index imax;
        alpha.maxCoeff(&imax);
        out.setZero();
        out[imax] = 1.0;
        return out;
    }
    return out / total;
}

}  // namespace predmdp
