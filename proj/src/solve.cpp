#include "predmdp/solve.hpp"

#include "predmdp/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace predmdp {

Vec bellman_apply(const TabularMdp& mdp, const Vec& v) {
    if (v.size() != mdp.num_states) throw std::invalid_argument("value vector has wrong length");
    Vec out(mdp.num_states);
    for (Index s = 0; s < mdp.num_states; ++s) {
        double best = -std::numeric_limits<double>::infinity();
        for (Index a = 0; a < mdp.num_actions; ++a) {
            if (!mdp.is_feasible(s, a)) continue;
            const double q = mdp.reward(s, a) + mdp.discount * mdp.transition_row(s, a).dot(v);
            if (q > best) best = q;
        }
        out[s] = best;
    }
    return out;
}

ValueIterationResult classical_value_iteration(const TabularMdp& mdp, double tol, int max_iters) {
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
    const double gamma = mdp.discount;
    const double stop = tol * (1.0 - gamma) / gamma;

    ValueIterationResult result;
    Vec v = Vec::Zero(mdp.num_states);
    for (int it = 1; it <= max_iters; ++it) {
        Vec next = bellman_apply(mdp, v);
        const double change = (next - v).cwiseAbs().maxCoeff();
        v = std::move(next);
        if (change <= stop) {
            result.values = v;
            result.converged = true;
            result.iterations = it;
            result.residual = change * gamma / (1.0 - gamma);
            return result;
        }
    }
    result.values = v;
    result.converged = false;
    result.iterations = max_iters;
    result.residual = std::numeric_limits<double>::infinity();
    return result;
}

PolicyTable greedy_policy(const TabularMdp& mdp, const Vec& v) {
    if (v.size() != mdp.num_states) throw std::invalid_argument("value vector has wrong length");
    PolicyTable policy;
    policy.actions = IntVec(mdp.num_states);
    for (Index s = 0; s < mdp.num_states; ++s) {
        double best = -std::numeric_limits<double>::infinity();
        Index best_a = -1;
        for (Index a = 0; a < mdp.num_actions; ++a) {
            if (!mdp.is_feasible(s, a)) continue;
            const double q = mdp.reward(s, a) + mdp.discount * mdp.transition_row(s, a).dot(v);
            if (q > best) {
                best = q;
                best_a = a;
            }
        }
        if (best_a < 0) throw std::invalid_argument("state has no feasible action");
        policy.actions[s] = static_cast<int>(best_a);
    }
    return policy;
}

RolloutStats rollout_return(const TabularMdp& mdp, const PolicyTable& policy, Index s0,
                            int horizon, int episodes, std::uint64_t seed) {
    if (horizon < 1 || episodes < 1)
        throw std::invalid_argument("horizon and episodes must be at least 1");

    Rng rng(derive_seed(seed, "rollout"));
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int e = 0; e < episodes; ++e) {
        Index s = s0;
        double ret = 0.0;
        double disc = 1.0;
        for (int t = 0; t < horizon; ++t) {
            Index a;
            if (policy.is_deterministic()) {
                a = policy.actions[s];
            } else {
                a = rng.categorical(policy.distribution.row(s).transpose());
            }
            ret += disc * mdp.reward(s, a);
            disc *= mdp.discount;
            s = rng.categorical(mdp.transition_row(s, a).transpose());
        }
        sum += ret;
        sum_sq += ret * ret;
    }
    RolloutStats stats;
    stats.episodes = episodes;
    stats.mean = sum / episodes;
    if (episodes > 1) {
        const double var = (sum_sq - sum * sum / episodes) / (episodes - 1);
        stats.std_error = std::sqrt(std::max(0.0, var) / episodes);
    }
    return stats;
}

}  // namespace predmdp
