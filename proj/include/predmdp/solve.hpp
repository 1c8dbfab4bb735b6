#pragma once

#include "predmdp/mdp.hpp"

#include <cstdint>

namespace predmdp {

/// Deterministic action per state, or a per-state distribution when
/// `distribution` is non-empty (rows sum to 1).
struct PolicyTable {
    IntVec actions;    // length |S|
    Mat distribution;  // |S| x |A| or empty

    bool is_deterministic() const { return distribution.size() == 0; }
};

struct ValueIterationResult {
    Vec values;
    bool converged = false;
    int iterations = 0;
    /// Guaranteed sup-norm distance to the fixed point when converged.
    double residual = 0.0;
};

/// One synchronous sweep of the Bellman optimality operator.
Vec bellman_apply(const TabularMdp& mdp, const Vec& v);

/**
 * Classical value iteration. Stops when the sup-norm change of successive
 * iterates falls below tol*(1-gamma)/gamma, which guarantees the returned
 * iterate is within tol of the fixed point. Non-convergence within
 * max_iters is reported through the result, never silently truncated.
 */
ValueIterationResult classical_value_iteration(const TabularMdp& mdp, double tol,
                                               int max_iters = 100000);

/// Greedy policy w.r.t. r(s,a) + gamma * P(.|s,a) v; ties broken by the
/// lowest action index. Masked actions are skipped.
PolicyTable greedy_policy(const TabularMdp& mdp, const Vec& v);

struct RolloutStats {
    double mean = 0.0;
    double std_error = 0.0;
    int episodes = 0;
};

/// Mean discounted return of seeded Monte-Carlo episodes of the given
/// horizon, with the standard error across episodes.
RolloutStats rollout_return(const TabularMdp& mdp, const PolicyTable& policy, Index s0,
                            int horizon, int episodes, std::uint64_t seed);

}  // namespace predmdp
