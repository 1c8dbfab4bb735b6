#pragma once

#include "predmdp/scenario.hpp"
#include "predmdp/solve.hpp"

#include <string>
#include <vector>

namespace predmdp {

struct PlanOptions {
    /// Hard cap on |A|^K enumeration; exceeding it raises EnumerationCapError.
    long long enumeration_cap = 1'000'000;
};

struct EnumerationCapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Committed K-step action sequence and its planning objective value
/// (discounted in-window rewards plus the discounted terminal value).
struct PlanResult {
    std::vector<Index> actions;
    double expected_return = 0.0;
};

struct BayesValueMeta {
    int horizon = 0;
    Index num_predictable = 0;
    std::string noise;
    double residual = 0.0;
    bool converged = false;
    int iterations = 0;
};

/// Per-state Bayesian value, the fixed point of the scenario-averaged
/// K-step Bellman operator.
struct BayesValueVector {
    Vec values;
    BayesValueMeta meta;
};

/// Distribution of the state after applying the action prefix under the
/// batch-conditioned dynamics; an empty prefix returns the point mass at s0.
Vec propagate(const TabularMdp& mdp, const PredictionBatch& batch, Index s0,
              const std::vector<Index>& actions);

/**
 * Exhaustive open-loop planner: enumerates all |A|^K action sequences,
 * scores each by the discounted in-window rewards plus gamma^K times the
 * expected terminal value, and returns the maximizer. Ties resolve to the
 * lexicographically smallest sequence. Sequences whose action is masked
 * somewhere on the support of the current state distribution are skipped.
 */
PlanResult plan_open_loop(const TabularMdp& mdp, const PredictionBatch& batch, Index s,
                          const Vec& terminal_values, const PlanOptions& opts = {});

/**
 * Backward dynamic program valid when the batch is an accurate realization
 * covering every action: the conditioned dynamics are then deterministic,
 * so the closed-loop DP value equals the open-loop optimum. Cost
 * O(K |S| |A|) instead of |A|^K.
 */
PlanResult dp_shortcut_plan(const TabularMdp& mdp, const PredictionBatch& batch, Index s,
                            const Vec& terminal_values);

/// Same backward DP, returning the plan value for every start state at once.
Vec dp_shortcut_values(const TabularMdp& mdp, const PredictionBatch& batch,
                       const Vec& terminal_values);

/// One application of the scenario-averaged Bayesian Bellman operator:
/// per state, the weighted average over scenarios of the open-loop
/// planning value against v. Pure function of its inputs.
Vec bayes_bellman_apply(const TabularMdp& mdp, const ScenarioSet& scenarios, const Vec& v,
                        const PlanOptions& opts = {});

/**
 * Fixed-point iteration of the Bayesian Bellman operator. The operator is
 * a gamma^K contraction, so stopping when successive iterates differ by at
 * most tol*(1-gamma^K)/gamma^K guarantees sup-norm distance tol to the
 * unique fixed point of the empirical operator.
 */
BayesValueVector bayes_value_iteration(const TabularMdp& mdp, const ScenarioSet& scenarios,
                                       double tol, int max_iters = 100000,
                                       const PlanOptions& opts = {});

}  // namespace predmdp
