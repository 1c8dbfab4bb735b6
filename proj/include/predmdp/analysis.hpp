#pragma once

#include "predmdp/bayes.hpp"

#include <cstdint>

namespace predmdp {

/// Monte-Carlo estimate of the k-step truncated offline value: the value
/// attainable with exact knowledge of the next k transition realizations.
struct OfflineEstimate {
    Vec v_off;
    Vec std_error;
    int k = 0;
    int realizations = 0;
};

/**
 * Draws full one-hot realizations over every (s,a) pair for k steps; each
 * realization makes the k-horizon environment deterministic, so the inner
 * maximization is solved exactly by backward dynamic programming with a
 * zero terminal. Reports the per-state mean and standard error across
 * realizations.
 */
OfflineEstimate offline_oracle_value(const TabularMdp& mdp, int k, int realizations,
                                     std::uint64_t seed);

/// Gap between the truncated offline oracle and the classical optimum.
struct GapReport {
    Vec v_off;
    Vec v_mdp;
    Vec delta;       // v_off - v_mdp entrywise
    Vec mc_stderr;   // per-state standard error of v_off
    double truncation_bound = 0.0;  // gamma^k / (1-gamma)
    int k_used = 0;
    int realizations_used = 0;
};

GapReport bellman_jensen_gap(const TabularMdp& mdp, int k, int realizations, double tol,
                             std::uint64_t seed);

/// User-supplied constants for the three-term performance bound.
struct BoundParams {
    double c1 = 1.0;
    double c2 = 1.0;
    double theta_max_sq = 0.0;  // <= 0 means the default 1/(1-gamma)^2
    Vec eps_per_step;           // (eps_1..eps_K), entries in [0,1]
    int tail_truncation = 200;
};

struct BoundReport {
    double a1 = 0.0;  // finite prediction window
    double a2 = 0.0;  // prediction error
    double a3 = 0.0;  // partial action predictability
    double total = 0.0;
    double a3_tail_remainder = 0.0;  // reported bound on the truncated tail
};

/**
 * Evaluates the three bound terms:
 *   a1 = c1 gamma^K sqrt(K log|A|) / ((1-gamma)^{6/5} (1-gamma^{2K}))
 *   a2 = sum_j gamma^j eps_j / ((1-gamma)(1-gamma^K))
 *   a3 = c2 sum_{t=1..T} gamma^t sqrt(log(|A|^{t+1} - |A-|^{t+1} + 1) theta^2)
 * Full coverage makes a3 vanish exactly. The a3 tail past T is reported as
 * gamma^{T+1}/(1-gamma) sqrt(log|A| theta^2 (T+2)).
 */
BoundReport evaluate_bound(const BoundParams& params, double gamma, int horizon,
                           Index num_actions, Index num_predictable);

/// Mean and per-state Bayesian values across prediction horizons, with the
/// classical and offline-oracle references and the extreme-state traces.
struct HorizonSweepResult {
    std::vector<int> horizons;
    Mat v_bayes;        // one row per horizon, |S| columns
    Vec mean_v_bayes;   // per horizon
    Vec v_mdp;
    OfflineEstimate v_off;
    Index argmin_state = 0;  // lowest classical value
    Index argmax_state = 0;  // highest classical value
};

struct HorizonSweepConfig {
    std::vector<int> horizons;
    int scenarios_per_horizon = 500;
    int off_k = 25;
    int off_realizations = 500;
    double tol = 1e-8;
    PlanOptions plan;
};

/// Builds accurate full-coverage scenario sets per horizon and solves the
/// Bayesian fixed point for each.
HorizonSweepResult horizon_sweep(const TabularMdp& mdp, const HorizonSweepConfig& config,
                                 std::uint64_t seed);

}  // namespace predmdp
