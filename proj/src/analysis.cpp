#include "predmdp/analysis.hpp"

#include "predmdp/parallel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace predmdp {

namespace {

/// Per-realization deterministic DP value with zero terminal. The
/// realization is the successor table succ[t](s,a) for t = 0..k-1.
Vec realization_dp(const TabularMdp& mdp, const std::vector<IntVec>& successors) {
    const int k = static_cast<int>(successors.size());
    Vec w = Vec::Zero(mdp.num_states);
    for (int t = k - 1; t >= 0; --t) {
        Vec next(mdp.num_states);
        for (Index s = 0; s < mdp.num_states; ++s) {
            double best = -std::numeric_limits<double>::infinity();
            for (Index a = 0; a < mdp.num_actions; ++a) {
                if (!mdp.is_feasible(s, a)) continue;
                const Index arrival = successors[t][mdp.row(s, a)];
                const double q = mdp.reward(s, a) + mdp.discount * w[arrival];
                if (q > best) best = q;
            }
            next[s] = best;
        }
        w = std::move(next);
    }
    return w;
}

}  // namespace

OfflineEstimate offline_oracle_value(const TabularMdp& mdp, int k, int realizations,
                                     std::uint64_t seed) {
    if (k < 1) throw std::invalid_argument("k must be at least 1");
    if (realizations < 1) throw std::invalid_argument("realizations must be at least 1");
    require_valid(mdp);

    std::vector<Vec> values(realizations);
    parallel_for(static_cast<std::size_t>(realizations), [&](std::size_t i) {
        Rng rng(derive_seed(seed, "offline-realization", i));
        std::vector<IntVec> successors(k, IntVec(mdp.num_states * mdp.num_actions));
        for (int t = 0; t < k; ++t)
            for (Index s = 0; s < mdp.num_states; ++s)
                for (Index a = 0; a < mdp.num_actions; ++a)
                    successors[t][mdp.row(s, a)] =
                        static_cast<int>(rng.categorical(mdp.transition_row(s, a).transpose()));
        values[i] = realization_dp(mdp, successors);
    });

    OfflineEstimate est;
    est.k = k;
    est.realizations = realizations;
    est.v_off = Vec::Zero(mdp.num_states);
    for (const auto& v : values) est.v_off += v;
    est.v_off /= static_cast<double>(realizations);

    est.std_error = Vec::Zero(mdp.num_states);
    if (realizations > 1) {
        for (const auto& v : values)
            est.std_error += (v - est.v_off).array().square().matrix();
        est.std_error /= static_cast<double>(realizations - 1);
        est.std_error =
            (est.std_error / static_cast<double>(realizations)).array().sqrt().matrix();
    }
    return est;
}

GapReport bellman_jensen_gap(const TabularMdp& mdp, int k, int realizations, double tol,
                             std::uint64_t seed) {
    const OfflineEstimate off = offline_oracle_value(mdp, k, realizations, seed);
    const ValueIterationResult classical = classical_value_iteration(mdp, tol);
    if (!classical.converged)
        throw std::runtime_error("classical value iteration did not converge");

    GapReport report;
    report.v_off = off.v_off;
    report.v_mdp = classical.values;
    report.delta = off.v_off - classical.values;
    report.mc_stderr = off.std_error;
    report.truncation_bound = std::pow(mdp.discount, k) / (1.0 - mdp.discount);
    report.k_used = k;
    report.realizations_used = realizations;
    return report;
}

BoundReport evaluate_bound(const BoundParams& params, double gamma, int horizon,
                           Index num_actions, Index num_predictable) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0,1)");
    if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
    if (num_actions < 1) throw std::invalid_argument("need at least one action");
    if (num_predictable < 0 || num_predictable > num_actions)
        throw std::invalid_argument("predictable action count out of range");
    if (!(params.c1 > 0.0 && params.c2 > 0.0))
        throw std::invalid_argument("bound constants must be positive");
    if (params.eps_per_step.size() != horizon)
        throw std::invalid_argument("eps_per_step must have one entry per horizon step");
    if ((params.eps_per_step.array() < 0.0).any() || (params.eps_per_step.array() > 1.0).any())
        throw std::invalid_argument("eps entries must lie in [0,1]");
    if (params.tail_truncation < 1) throw std::invalid_argument("tail_truncation must be >= 1");

    const double theta_sq =
        params.theta_max_sq > 0.0 ? params.theta_max_sq : 1.0 / ((1.0 - gamma) * (1.0 - gamma));
    const double A = static_cast<double>(num_actions);
    const double Am = static_cast<double>(num_predictable);
    const double K = static_cast<double>(horizon);

    BoundReport report;
    report.a1 = params.c1 * std::pow(gamma, K) * std::sqrt(K * std::log(A)) /
                (std::pow(1.0 - gamma, 1.2) * (1.0 - std::pow(gamma, 2.0 * K)));

    double a2 = 0.0;
    for (int j = 1; j <= horizon; ++j)
        a2 += std::pow(gamma, j) * params.eps_per_step[j - 1];
    report.a2 = a2 / ((1.0 - gamma) * (1.0 - std::pow(gamma, K)));

    // log(A^{t+1} - Am^{t+1} + 1) evaluated in log space so large t cannot
    // overflow: (t+1) log A + log1p(A^{-(t+1)} - (Am/A)^{t+1}). Full
    // coverage makes every count 1, so a3 is exactly zero.
    const double ratio = Am / A;
    double a3 = 0.0;
    if (num_predictable < num_actions) {
        for (int t = 1; t <= params.tail_truncation; ++t) {
            const double tp1 = static_cast<double>(t + 1);
            const double log_count =
                tp1 * std::log(A) + std::log1p(std::pow(A, -tp1) - std::pow(ratio, tp1));
            a3 += std::pow(gamma, t) * std::sqrt(std::max(0.0, log_count) * theta_sq);
        }
    }
    report.a3 = params.c2 * a3;
    report.a3_tail_remainder =
        num_predictable == num_actions
            ? 0.0
            : params.c2 * std::pow(gamma, params.tail_truncation + 1) / (1.0 - gamma) *
                  std::sqrt(std::log(A) * theta_sq *
                            static_cast<double>(params.tail_truncation + 2));
    report.total = report.a1 + report.a2 + report.a3;
    return report;
}

HorizonSweepResult horizon_sweep(const TabularMdp& mdp, const HorizonSweepConfig& config,
                                 std::uint64_t seed) {
    require_valid(mdp);
    if (config.horizons.empty()) throw std::invalid_argument("horizon list is empty");
    for (int k : config.horizons)
        if (k < 1) throw std::invalid_argument("horizons must be at least 1");

    HorizonSweepResult result;
    result.horizons = config.horizons;

    const ValueIterationResult classical = classical_value_iteration(mdp, config.tol);
    if (!classical.converged)
        throw std::runtime_error("classical value iteration did not converge");
    result.v_mdp = classical.values;
    classical.values.minCoeff(&result.argmin_state);
    classical.values.maxCoeff(&result.argmax_state);

    std::vector<Index> all_actions(mdp.num_actions);
    for (Index a = 0; a < mdp.num_actions; ++a) all_actions[a] = a;

    result.v_bayes = Mat::Zero(static_cast<Index>(config.horizons.size()), mdp.num_states);
    result.mean_v_bayes = Vec::Zero(static_cast<Index>(config.horizons.size()));
    for (std::size_t i = 0; i < config.horizons.size(); ++i) {
        PredictionSpec spec;
        spec.horizon = config.horizons[i];
        spec.predictable_actions = all_actions;
        std::vector<PredictionBatch> batches;
        batches.reserve(config.scenarios_per_horizon);
        for (int n = 0; n < config.scenarios_per_horizon; ++n)
            batches.push_back(sample_realization(
                mdp, spec, derive_seed(seed, "sweep-scenario", (i << 32) ^ n)));
        const BayesValueVector v = bayes_value_iteration(mdp, uniform_scenarios(std::move(batches)),
                                                         config.tol, 100000, config.plan);
        if (!v.meta.converged)
            throw std::runtime_error("Bayesian value iteration did not converge in sweep");
        result.v_bayes.row(static_cast<Index>(i)) = v.values.transpose();
        result.mean_v_bayes[static_cast<Index>(i)] = v.values.mean();
    }

    result.v_off = offline_oracle_value(mdp, config.off_k, config.off_realizations,
                                        derive_seed(seed, "sweep-off"));
    return result;
}

}  // namespace predmdp
