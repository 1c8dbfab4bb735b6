#include "predmdp/bayes.hpp"

#include "predmdp/parallel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace predmdp {

ScenarioSet uniform_scenarios(std::vector<PredictionBatch> batches) {
    ScenarioSet set;
    set.weights = Vec::Constant(static_cast<Index>(batches.size()),
                                1.0 / static_cast<double>(batches.size()));
    set.scenarios = std::move(batches);
    return set;
}

void require_valid(const ScenarioSet& set) {
    if (set.scenarios.empty()) throw std::invalid_argument("scenario set is empty");
    if (set.weights.size() != static_cast<Index>(set.scenarios.size()))
        throw std::invalid_argument("scenario weights have wrong length");
    if ((set.weights.array() < 0.0).any() || std::abs(set.weights.sum() - 1.0) > kRowSumTol)
        throw std::invalid_argument("scenario weights must form a probability vector");
    const auto& first = set.scenarios.front();
    for (const auto& s : set.scenarios) {
        if (s.horizon() != first.horizon() || s.num_states != first.num_states ||
            s.predictable_actions() != first.predictable_actions())
            throw std::invalid_argument("scenarios must share (K, A-) shape");
    }
}

bool all_accurate_full_coverage(const ScenarioSet& set, const TabularMdp& mdp) {
    for (const auto& s : set.scenarios)
        if (!s.accurate || !s.full_coverage(mdp)) return false;
    return !set.scenarios.empty();
}

Vec propagate(const TabularMdp& mdp, const PredictionBatch& batch, Index s0,
              const std::vector<Index>& actions) {
    if (static_cast<int>(actions.size()) > batch.horizon())
        throw std::invalid_argument("action prefix longer than the prediction horizon");
    if (s0 < 0 || s0 >= mdp.num_states) throw std::invalid_argument("start state out of range");

    Vec dist = Vec::Zero(mdp.num_states);
    dist[s0] = 1.0;
    for (std::size_t t = 0; t < actions.size(); ++t) {
        const Index a = actions[t];
        if (a < 0 || a >= mdp.num_actions) throw std::invalid_argument("action out of range");
        const OneStepPrediction& sigma = batch.steps[t];
        Vec next = Vec::Zero(mdp.num_states);
        for (Index s = 0; s < mdp.num_states; ++s) {
            if (dist[s] == 0.0) continue;
            next += dist[s] * conditioned_transition(mdp, sigma, s, a);
        }
        dist = std::move(next);
    }
    return dist;
}

namespace {

constexpr double kSupportEps = 1e-15;

struct PlanSearch {
    const TabularMdp& mdp;
    const PredictionBatch& batch;
    const Vec& terminal;
    int horizon;
    double best = -std::numeric_limits<double>::infinity();
    std::vector<Index> best_actions;
    std::vector<Index> current;

    // Depth-first over action sequences in lexicographic order; keeping the
    // first strict improvement makes the reported maximizer lex-smallest.
    void search(int t, const Vec& dist, double reward_acc, double disc) {
        if (t == horizon) {
            const double value = reward_acc + disc * dist.dot(terminal);
            if (value > best) {
                best = value;
                best_actions = current;
            }
            return;
        }
        const OneStepPrediction& sigma = batch.steps[t];
        for (Index a = 0; a < mdp.num_actions; ++a) {
            bool feasible = true;
            double step_reward = 0.0;
            for (Index s = 0; s < mdp.num_states && feasible; ++s) {
                if (dist[s] <= kSupportEps) continue;
                if (!mdp.is_feasible(s, a)) feasible = false;
                step_reward += dist[s] * mdp.reward(s, a);
            }
            if (!feasible) continue;
            Vec next = Vec::Zero(mdp.num_states);
            for (Index s = 0; s < mdp.num_states; ++s) {
                if (dist[s] <= kSupportEps) continue;
                next += dist[s] * conditioned_transition(mdp, sigma, s, a);
            }
            current.push_back(a);
            search(t + 1, next, reward_acc + disc * step_reward, disc * mdp.discount);
            current.pop_back();
        }
    }
};

Index one_hot_arrival(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
    Index arrival;
    row.maxCoeff(&arrival);
    return arrival;
}

void require_shortcut_preconditions(const TabularMdp& mdp, const PredictionBatch& batch) {
    if (!batch.accurate)
        throw std::invalid_argument("dp shortcut requires an accurate realization batch");
    if (!batch.full_coverage(mdp))
        throw std::invalid_argument("dp shortcut requires predictions covering every action");
}

}  // namespace

PlanResult plan_open_loop(const TabularMdp& mdp, const PredictionBatch& batch, Index s,
                          const Vec& terminal_values, const PlanOptions& opts) {
    if (terminal_values.size() != mdp.num_states)
        throw std::invalid_argument("terminal value vector has wrong length");
    if (s < 0 || s >= mdp.num_states) throw std::invalid_argument("state out of range");
    const int horizon = batch.horizon();
    if (horizon < 1) throw std::invalid_argument("prediction batch is empty");

    const double seq_count = std::pow(static_cast<double>(mdp.num_actions), horizon);
    if (seq_count > static_cast<double>(opts.enumeration_cap))
        throw EnumerationCapError("open-loop enumeration of " + std::to_string(seq_count) +
                                  " sequences exceeds the configured cap of " +
                                  std::to_string(opts.enumeration_cap));

    PlanSearch search{mdp, batch, terminal_values, horizon};
    Vec dist = Vec::Zero(mdp.num_states);
    dist[s] = 1.0;
    search.current.reserve(horizon);
    search.search(0, dist, 0.0, 1.0);
    if (search.best_actions.empty() && horizon > 0 &&
        search.best == -std::numeric_limits<double>::infinity())
        throw std::invalid_argument("no admissible action sequence from state " +
                                    std::to_string(s));
    return {search.best_actions, search.best};
}

Vec dp_shortcut_values(const TabularMdp& mdp, const PredictionBatch& batch,
                       const Vec& terminal_values) {
    require_shortcut_preconditions(mdp, batch);
    if (terminal_values.size() != mdp.num_states)
        throw std::invalid_argument("terminal value vector has wrong length");

    const int horizon = batch.horizon();
    Vec w = terminal_values;
    for (int t = horizon - 1; t >= 0; --t) {
        const OneStepPrediction& sigma = batch.steps[t];
        Vec next(mdp.num_states);
        for (Index s = 0; s < mdp.num_states; ++s) {
            double best = -std::numeric_limits<double>::infinity();
            for (Index a = 0; a < mdp.num_actions; ++a) {
                if (!mdp.is_feasible(s, a)) continue;
                const Index arrival =
                    one_hot_arrival(sigma.rows.row(sigma.row_index(s, sigma.slot_of(a))));
                const double q = mdp.reward(s, a) + mdp.discount * w[arrival];
                if (q > best) best = q;
            }
            next[s] = best;
        }
        w = std::move(next);
    }
    return w;
}

PlanResult dp_shortcut_plan(const TabularMdp& mdp, const PredictionBatch& batch, Index s,
                            const Vec& terminal_values) {
    require_shortcut_preconditions(mdp, batch);
    if (terminal_values.size() != mdp.num_states)
        throw std::invalid_argument("terminal value vector has wrong length");
    if (s < 0 || s >= mdp.num_states) throw std::invalid_argument("state out of range");

    const int horizon = batch.horizon();
    // Stage values W_t for t = horizon..0; W[t] covers decisions at step t.
    std::vector<Vec> stages(horizon + 1);
    stages[horizon] = terminal_values;
    for (int t = horizon - 1; t >= 0; --t) {
        const OneStepPrediction& sigma = batch.steps[t];
        stages[t] = Vec(mdp.num_states);
        for (Index st = 0; st < mdp.num_states; ++st) {
            double best = -std::numeric_limits<double>::infinity();
            for (Index a = 0; a < mdp.num_actions; ++a) {
                if (!mdp.is_feasible(st, a)) continue;
                const Index arrival =
                    one_hot_arrival(sigma.rows.row(sigma.row_index(st, sigma.slot_of(a))));
                const double q = mdp.reward(st, a) + mdp.discount * stages[t + 1][arrival];
                if (q > best) best = q;
            }
            stages[t][st] = best;
        }
    }

    // Follow the deterministic path, preferring the lowest action index.
    PlanResult plan;
    plan.expected_return = stages[0][s];
    Index state = s;
    for (int t = 0; t < horizon; ++t) {
        const OneStepPrediction& sigma = batch.steps[t];
        double best = -std::numeric_limits<double>::infinity();
        Index best_a = -1;
        Index best_arrival = -1;
        for (Index a = 0; a < mdp.num_actions; ++a) {
            if (!mdp.is_feasible(state, a)) continue;
            const Index arrival =
                one_hot_arrival(sigma.rows.row(sigma.row_index(state, sigma.slot_of(a))));
            const double q = mdp.reward(state, a) + mdp.discount * stages[t + 1][arrival];
            if (q > best) {
                best = q;
                best_a = a;
                best_arrival = arrival;
            }
        }
        plan.actions.push_back(best_a);
        state = best_arrival;
    }
    return plan;
}

Vec bayes_bellman_apply(const TabularMdp& mdp, const ScenarioSet& scenarios, const Vec& v,
                        const PlanOptions& opts) {
    require_valid(scenarios);
    if (v.size() != mdp.num_states) throw std::invalid_argument("value vector has wrong length");

    const std::size_t n = scenarios.scenarios.size();
    std::vector<Vec> per_scenario(n);
    if (all_accurate_full_coverage(scenarios, mdp)) {
        parallel_for(n, [&](std::size_t i) {
            per_scenario[i] = dp_shortcut_values(mdp, scenarios.scenarios[i], v);
        });
    } else {
        parallel_for(n, [&](std::size_t i) {
            Vec vals(mdp.num_states);
            for (Index s = 0; s < mdp.num_states; ++s)
                vals[s] = plan_open_loop(mdp, scenarios.scenarios[i], s, v, opts).expected_return;
            per_scenario[i] = std::move(vals);
        });
    }
    Vec out = Vec::Zero(mdp.num_states);
    for (std::size_t i = 0; i < n; ++i) out += scenarios.weights[static_cast<Index>(i)] * per_scenario[i];
    return out;
}

BayesValueVector bayes_value_iteration(const TabularMdp& mdp, const ScenarioSet& scenarios,
                                       double tol, int max_iters, const PlanOptions& opts) {
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
    require_valid(scenarios);

    const double gamma_k = std::pow(mdp.discount, scenarios.horizon());
    const double stop = tol * (1.0 - gamma_k) / gamma_k;

    BayesValueVector result;
    result.meta.horizon = scenarios.horizon();
    result.meta.num_predictable =
        static_cast<Index>(scenarios.scenarios.front().predictable_actions().size());

    Vec v = Vec::Zero(mdp.num_states);
    for (int it = 1; it <= max_iters; ++it) {
        Vec next = bayes_bellman_apply(mdp, scenarios, v, opts);
        const double change = (next - v).cwiseAbs().maxCoeff();
        v = std::move(next);
        if (change <= stop) {
            result.values = v;
            result.meta.converged = true;
            result.meta.iterations = it;
            result.meta.residual = change * gamma_k / (1.0 - gamma_k);
            return result;
        }
    }
    result.values = v;
    result.meta.converged = false;
    result.meta.iterations = max_iters;
    result.meta.residual = std::numeric_limits<double>::infinity();
    return result;
}

}  // namespace predmdp
