#include "predmdp/bola.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace predmdp {

SampleBudget compute_budget(double gamma, int horizon, Index num_states, Index num_actions,
                            Index num_predictable, double delta, double epsilon, double alpha) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0,1)");
    if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
    if (num_states < 1 || num_actions < 1) throw std::invalid_argument("sizes must be positive");
    if (num_predictable < 0 || num_predictable > num_actions)
        throw std::invalid_argument("predictable action count out of range");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
    if (!(epsilon > 0.0 && epsilon < 1.0 / (1.0 - gamma)))
        throw std::invalid_argument("epsilon must lie in (0, 1/(1-gamma))");

    const double S = static_cast<double>(num_states);
    const double A = static_cast<double>(num_actions);
    const double unpred = A - static_cast<double>(num_predictable);
    const double K = static_cast<double>(horizon);

    SampleBudget budget;
    budget.alpha = alpha;
    budget.delta = delta;
    budget.epsilon = epsilon;

    const double log_arg = 4.0 * K * K * S * unpred / delta;
    budget.n1_raw = 2.0 * std::log1p(log_arg) /
                    (std::pow(1.0 - gamma, 4.0) * std::pow(1.0 - alpha, 2.0) * epsilon * epsilon);

    const double omgk = 1.0 - std::pow(gamma, K);
    budget.n2_raw = 2.0 * std::log(4.0 * S / delta) /
                    (std::pow(1.0 - gamma, 2.0) * omgk * omgk * alpha * alpha * epsilon * epsilon);

    budget.n1 = static_cast<long long>(std::ceil(budget.n1_raw));
    budget.n2 = static_cast<long long>(std::ceil(budget.n2_raw));
    budget.d1 = budget.n1 * num_states * (num_actions - num_predictable) +
                num_states * num_actions;
    budget.d2 = budget.n2;
    return budget;
}

SampleStore sample_generative(const TabularMdp& mdp, long long n1,
                              const std::vector<Index>& predictable_actions,
                              std::uint64_t seed) {
    if (n1 < 1) throw std::invalid_argument("n1 must be at least 1");

    SampleStore store;
    store.num_states = mdp.num_states;
    store.num_actions = mdp.num_actions;
    store.predictable_actions = predictable_actions;
    store.samples_per_pair = n1;
    store.counts = Mat::Zero(mdp.num_states * mdp.num_actions, mdp.num_states);
    store.sampled = BoolGrid::Constant(mdp.num_states, mdp.num_actions, false);
    store.reward_obs = Mat::Zero(mdp.num_states, mdp.num_actions);

    auto predictable = [&](Index a) {
        return std::binary_search(predictable_actions.begin(), predictable_actions.end(), a);
    };

    for (Index s = 0; s < mdp.num_states; ++s) {
        for (Index a = 0; a < mdp.num_actions; ++a) {
            // One noiseless reward observation per pair.
            store.reward_obs(s, a) = mdp.reward(s, a);
            if (predictable(a)) continue;
            Rng rng(derive_seed(seed, "generative", static_cast<std::uint64_t>(mdp.row(s, a))));
            const Vec kernel = mdp.transition_row(s, a).transpose();
            for (long long i = 0; i < n1; ++i) {
                const Index arrival = rng.categorical(kernel);
                store.counts(mdp.row(s, a), arrival) += 1.0;
            }
            store.sampled(s, a) = true;
            store.total_draws += n1;
        }
    }
    return store;
}

Mat estimate_transitions(const SampleStore& store) {
    Mat hat = Mat::Zero(store.counts.rows(), store.counts.cols());
    for (Index s = 0; s < store.num_states; ++s) {
        for (Index a = 0; a < store.num_actions; ++a) {
            const Index r = s * store.num_actions + a;
            const bool predictable = std::binary_search(store.predictable_actions.begin(),
                                                        store.predictable_actions.end(), a);
            if (predictable) continue;
            if (!store.sampled(s, a))
                throw std::invalid_argument("no samples for pair (" + std::to_string(s) + "," +
                                            std::to_string(a) + ")");
            hat.row(r) = store.counts.row(r) / static_cast<double>(store.samples_per_pair);
        }
    }
    return hat;
}

ScenarioSet estimate_prediction_distribution(PredictionOracle& oracle, long long n2) {
    if (n2 < 1) throw std::invalid_argument("n2 must be at least 1");
    std::vector<PredictionBatch> batches;
    batches.reserve(static_cast<std::size_t>(n2));
    for (long long i = 0; i < n2; ++i) batches.push_back(oracle.next());
    return uniform_scenarios(std::move(batches));
}

EstimatedModel assemble_model(const SampleStore& store, ScenarioSet scenario_set,
                              PredictionSpec spec) {
    EstimatedModel model;
    model.num_states = store.num_states;
    model.num_actions = store.num_actions;
    model.transition_hat = estimate_transitions(store);
    model.reward_hat = store.reward_obs;
    model.scenario_set = std::move(scenario_set);
    model.spec = std::move(spec);
    // Rows of predictable actions are never consulted by the planner
    // (predictions replace them); fill with uniform rows so the assembled
    // MDP still validates.
    for (Index s = 0; s < model.num_states; ++s) {
        for (Index a : model.spec.predictable_actions) {
            model.transition_hat.row(s * model.num_actions + a)
                .setConstant(1.0 / static_cast<double>(model.num_states));
        }
    }
    return model;
}

TabularMdp effective_mdp(const EstimatedModel& model, double discount) {
    TabularMdp mdp = make_mdp(model.num_states, model.num_actions, discount);
    mdp.transition = model.transition_hat;
    mdp.reward = model.reward_hat;
    return mdp;
}

BayesValueVector learn_bayes_value(const EstimatedModel& model, double discount, double tol,
                                   int max_iters, const PlanOptions& opts) {
    const TabularMdp mdp = effective_mdp(model, discount);
    return bayes_value_iteration(mdp, model.scenario_set, tol, max_iters, opts);
}

OnlineAgent make_agent(EstimatedModel model, double discount, double tol, int max_iters,
                       const PlanOptions& opts) {
    OnlineAgent agent;
    agent.planning_mdp = effective_mdp(model, discount);
    agent.learned_value = bayes_value_iteration(agent.planning_mdp, model.scenario_set, tol,
                                                max_iters, opts);
    agent.model = std::move(model);
    return agent;
}

PlanResult online_step(const OnlineAgent& agent, Index s, const PredictionBatch& batch,
                       const PlanOptions& opts) {
    if (batch.horizon() != agent.model.spec.horizon ||
        batch.num_states != agent.model.num_states ||
        batch.predictable_actions() != agent.model.spec.predictable_actions)
        throw std::invalid_argument("prediction batch does not match the agent's spec");
    if (batch.accurate && batch.full_coverage(agent.planning_mdp))
        return dp_shortcut_plan(agent.planning_mdp, batch, s, agent.learned_value.values);
    return plan_open_loop(agent.planning_mdp, batch, s, agent.learned_value.values, opts);
}

BolaReport run_bola(const TabularMdp& mdp, const BolaConfig& config, std::uint64_t seed) {
    require_valid(mdp);
    require_valid(config.spec, mdp);
    require_valid(config.channel);
    if (config.episodes < 1 || config.horizon < 1)
        throw std::invalid_argument("episodes and horizon must be at least 1");

    // Offline stage: estimate kernel, rewards, and batch distribution.
    const SampleStore store = sample_generative(mdp, config.n1, config.spec.predictable_actions,
                                                derive_seed(seed, "bola-generative"));
    PredictionOracle oracle(mdp, config.spec, config.channel, derive_seed(seed, "bola-oracle"));
    ScenarioSet scenarios = estimate_prediction_distribution(oracle, config.n2);
    EstimatedModel model = assemble_model(store, std::move(scenarios), config.spec);
    OnlineAgent agent = make_agent(std::move(model), mdp.discount, config.tol, 100000,
                                   config.plan);

    // Online stage: fresh predictions every K steps; the environment
    // realizes exactly the predicted transitions for predictable actions.
    const int K = config.spec.horizon;
    Rng env_rng(derive_seed(seed, "bola-env"));
    Vec returns(config.episodes);
    for (int e = 0; e < config.episodes; ++e) {
        Index s = static_cast<Index>(env_rng.next_u64() % static_cast<std::uint64_t>(mdp.num_states));
        double ret = 0.0;
        double disc = 1.0;
        int t = 0;
        while (t < config.horizon) {
            const std::uint64_t window_seed =
                derive_seed(seed, "bola-window",
                            (static_cast<std::uint64_t>(e) << 32) ^ static_cast<std::uint64_t>(t));
            const PredictionBatch realized = sample_realization(mdp, config.spec, window_seed);
            const PredictionBatch observed =
                config.channel.kind == NoiseKind::none
                    ? realized
                    : apply_noise(realized, config.channel, derive_seed(window_seed, "obs"));
            const PlanResult plan = online_step(agent, s, observed, config.plan);
            for (int k = 0; k < K && t < config.horizon; ++k, ++t) {
                const Index a = plan.actions[k];
                ret += disc * mdp.reward(s, a);
                disc *= mdp.discount;
                const OneStepPrediction& sigma = realized.steps[k];
                const Index slot = sigma.slot_of(a);
                if (slot >= 0) {
                    Index arrival;
                    sigma.rows.row(sigma.row_index(s, slot)).maxCoeff(&arrival);
                    s = arrival;
                } else {
                    s = env_rng.categorical(mdp.transition_row(s, a).transpose());
                }
            }
        }
        returns[e] = ret;
    }

    BolaReport report;
    report.episode_returns = returns;
    report.mean_return = returns.mean();
    if (config.episodes > 1) {
        const double var =
            (returns.array() - report.mean_return).square().sum() / (config.episodes - 1);
        report.std_error = std::sqrt(var / config.episodes);
    }
    report.learned_value = agent.learned_value;
    return report;
}

}  // namespace predmdp
