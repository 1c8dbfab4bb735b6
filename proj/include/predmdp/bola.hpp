#pragma once

#include "predmdp/bayes.hpp"

#include <cstdint>
#include <optional>

namespace predmdp {

/**
 * Sample budget (N1, N2, D1, D2, alpha, delta, epsilon). n1_raw/n2_raw are
 * the closed-form values before ceiling; n1/n2 their ceilings. The totals
 * satisfy d1 = n1*|S|*(|A|-|A-|) + |S||A| and d2 = n2.
 */
struct SampleBudget {
    double n1_raw = 0.0;
    double n2_raw = 0.0;
    long long n1 = 0;
    long long n2 = 0;
    long long d1 = 0;
    long long d2 = 0;
    double alpha = 0.0;
    double delta = 0.0;
    double epsilon = 0.0;
};

/**
 * Closed-form budgets:
 *   n1 = 2 log(1 + 4 K^2 |S| (|A|-|A-|) / delta) / ((1-gamma)^4 (1-alpha)^2 eps^2)
 *   n2 = 2 log(4 |S| / delta) / ((1-gamma)^2 (1-gamma^K)^2 alpha^2 eps^2)
 * With full action coverage the n1 log argument is 1, so n1 = 0 and the
 * generative cost reduces to the |S||A| reward-learning term.
 */
SampleBudget compute_budget(double gamma, int horizon, Index num_states, Index num_actions,
                            Index num_predictable, double delta, double epsilon, double alpha);

/// Raw next-state tallies from the generative model plus one reward
/// observation per (s,a) pair. Only unpredictable actions carry samples.
struct SampleStore {
    Index num_states = 0;
    Index num_actions = 0;
    std::vector<Index> predictable_actions;
    long long samples_per_pair = 0;
    Mat counts;        // (S*A) x S; rows of predictable actions stay zero
    BoolGrid sampled;  // S x A
    Mat reward_obs;    // S x A
    long long total_draws = 0;
};

/// Draws n1 i.i.d. next states from P(.|s,a) for every pair with an
/// unpredictable action and records one reward observation per pair.
SampleStore sample_generative(const TabularMdp& mdp, long long n1,
                              const std::vector<Index>& predictable_actions,
                              std::uint64_t seed);

/// Empirical-frequency transition estimate: rows count(s')/n1 for sampled
/// pairs (exact rationals with denominator n1). Missing pair data is an error.
Mat estimate_transitions(const SampleStore& store);

/// The n2 oracle draws with uniform weights 1/n2; duplicates kept as repeats.
ScenarioSet estimate_prediction_distribution(PredictionOracle& oracle, long long n2);

/// Everything the offline stage estimates: transitions for unpredictable
/// actions (rows of predictable actions are uniform placeholders that the
/// planner never reads), rewards, and the empirical batch distribution.
struct EstimatedModel {
    Mat transition_hat;  // (S*A) x S
    Mat reward_hat;      // S x A
    ScenarioSet scenario_set;
    PredictionSpec spec;
    Index num_states = 0;
    Index num_actions = 0;
};

EstimatedModel assemble_model(const SampleStore& store, ScenarioSet scenario_set,
                              PredictionSpec spec);

/// The estimated MDP the planner runs against: learned rewards and
/// transitions with the true discount.
TabularMdp effective_mdp(const EstimatedModel& model, double discount);

/// Solves the estimated Bayesian fixed point by value iteration on the
/// effective MDP against the model's scenario set.
BayesValueVector learn_bayes_value(const EstimatedModel& model, double discount, double tol,
                                   int max_iters = 100000, const PlanOptions& opts = {});

/// Immutable decision-time artifacts of the offline stage.
struct OnlineAgent {
    BayesValueVector learned_value;
    EstimatedModel model;
    TabularMdp planning_mdp;
};

OnlineAgent make_agent(EstimatedModel model, double discount, double tol,
                       int max_iters = 100000, const PlanOptions& opts = {});

/// One decision: open-loop plan against the learned terminal value using
/// estimated dynamics for unpredictable actions. Stateless across calls.
PlanResult online_step(const OnlineAgent& agent, Index s, const PredictionBatch& batch,
                       const PlanOptions& opts = {});

struct BolaConfig {
    PredictionSpec spec;
    NoiseChannel channel;
    long long n1 = 1;
    long long n2 = 1;
    int episodes = 1;
    int horizon = 1;
    double tol = 1e-8;
    PlanOptions plan;
};

struct BolaReport {
    double mean_return = 0.0;
    double std_error = 0.0;
    Vec episode_returns;
    BayesValueVector learned_value;
};

/**
 * End-to-end run: offline estimation from the generative model and the
 * prediction oracle, then seeded online episodes where a fresh batch
 * arrives every K steps, the agent commits a K-step plan, and the
 * environment realizes exactly the predicted transitions for predictable
 * actions (kernel draws otherwise).
 */
BolaReport run_bola(const TabularMdp& mdp, const BolaConfig& config, std::uint64_t seed);

}  // namespace predmdp
