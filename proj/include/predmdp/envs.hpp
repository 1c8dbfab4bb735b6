#pragma once

#include "predmdp/prediction.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace predmdp {

/// Random MDP with transition rows drawn uniformly from the simplex and
/// i.i.d. uniform [0,1] rewards. Deterministic under a fixed seed.
TabularMdp build_random_mdp(Index num_states, Index num_actions, double discount,
                            std::uint64_t seed);

/**
 * State factored as s = (s^m, s^d): an action-independent Markov chain on
 * the first factor and an action-dependent kernel on the second, with
 * independent transitions. Product states are indexed sm * |Sd| + sd.
 */
struct SplittableMdp {
    Mat chain;      // |Sm| x |Sm|
    Mat dependent;  // (|Sd|*|A|) x |Sd|, row index sd*|A| + a
    Index num_markov = 0;
    Index num_dependent = 0;
    Index num_actions = 0;

    Index product_state(Index sm, Index sd) const { return sm * num_dependent + sd; }
    Index markov_part(Index s) const { return s / num_dependent; }
    Index dependent_part(Index s) const { return s % num_dependent; }
};

SplittableMdp compose_splittable(const Mat& chain, const Mat& dependent_kernel,
                                 Index num_actions);

/// Materializes the product-view MDP. The reward and feasibility callbacks
/// receive (sm, sd, a); feasibility defaults to all-feasible.
TabularMdp splittable_to_tabular(
    const SplittableMdp& split, double discount,
    const std::function<double(Index, Index, Index)>& reward,
    const std::function<bool(Index, Index, Index)>& feasible = nullptr);

// ---------------------------------------------------------------------------
// Wind-farm storage control
// ---------------------------------------------------------------------------

struct WindStorageConfig {
    double capacity_kwh = 10.0;
    double charge_eff = 1.0;
    double discharge_eff = 1.0;
    int price_levels = 10;
    int mismatch_levels = 10;
    int soc_levels = 21;
    int action_levels = 9;       // charge/discharge grid spanning [-2, +2] kWh
    double max_rate_kwh = 2.0;
    double discount = 0.95;
};

void require_valid(const WindStorageConfig& config);

struct TimeSeriesDataset {
    std::vector<double> timestamp;
    std::vector<double> actual_wind;
    std::vector<double> forecast_wind;
    std::vector<double> price;

    std::size_t size() const { return timestamp.size(); }
};

struct IngestFormat {
    char delimiter = ',';
    bool lenient = false;  // exclude unparseable rows instead of failing
};

struct IngestReport {
    TimeSeriesDataset dataset;
    std::vector<std::string> excluded;  // "line N: reason" under lenient mode
};

/// Parses a delimited text file with a header row naming the columns
/// timestamp, actual_wind, forecast_wind, price (extra columns ignored).
/// Timestamps must be strictly increasing.
IngestReport ingest_timeseries(const std::string& path, const IngestFormat& format = {});

void write_timeseries(const std::string& path, const TimeSeriesDataset& dataset,
                      char delimiter = ',');

/// Synthetic wind/price series with persistence and a daily cycle, for
/// runs without a real export. Deterministic under a fixed seed.
TimeSeriesDataset generate_synthetic_timeseries(std::size_t rows, std::uint64_t seed);

/// Raw penalty reward: -[p max(mismatch - charge, 0) + p max(discharge - mismatch, 0)].
/// Simultaneous charge and discharge is rejected.
double wind_reward_raw(double price, double mismatch, double charge, double discharge);

/// Deterministic state-of-charge update soc + eta+ charge - eta- discharge,
/// rounded to the SoC grid; std::nullopt when the action is infeasible.
std::optional<double> soc_transition(double soc, double charge, double discharge,
                                     const WindStorageConfig& config);

/// Assembled storage-control environment: the factored model, its tabular
/// product view with feasibility mask, the bin representatives, and the
/// affine map from [0,1] rewards back to raw penalties.
struct WindStorageEnv {
    SplittableMdp split;
    TabularMdp mdp;
    WindStorageConfig config;
    Vec price_values;     // bin representatives
    Vec mismatch_values;  // bin representatives
    Vec soc_grid;
    Vec action_rates;     // signed kWh; positive = charge
    double penalty_max = 0.0;  // raw_penalty = (1 - reward01) * penalty_max
    std::vector<std::string> warnings;

    Index state_of(Index price_bin, Index mismatch_bin, Index soc_bin) const;
    double raw_penalty(double reward01) const { return (1.0 - reward01) * penalty_max; }
};

/**
 * Bins price and mismatch (= actual - forecast) by empirical quantiles,
 * fits add-one-smoothed Markov chains for both, attaches the
 * deterministic SoC dynamics, and assembles the product MDP with the
 * penalty reward rescaled affinely into [0,1]. Degenerate (constant)
 * series collapse to a single bin with a warning.
 */
WindStorageEnv discretize_and_fit(const TimeSeriesDataset& dataset,
                                  const WindStorageConfig& config);

/// Full-coverage prediction spec for the wind environment (the Markovian
/// factor is fully predictable; SoC is deterministic given the action).
PredictionSpec wind_prediction_spec(const WindStorageEnv& env, int horizon,
                                    double noise_level = 0.0);

/**
 * Draws an accurate product-level realization batch for the wind
 * environment: a one-hot realization of the (price, mismatch) chain per
 * step, crossed with the deterministic SoC successor per action. Noise is
 * applied to the Markovian factor before crossing, so rows stay stochastic.
 */
PredictionBatch sample_wind_batch(const WindStorageEnv& env, int horizon,
                                  const NoiseChannel& channel, std::uint64_t seed);

/// Oracle over wind batches; reproducible from the seed.
class WindPredictionOracle {
public:
    WindPredictionOracle(const WindStorageEnv& env, int horizon, NoiseChannel channel,
                         std::uint64_t seed);
    PredictionBatch next();

private:
    const WindStorageEnv& env_;
    int horizon_;
    NoiseChannel channel_;
    std::uint64_t master_seed_;
    std::uint64_t draws_ = 0;
};

struct WindExperimentConfig {
    int horizon = 2;
    std::vector<double> noise_levels{0.0};
    int scenarios = 64;
    int episodes = 200;
    int episode_steps = 40;
    double tol = 1e-6;
};

struct WindExperimentPoint {
    double eta = 0.0;
    double agent_cost = 0.0;     // mean cumulative raw penalty per episode
    double baseline_cost = 0.0;  // no-prediction greedy policy, same draws
    double saving = 0.0;
    double agent_cost_stderr = 0.0;
};

struct WindExperimentResult {
    std::vector<WindExperimentPoint> points;
};

/**
 * Cost comparison against the no-prediction baseline on common random
 * numbers: per noise level, solves the Bayesian value from noisy wind
 * scenario sets, rolls out the K-step planner and the classical greedy
 * policy on identical seeded realizations, and reports mean cumulative raw
 * penalties.
 */
WindExperimentResult run_wind_experiment(const WindStorageEnv& env,
                                         const WindExperimentConfig& config,
                                         std::uint64_t seed);

}  // namespace predmdp
