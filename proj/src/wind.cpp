#include "predmdp/envs.hpp"

#include "predmdp/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace predmdp {

void require_valid(const WindStorageConfig& config) {
    if (!(config.capacity_kwh > 0.0)) throw std::invalid_argument("capacity must be positive");
    if (!(config.charge_eff > 0.0 && config.charge_eff <= 1.0) ||
        !(config.discharge_eff > 0.0 && config.discharge_eff <= 1.0))
        throw std::invalid_argument("efficiencies must lie in (0,1]");
    if (config.price_levels < 1 || config.mismatch_levels < 1)
        throw std::invalid_argument("level counts must be positive");
    if (config.soc_levels < 2) throw std::invalid_argument("need at least two SoC levels");
    if (config.action_levels < 1 || !(config.max_rate_kwh > 0.0))
        throw std::invalid_argument("invalid action grid");
    if (!(config.discount > 0.0 && config.discount < 1.0))
        throw std::invalid_argument("discount must lie in (0,1)");
}

double wind_reward_raw(double price, double mismatch, double charge, double discharge) {
    if (charge < 0.0 || discharge < 0.0)
        throw std::invalid_argument("charge and discharge must be non-negative");
    if (charge > 0.0 && discharge > 0.0)
        throw std::invalid_argument("simultaneous charge and discharge is not allowed");
    return -(price * std::max(mismatch - charge, 0.0) +
             price * std::max(discharge - mismatch, 0.0));
}

std::optional<double> soc_transition(double soc, double charge, double discharge,
                                     const WindStorageConfig& config) {
    if (charge > 0.0 && discharge > 0.0)
        throw std::invalid_argument("simultaneous charge and discharge is not allowed");
    const double next = soc + config.charge_eff * charge - config.discharge_eff * discharge;
    if (next < -1e-9 || next > config.capacity_kwh + 1e-9) return std::nullopt;
    const double step = config.capacity_kwh / (config.soc_levels - 1);
    const double snapped = std::round(next / step) * step;
    return std::clamp(snapped, 0.0, config.capacity_kwh);
}

namespace {

struct Binning {
    std::vector<double> edges;  // strictly increasing cut points
    Vec representatives;        // per-bin mean of observations
    bool collapsed = false;

    Index bins() const { return static_cast<Index>(edges.size()) + 1; }
    Index bin_of(double x) const {
        return static_cast<Index>(std::upper_bound(edges.begin(), edges.end(), x) -
                                  edges.begin());
    }
};

/// Quantile binning: cut points at the j/levels quantiles, duplicates
/// collapsed; every resulting bin contains at least one observation.
Binning quantile_bins(const std::vector<double>& values, int levels) {
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();

    std::vector<double> edges;
    for (int j = 1; j < levels; ++j) {
        const double cut = sorted[static_cast<std::size_t>(j) * n / levels];
        if (cut >= sorted.back()) continue;  // keep the top bin non-empty
        if (edges.empty() || cut > edges.back()) edges.push_back(cut);
    }

    Binning binning;
    binning.collapsed = static_cast<int>(edges.size()) + 1 < levels;
    binning.edges = std::move(edges);

    Vec sums = Vec::Zero(binning.bins());
    Vec counts = Vec::Zero(binning.bins());
    for (double x : values) {
        const Index b = binning.bin_of(x);
        sums[b] += x;
        counts[b] += 1.0;
    }
    binning.representatives = (sums.array() / counts.array().max(1.0)).matrix();
    return binning;
}

/// Add-one-smoothed first-order chain over the bin sequence.
Mat fit_chain(const std::vector<Index>& bins, Index num_bins) {
    Mat counts = Mat::Ones(num_bins, num_bins);  // Laplace smoothing
    for (std::size_t i = 0; i + 1 < bins.size(); ++i) counts(bins[i], bins[i + 1]) += 1.0;
    for (Index r = 0; r < num_bins; ++r) counts.row(r) /= counts.row(r).sum();
    return counts;
}

Vec action_grid(const WindStorageConfig& config) {
    Vec rates(config.action_levels);
    if (config.action_levels == 1) {
        rates[0] = 0.0;
        return rates;
    }
    for (int i = 0; i < config.action_levels; ++i)
        rates[i] = -config.max_rate_kwh +
                   2.0 * config.max_rate_kwh * i / (config.action_levels - 1);
    return rates;
}

std::vector<Mat> sample_sm_realization(const WindStorageEnv& env, int horizon, Rng& rng) {
    const Index m = env.split.num_markov;
    std::vector<Mat> mats;
    mats.reserve(horizon);
    for (int k = 0; k < horizon; ++k) {
        Mat step = Mat::Zero(m, m);
        for (Index sm = 0; sm < m; ++sm)
            step(sm, rng.categorical(env.split.chain.row(sm).transpose())) = 1.0;
        mats.push_back(std::move(step));
    }
    return mats;
}

void noise_sm(std::vector<Mat>& mats, const NoiseChannel& channel, Rng& rng) {
    if (channel.kind == NoiseKind::none) return;
    const Index m = mats.front().cols();
    for (Mat& step : mats) {
        for (Index r = 0; r < step.rows(); ++r) {
            if (channel.kind == NoiseKind::uniform_mix) {
                const double eta = channel.parameter;
                step.row(r) = (1.0 - eta) * step.row(r) +
                              Eigen::RowVectorXd::Constant(m, eta / m);
            } else {
                Vec alpha = channel.parameter *
                            (step.row(r).transpose() + Vec::Constant(m, 1.0 / m));
                step.row(r) = rng.dirichlet(alpha).transpose();
            }
        }
    }
}

/// Crosses a Markov-factor prediction with the deterministic SoC dynamics
/// into a full-coverage product-level batch.
PredictionBatch wind_batch_from_sm(const WindStorageEnv& env, const std::vector<Mat>& sm_mats,
                                   bool accurate) {
    const Index S = env.mdp.num_states;
    const Index A = env.mdp.num_actions;
    const Index Sd = env.split.num_dependent;

    std::vector<Index> all_actions(A);
    for (Index a = 0; a < A; ++a) all_actions[a] = a;

    PredictionBatch batch;
    batch.num_states = S;
    batch.accurate = accurate;
    batch.steps.reserve(sm_mats.size());
    for (const Mat& sm_mat : sm_mats) {
        OneStepPrediction step;
        step.predictable_actions = all_actions;
        step.rows = Mat::Zero(S * A, S);
        for (Index sm = 0; sm < env.split.num_markov; ++sm) {
            for (Index sd = 0; sd < Sd; ++sd) {
                const Index s = env.split.product_state(sm, sd);
                for (Index a = 0; a < A; ++a) {
                    // Deterministic SoC successor; masked actions self-loop.
                    Index sd_next;
                    env.split.dependent.row(sd * A + a).maxCoeff(&sd_next);
                    auto row = step.rows.row(step.row_index(s, a));
                    for (Index sm2 = 0; sm2 < env.split.num_markov; ++sm2) {
                        const double p = sm_mat(sm, sm2);
                        if (p != 0.0) row[env.split.product_state(sm2, sd_next)] = p;
                    }
                }
            }
        }
        batch.steps.push_back(std::move(step));
    }
    return batch;
}

}  // namespace

Index WindStorageEnv::state_of(Index price_bin, Index mismatch_bin, Index soc_bin) const {
    const Index sm = price_bin * static_cast<Index>(mismatch_values.size()) + mismatch_bin;
    return split.product_state(sm, soc_bin);
}

WindStorageEnv discretize_and_fit(const TimeSeriesDataset& dataset,
                                  const WindStorageConfig& config) {
    require_valid(config);
    if (dataset.size() < 2) throw std::invalid_argument("dataset must span at least two rows");

    WindStorageEnv env;
    env.config = config;

    std::vector<double> mismatch(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i)
        mismatch[i] = dataset.actual_wind[i] - dataset.forecast_wind[i];

    const Binning price_bins = quantile_bins(dataset.price, config.price_levels);
    const Binning mismatch_bins = quantile_bins(mismatch, config.mismatch_levels);
    if (price_bins.collapsed)
        env.warnings.push_back("price series collapsed to " +
                               std::to_string(price_bins.bins()) + " bins");
    if (mismatch_bins.collapsed)
        env.warnings.push_back("mismatch series collapsed to " +
                               std::to_string(mismatch_bins.bins()) + " bins");
    env.price_values = price_bins.representatives;
    env.mismatch_values = mismatch_bins.representatives;

    std::vector<Index> price_seq(dataset.size());
    std::vector<Index> mismatch_seq(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        price_seq[i] = price_bins.bin_of(dataset.price[i]);
        mismatch_seq[i] = mismatch_bins.bin_of(mismatch[i]);
    }
    const Mat price_chain = fit_chain(price_seq, price_bins.bins());
    const Mat mismatch_chain = fit_chain(mismatch_seq, mismatch_bins.bins());

    // Markov factor: independent price and mismatch chains on the product.
    const Index np = price_bins.bins();
    const Index nm = mismatch_bins.bins();
    Mat sm_chain(np * nm, np * nm);
    for (Index p = 0; p < np; ++p)
        for (Index m = 0; m < nm; ++m)
            for (Index p2 = 0; p2 < np; ++p2)
                for (Index m2 = 0; m2 < nm; ++m2)
                    sm_chain(p * nm + m, p2 * nm + m2) = price_chain(p, p2) * mismatch_chain(m, m2);

    // SoC factor: deterministic grid dynamics; infeasible actions self-loop
    // and are masked below.
    env.soc_grid = Vec(config.soc_levels);
    const double step = config.capacity_kwh / (config.soc_levels - 1);
    for (int i = 0; i < config.soc_levels; ++i) env.soc_grid[i] = step * i;
    env.action_rates = action_grid(config);

    const Index nsoc = config.soc_levels;
    const Index na = config.action_levels;
    Mat soc_kernel = Mat::Zero(nsoc * na, nsoc);
    BoolGrid soc_feasible = BoolGrid::Constant(nsoc, na, true);
    for (Index sd = 0; sd < nsoc; ++sd) {
        for (Index a = 0; a < na; ++a) {
            const double rate = env.action_rates[a];
            const double charge = std::max(rate, 0.0);
            const double discharge = std::max(-rate, 0.0);
            const auto next = soc_transition(env.soc_grid[sd], charge, discharge, config);
            if (next) {
                const Index sd2 = static_cast<Index>(std::llround(*next / step));
                soc_kernel(sd * na + a, sd2) = 1.0;
            } else {
                soc_kernel(sd * na + a, sd) = 1.0;
                soc_feasible(sd, a) = false;
            }
        }
    }

    env.split = compose_splittable(sm_chain, soc_kernel, na);

    const double p_max = env.price_values.maxCoeff();
    const double m_max = env.mismatch_values.cwiseAbs().maxCoeff();
    env.penalty_max = std::max(p_max * (m_max + config.max_rate_kwh), 1e-12);

    auto reward01 = [&](Index sm, Index, Index a) {
        const double price = env.price_values[sm / nm];
        const double mis = env.mismatch_values[sm % nm];
        const double rate = env.action_rates[a];
        const double penalty =
            -wind_reward_raw(price, mis, std::max(rate, 0.0), std::max(-rate, 0.0));
        return std::clamp(1.0 - penalty / env.penalty_max, 0.0, 1.0);
    };
    auto feasible = [&](Index, Index sd, Index a) { return soc_feasible(sd, a); };
    env.mdp = splittable_to_tabular(env.split, config.discount, reward01, feasible);
    require_valid(env.mdp);
    return env;
}

PredictionSpec wind_prediction_spec(const WindStorageEnv& env, int horizon,
                                    double noise_level) {
    PredictionSpec spec;
    spec.horizon = horizon;
    spec.noise_level = noise_level;
    spec.predictable_actions.resize(env.mdp.num_actions);
    for (Index a = 0; a < env.mdp.num_actions; ++a) spec.predictable_actions[a] = a;
    return spec;
}

PredictionBatch sample_wind_batch(const WindStorageEnv& env, int horizon,
                                  const NoiseChannel& channel, std::uint64_t seed) {
    if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
    require_valid(channel);
    Rng rng(derive_seed(seed, "wind-batch"));
    std::vector<Mat> sm_mats = sample_sm_realization(env, horizon, rng);
    const bool identity =
        channel.kind == NoiseKind::none ||
        (channel.kind == NoiseKind::uniform_mix && channel.parameter == 0.0);
    if (!identity) noise_sm(sm_mats, channel, rng);
    return wind_batch_from_sm(env, sm_mats, identity);
}

WindPredictionOracle::WindPredictionOracle(const WindStorageEnv& env, int horizon,
                                           NoiseChannel channel, std::uint64_t seed)
    : env_(env), horizon_(horizon), channel_(channel), master_seed_(seed) {
    require_valid(channel_);
    if (horizon_ < 1) throw std::invalid_argument("horizon must be at least 1");
}

PredictionBatch WindPredictionOracle::next() {
    return sample_wind_batch(env_, horizon_, channel_,
                             derive_seed(master_seed_, "wind-oracle", draws_++));
}

WindExperimentResult run_wind_experiment(const WindStorageEnv& env,
                                         const WindExperimentConfig& config,
                                         std::uint64_t seed) {
    if (config.episodes < 1 || config.episode_steps < 1 || config.scenarios < 1)
        throw std::invalid_argument("experiment sizes must be positive");

    const ValueIterationResult classical = classical_value_iteration(env.mdp, config.tol);
    if (!classical.converged)
        throw std::runtime_error("classical value iteration did not converge on the wind MDP");
    const PolicyTable baseline = greedy_policy(env.mdp, classical.values);

    const int K = config.horizon;
    const Index S = env.mdp.num_states;

    // Pre-draw shared environment randomness: initial states and the
    // realized Markov-factor paths, identical for every noise level and
    // for the baseline (common random numbers).
    struct Window {
        std::vector<Mat> sm_mats;
    };
    std::vector<Index> initial(config.episodes);
    std::vector<std::vector<Window>> windows(config.episodes);
    const int windows_per_episode = (config.episode_steps + K - 1) / K;
    for (int e = 0; e < config.episodes; ++e) {
        Rng rng(derive_seed(seed, "wind-episode", static_cast<std::uint64_t>(e)));
        initial[e] = static_cast<Index>(rng.next_u64() % static_cast<std::uint64_t>(S));
        windows[e].resize(windows_per_episode);
        for (int w = 0; w < windows_per_episode; ++w)
            windows[e][w].sm_mats = sample_sm_realization(env, K, rng);
    }

    auto realized_arrival = [&](const Mat& sm_mat, Index sm) {
        Index sm2;
        sm_mat.row(sm).maxCoeff(&sm2);
        return sm2;
    };
    auto soc_arrival = [&](Index sd, Index a) {
        Index sd2;
        env.split.dependent.row(sd * env.split.num_actions + a).maxCoeff(&sd2);
        return sd2;
    };
    auto step_cost = [&](Index s, Index a) { return env.raw_penalty(env.mdp.reward(s, a)); };

    // Baseline rollout (prediction-free greedy policy).
    Vec baseline_costs(config.episodes);
    for (int e = 0; e < config.episodes; ++e) {
        Index s = initial[e];
        double cost = 0.0;
        int t = 0;
        for (int w = 0; w < windows_per_episode && t < config.episode_steps; ++w) {
            for (int k = 0; k < K && t < config.episode_steps; ++k, ++t) {
                const Index a = baseline.actions[s];
                cost += step_cost(s, a);
                const Index sm2 = realized_arrival(windows[e][w].sm_mats[k],
                                                   env.split.markov_part(s));
                s = env.split.product_state(sm2,
                                            soc_arrival(env.split.dependent_part(s), a));
            }
        }
        baseline_costs[e] = cost;
    }
    const double baseline_mean = baseline_costs.mean();

    WindExperimentResult result;
    for (std::size_t pi = 0; pi < config.noise_levels.size(); ++pi) {
        const double eta = config.noise_levels[pi];
        const NoiseChannel channel{NoiseKind::uniform_mix, eta};

        WindPredictionOracle oracle(env, K, channel,
                                    derive_seed(seed, "wind-scenarios", pi));
        std::vector<PredictionBatch> batches;
        batches.reserve(config.scenarios);
        for (int i = 0; i < config.scenarios; ++i) batches.push_back(oracle.next());
        const BayesValueVector value = bayes_value_iteration(
            env.mdp, uniform_scenarios(std::move(batches)), config.tol);
        if (!value.meta.converged)
            throw std::runtime_error("Bayesian value iteration did not converge on the wind MDP");

        Vec costs(config.episodes);
        for (int e = 0; e < config.episodes; ++e) {
            Rng noise_rng(derive_seed(seed, "wind-obs-noise",
                                      (pi << 40) ^ static_cast<std::uint64_t>(e)));
            Index s = initial[e];
            double cost = 0.0;
            int t = 0;
            for (int w = 0; w < windows_per_episode && t < config.episode_steps; ++w) {
                std::vector<Mat> observed = windows[e][w].sm_mats;
                const bool identity = eta == 0.0;
                if (!identity) noise_sm(observed, channel, noise_rng);
                const PredictionBatch batch = wind_batch_from_sm(env, observed, identity);
                const PlanResult plan =
                    identity ? dp_shortcut_plan(env.mdp, batch, s, value.values)
                             : plan_open_loop(env.mdp, batch, s, value.values);
                for (int k = 0; k < K && t < config.episode_steps; ++k, ++t) {
                    const Index a = plan.actions[k];
                    cost += step_cost(s, a);
                    const Index sm2 = realized_arrival(windows[e][w].sm_mats[k],
                                                       env.split.markov_part(s));
                    s = env.split.product_state(
                        sm2, soc_arrival(env.split.dependent_part(s), a));
                }
            }
            costs[e] = cost;
        }

        WindExperimentPoint point;
        point.eta = eta;
        point.agent_cost = costs.mean();
        point.baseline_cost = baseline_mean;
        point.saving = baseline_mean - point.agent_cost;
        if (config.episodes > 1) {
            const double var =
                (costs.array() - point.agent_cost).square().sum() / (config.episodes - 1);
            point.agent_cost_stderr = std::sqrt(var / config.episodes);
        }
        result.points.push_back(point);
    }
    return result;
}

}  // namespace predmdp
