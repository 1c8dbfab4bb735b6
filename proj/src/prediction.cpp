#include "predmdp/prediction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace predmdp {

namespace {

const std::vector<Index> kNoActions;

}  // namespace

void require_valid(const PredictionSpec& spec, const TabularMdp& mdp) {
    if (spec.horizon < 1) throw std::invalid_argument("prediction horizon must be at least 1");
    if (!(spec.noise_level >= 0.0 && spec.noise_level <= 1.0))
        throw std::invalid_argument("noise_level must lie in [0,1]");
    if (!std::is_sorted(spec.predictable_actions.begin(), spec.predictable_actions.end()))
        throw std::invalid_argument("predictable_actions must be sorted");
    if (std::adjacent_find(spec.predictable_actions.begin(), spec.predictable_actions.end()) !=
        spec.predictable_actions.end())
        throw std::invalid_argument("predictable_actions must be unique");
    for (Index a : spec.predictable_actions)
        if (a < 0 || a >= mdp.num_actions)
            throw std::invalid_argument("predictable action out of range");
}

Index OneStepPrediction::slot_of(Index a) const {
    const auto it = std::lower_bound(predictable_actions.begin(), predictable_actions.end(), a);
    if (it == predictable_actions.end() || *it != a) return -1;
    return static_cast<Index>(it - predictable_actions.begin());
}

const std::vector<Index>& PredictionBatch::predictable_actions() const {
    return steps.empty() ? kNoActions : steps.front().predictable_actions;
}

bool PredictionBatch::full_coverage(const TabularMdp& mdp) const {
    return static_cast<Index>(predictable_actions().size()) == mdp.num_actions;
}

void require_valid(const NoiseChannel& channel) {
    switch (channel.kind) {
        case NoiseKind::none:
            return;
        case NoiseKind::uniform_mix:
            if (!(channel.parameter >= 0.0 && channel.parameter <= 1.0))
                throw std::invalid_argument("uniform_mix parameter must lie in [0,1]");
            return;
        case NoiseKind::dirichlet_jitter:
            if (!(channel.parameter > 0.0))
                throw std::invalid_argument("dirichlet_jitter concentration must be positive");
            return;
    }
    throw std::invalid_argument("unknown noise kind");
}

PredictionBatch sample_realization(const TabularMdp& mdp, const PredictionSpec& spec,
                                   std::uint64_t seed) {
    require_valid(spec, mdp);
    if (spec.predictable_actions.empty())
        throw std::invalid_argument("cannot realize predictions for an empty action set");

    const Index n_pred = static_cast<Index>(spec.predictable_actions.size());
    Rng rng(derive_seed(seed, "realization"));

    PredictionBatch batch;
    batch.num_states = mdp.num_states;
    batch.accurate = true;
    batch.steps.reserve(spec.horizon);
    for (int k = 0; k < spec.horizon; ++k) {
        OneStepPrediction step;
        step.predictable_actions = spec.predictable_actions;
        step.rows = Mat::Zero(mdp.num_states * n_pred, mdp.num_states);
        for (Index s = 0; s < mdp.num_states; ++s) {
            for (Index j = 0; j < n_pred; ++j) {
                const Index a = spec.predictable_actions[j];
                const Index arrival = rng.categorical(mdp.transition_row(s, a).transpose());
                step.rows(step.row_index(s, j), arrival) = 1.0;
            }
        }
        batch.steps.push_back(std::move(step));
    }
    return batch;
}

PredictionBatch apply_noise(const PredictionBatch& batch, const NoiseChannel& channel,
                            std::uint64_t seed) {
    require_valid(channel);
    if (channel.kind == NoiseKind::none) return batch;

    Rng rng(derive_seed(seed, "noise"));
    PredictionBatch out = batch;
    const Index n = batch.num_states;
    for (auto& step : out.steps) {
        for (Index r = 0; r < step.rows.rows(); ++r) {
            if (channel.kind == NoiseKind::uniform_mix) {
                const double eta = channel.parameter;
                step.rows.row(r) =
                    (1.0 - eta) * step.rows.row(r) + Eigen::RowVectorXd::Constant(n, eta / n);
            } else {
                // Dirichlet centered near the row; the uniform floor keeps
                // one-hot rows from collapsing to a point mass.
                Vec alpha = channel.parameter *
                            (step.rows.row(r).transpose() + Vec::Constant(n, 1.0 / n));
                step.rows.row(r) = rng.dirichlet(alpha).transpose();
            }
        }
    }
    const bool identity = channel.kind == NoiseKind::uniform_mix && channel.parameter == 0.0;
    out.accurate = batch.accurate && identity;
    return out;
}

Vec conditioned_transition(const TabularMdp& mdp, const OneStepPrediction& sigma, Index s,
                           Index a) {
    if (s < 0 || s >= mdp.num_states || a < 0 || a >= mdp.num_actions)
        throw std::invalid_argument("state or action out of range");
    const Index slot = sigma.slot_of(a);
    if (slot >= 0) return sigma.rows.row(sigma.row_index(s, slot)).transpose();
    return mdp.transition_row(s, a).transpose();
}

PredictionOracle::PredictionOracle(TabularMdp mdp, PredictionSpec spec, NoiseChannel channel,
                                   std::uint64_t seed)
    : mdp_(std::move(mdp)), spec_(std::move(spec)), channel_(channel), master_seed_(seed) {
    require_valid(spec_, mdp_);
    require_valid(channel_);
}

PredictionBatch PredictionOracle::next() {
    const std::uint64_t draw_seed = derive_seed(master_seed_, "oracle-draw", draws_++);
    PredictionBatch accurate = sample_realization(mdp_, spec_, draw_seed);
    if (channel_.kind == NoiseKind::none) return accurate;
    return apply_noise(accurate, channel_, derive_seed(draw_seed, "oracle-noise"));
}

Vec estimate_error_per_step(const PredictionBatch& accurate, const PredictionBatch& noisy) {
    if (accurate.horizon() != noisy.horizon() || accurate.num_states != noisy.num_states)
        throw std::invalid_argument("prediction batches have different shapes");
    Vec eps(accurate.horizon());
    for (int k = 0; k < accurate.horizon(); ++k) {
        const Mat& a = accurate.steps[k].rows;
        const Mat& b = noisy.steps[k].rows;
        if (a.rows() != b.rows() || a.cols() != b.cols())
            throw std::invalid_argument("prediction batches have different shapes");
        eps[k] = 0.5 * (a - b).cwiseAbs().rowwise().sum().maxCoeff();
    }
    return eps;
}

}  // namespace predmdp
