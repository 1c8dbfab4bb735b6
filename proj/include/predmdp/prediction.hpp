#pragma once

#include "predmdp/mdp.hpp"
#include "predmdp/rng.hpp"

#include <cstdint>
#include <vector>

namespace predmdp {

/// Shape of the prediction structure: horizon K, the predictable action
/// subset, and the error magnitude knob used when building noise channels.
struct PredictionSpec {
    int horizon = 1;
    std::vector<Index> predictable_actions;  // sorted, unique
    double noise_level = 0.0;
};

void require_valid(const PredictionSpec& spec, const TabularMdp& mdp);

/**
 * One-step stochastic prediction matrix: a row per (s, a) pair with a in
 * the predictable set, row index s*|A-| + j where j indexes the sorted
 * predictable action list. Accurate realizations are one-hot rows.
 */
struct OneStepPrediction {
    Mat rows;                                // (|S|*|A-|) x |S|
    std::vector<Index> predictable_actions;  // sorted, unique

    Index row_index(Index s, Index predictable_slot) const {
        return s * static_cast<Index>(predictable_actions.size()) + predictable_slot;
    }

    /// Slot of action a in the predictable list, or -1 when not predictable.
    Index slot_of(Index a) const;
};

/// Ordered K-step sequence (sigma_1, ..., sigma_K). `accurate` marks
/// batches whose rows are exact one-hot realizations.
struct PredictionBatch {
    std::vector<OneStepPrediction> steps;
    Index num_states = 0;
    bool accurate = false;

    int horizon() const { return static_cast<int>(steps.size()); }
    const std::vector<Index>& predictable_actions() const;
    bool full_coverage(const TabularMdp& mdp) const;
};

enum class NoiseKind { none, uniform_mix, dirichlet_jitter };

/// Corruption model applied to accurate realizations. uniform_mix blends
/// each row with the uniform distribution: (1-eta) row + eta/|S|.
/// dirichlet_jitter resamples each row from a Dirichlet concentrated
/// around it. kind none is the identity.
struct NoiseChannel {
    NoiseKind kind = NoiseKind::none;
    double parameter = 0.0;  // eta for uniform_mix, concentration for dirichlet_jitter
};

void require_valid(const NoiseChannel& channel);

/// Draws an accurate realization batch: K matrices whose rows are
/// independent categorical draws from the corresponding kernel rows,
/// i.i.d. across steps. Deterministic under a fixed seed.
PredictionBatch sample_realization(const TabularMdp& mdp, const PredictionSpec& spec,
                                   std::uint64_t seed);

/// Applies the noise channel row by row. Rows stay valid probability
/// vectors; the output is flagged accurate only for the identity channel.
PredictionBatch apply_noise(const PredictionBatch& batch, const NoiseChannel& channel,
                            std::uint64_t seed);

/// Conditional transition row: the sigma row for predictable actions,
/// the MDP kernel row otherwise.
Vec conditioned_transition(const TabularMdp& mdp, const OneStepPrediction& sigma, Index s,
                           Index a);

/**
 * Sampler handle yielding i.i.d. prediction batches: each draw realizes
 * an accurate batch and pushes it through the channel. The stream is
 * reproducible from the seed; one consumer per handle.
 */
class PredictionOracle {
public:
    PredictionOracle(TabularMdp mdp, PredictionSpec spec, NoiseChannel channel,
                     std::uint64_t seed);

    PredictionBatch next();

    const PredictionSpec& spec() const { return spec_; }

private:
    TabularMdp mdp_;
    PredictionSpec spec_;
    NoiseChannel channel_;
    std::uint64_t master_seed_;
    std::uint64_t draws_ = 0;
};

/// Per-step prediction error (eps_1..eps_K): the maximum over rows of the
/// Wasserstein-1 distance under the discrete state metric, which equals
/// the total variation distance (half the L1 row difference).
Vec estimate_error_per_step(const PredictionBatch& accurate, const PredictionBatch& noisy);

}  // namespace predmdp
