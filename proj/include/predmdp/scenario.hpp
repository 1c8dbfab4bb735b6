#pragma once

#include "predmdp/prediction.hpp"

#include <vector>

namespace predmdp {

/// Weighted collection of prediction batches standing in for the batch
/// distribution in every outer expectation. Weights sum to 1; all
/// scenarios share the same (K, A-) shape.
struct ScenarioSet {
    std::vector<PredictionBatch> scenarios;
    Vec weights;  // same length as scenarios

    int horizon() const { return scenarios.empty() ? 0 : scenarios.front().horizon(); }
};

/// Uniformly weighted scenario set over the given batches.
ScenarioSet uniform_scenarios(std::vector<PredictionBatch> batches);

void require_valid(const ScenarioSet& set);

/// True when every scenario is an accurate realization covering all
/// actions of the MDP, which enables the deterministic planning shortcut.
bool all_accurate_full_coverage(const ScenarioSet& set, const TabularMdp& mdp);

}  // namespace predmdp
