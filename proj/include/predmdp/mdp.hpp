#pragma once

#include "predmdp/types.hpp"

#include <string>
#include <vector>

namespace predmdp {

/**
 * Finite discounted MDP (S, A, P, r, gamma) in tabular form.
 *
 * Transition rows are stored as a dense (|S|*|A|) x |S| matrix with row
 * index s*|A| + a. Rewards live in [0,1]. The optional feasibility grid
 * masks actions at planning time (every state must keep at least one
 * feasible action); transition rows of masked pairs must still be valid
 * probability rows but are never consulted by the solvers.
 */
struct TabularMdp {
    Index num_states = 0;
    Index num_actions = 0;
    Mat transition;  // (S*A) x S
    Mat reward;      // S x A
    double discount = 0.0;
    BoolGrid feasible;  // S x A; empty means all-feasible

    Index row(Index s, Index a) const { return s * num_actions + a; }

    bool is_feasible(Index s, Index a) const {
        return feasible.size() == 0 || feasible(s, a);
    }

    /// Transition row P(.|s,a).
    auto transition_row(Index s, Index a) const { return transition.row(row(s, a)); }
};

TabularMdp make_mdp(Index num_states, Index num_actions, double discount);

struct Violation {
    std::string what;
    Index state = -1;
    Index action = -1;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

/// Checks all structural invariants: row sums within 1e-9 of one,
/// non-negative probabilities, rewards in [0,1], discount in (0,1),
/// and at least one feasible action per state when a mask is present.
ValidationReport validate_mdp(const TabularMdp& mdp);

/// Throws std::invalid_argument listing the violations when validation fails.
void require_valid(const TabularMdp& mdp);

/// Explicit repair: clamps tiny negatives to zero and renormalizes every
/// transition row. Never applied implicitly.
TabularMdp repair_rows(const TabularMdp& mdp);

}  // namespace predmdp
