#include "predmdp/envs.hpp"

#include <stdexcept>

namespace predmdp {

TabularMdp build_random_mdp(Index num_states, Index num_actions, double discount,
                            std::uint64_t seed) {
    TabularMdp mdp = make_mdp(num_states, num_actions, discount);
    Rng rng(derive_seed(seed, "random-mdp"));
    for (Index s = 0; s < num_states; ++s)
        for (Index a = 0; a < num_actions; ++a)
            mdp.transition.row(mdp.row(s, a)) = rng.simplex(num_states).transpose();
    for (Index s = 0; s < num_states; ++s)
        for (Index a = 0; a < num_actions; ++a) mdp.reward(s, a) = rng.uniform();
    return mdp;
}

namespace {

void require_stochastic(const Mat& table, const char* what) {
    for (Index r = 0; r < table.rows(); ++r) {
        if ((table.row(r).array() < 0.0).any() || std::abs(table.row(r).sum() - 1.0) > kRowSumTol)
            throw std::invalid_argument(std::string(what) + " row " + std::to_string(r) +
                                        " is not a probability vector");
    }
}

}  // namespace

SplittableMdp compose_splittable(const Mat& chain, const Mat& dependent_kernel,
                                 Index num_actions) {
    if (chain.rows() != chain.cols() || chain.rows() < 1)
        throw std::invalid_argument("chain must be a square stochastic matrix");
    if (num_actions < 1) throw std::invalid_argument("need at least one action");
    if (dependent_kernel.rows() % num_actions != 0 ||
        dependent_kernel.rows() / num_actions != dependent_kernel.cols())
        throw std::invalid_argument("dependent kernel shape does not match the action count");
    require_stochastic(chain, "chain");
    require_stochastic(dependent_kernel, "dependent kernel");

    SplittableMdp split;
    split.chain = chain;
    split.dependent = dependent_kernel;
    split.num_markov = chain.rows();
    split.num_dependent = dependent_kernel.cols();
    split.num_actions = num_actions;
    return split;
}

TabularMdp splittable_to_tabular(const SplittableMdp& split, double discount,
                                 const std::function<double(Index, Index, Index)>& reward,
                                 const std::function<bool(Index, Index, Index)>& feasible) {
    const Index S = split.num_markov * split.num_dependent;
    TabularMdp mdp = make_mdp(S, split.num_actions, discount);
    if (feasible) mdp.feasible = BoolGrid::Constant(S, split.num_actions, true);

    for (Index sm = 0; sm < split.num_markov; ++sm) {
        for (Index sd = 0; sd < split.num_dependent; ++sd) {
            const Index s = split.product_state(sm, sd);
            for (Index a = 0; a < split.num_actions; ++a) {
                auto row = mdp.transition.row(mdp.row(s, a));
                const auto dep_row = split.dependent.row(sd * split.num_actions + a);
                for (Index sm2 = 0; sm2 < split.num_markov; ++sm2) {
                    const double pm = split.chain(sm, sm2);
                    if (pm == 0.0) continue;
                    for (Index sd2 = 0; sd2 < split.num_dependent; ++sd2)
                        row[split.product_state(sm2, sd2)] = pm * dep_row[sd2];
                }
                mdp.reward(s, a) = reward(sm, sd, a);
                if (feasible) mdp.feasible(s, a) = feasible(sm, sd, a);
            }
        }
    }
    return mdp;
}

}  // namespace predmdp
