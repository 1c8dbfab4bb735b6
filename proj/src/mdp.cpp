#include "predmdp/mdp.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace predmdp {

TabularMdp make_mdp(Index num_states, Index num_actions, double discount) {
    if (num_states < 1 || num_actions < 1)
        throw std::invalid_argument("MDP needs at least one state and one action");
    TabularMdp mdp;
    mdp.num_states = num_states;
    mdp.num_actions = num_actions;
    mdp.discount = discount;
    mdp.transition = Mat::Zero(num_states * num_actions, num_states);
    mdp.reward = Mat::Zero(num_states, num_actions);
    return mdp;
}

ValidationReport validate_mdp(const TabularMdp& mdp) {
    ValidationReport report;
    auto add = [&](std::string what, Index s, Index a) {
        report.violations.push_back({std::move(what), s, a});
    };

    if (mdp.num_states < 1) add("num_states must be positive", -1, -1);
    if (mdp.num_actions < 1) add("num_actions must be positive", -1, -1);
    if (!(mdp.discount > 0.0 && mdp.discount < 1.0))
        add("discount must lie in (0,1)", -1, -1);
    if (mdp.transition.rows() != mdp.num_states * mdp.num_actions ||
        mdp.transition.cols() != mdp.num_states) {
        add("transition table has wrong shape", -1, -1);
        return report;
    }
    if (mdp.reward.rows() != mdp.num_states || mdp.reward.cols() != mdp.num_actions) {
        add("reward table has wrong shape", -1, -1);
        return report;
    }

    for (Index s = 0; s < mdp.num_states; ++s) {
        for (Index a = 0; a < mdp.num_actions; ++a) {
            const auto row = mdp.transition_row(s, a);
            if ((row.array() < 0.0).any()) add("negative transition probability", s, a);
            if (std::abs(row.sum() - 1.0) > kRowSumTol) add("transition row does not sum to 1", s, a);
            const double r = mdp.reward(s, a);
            if (!(r >= 0.0 && r <= 1.0)) add("reward out of [0,1]", s, a);
        }
        if (mdp.feasible.size() != 0) {
            bool any = false;
            for (Index a = 0; a < mdp.num_actions; ++a) any = any || mdp.feasible(s, a);
            if (!any) add("state has no feasible action", s, -1);
        }
    }
    return report;
}

void require_valid(const TabularMdp& mdp) {
    const auto report = validate_mdp(mdp);
    if (report.ok()) return;
    std::ostringstream msg;
    msg << "invalid MDP:";
    for (const auto& v : report.violations) {
        msg << " [" << v.what;
        if (v.state >= 0) msg << " at s=" << v.state;
        if (v.action >= 0) msg << ",a=" << v.action;
        msg << "]";
    }
    throw std::invalid_argument(msg.str());
}

TabularMdp repair_rows(const TabularMdp& mdp) {
    TabularMdp out = mdp;
    for (Index r = 0; r < out.transition.rows(); ++r) {
        auto row = out.transition.row(r);
        row = row.cwiseMax(0.0);
        const double total = row.sum();
        if (total <= 0.0) throw std::invalid_argument("cannot repair an all-zero transition row");
        row /= total;
    }
    return out;
}

}  // namespace predmdp
