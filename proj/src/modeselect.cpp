#include "ucs/modeselect.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ucs {

HdseeDecision hdsee_evaluate(const BanditState& state, Rng& rng)
{
    const std::size_t k_arms = state.arms.size();
    if (k_arms == 0) {
        throw std::invalid_argument("hdsee: no arms");
    }
    HdseeDecision out;
    out.gap.assign(k_arms, 0.0);
    out.j.assign(k_arms, 0.0);
    out.control.assign(k_arms, 0.0);

    for (std::size_t k = 0; k < k_arms; ++k) {
        if (state.arms[k].observations == 0) {
            out.initializing = true;
            out.chosen = k;
            out.estimated_best = k;
            return out;
        }
    }

    const auto& p = state.params;
    const double t = static_cast<double>(std::max<std::uint64_t>(state.epoch, 1));
    out.log_term = std::log(t * static_cast<double>(k_arms) / p.delta);

    std::size_t best = 0;
    for (std::size_t k = 1; k < k_arms; ++k) {
        if (state.arms[k].mean() > state.arms[best].mean()) {
            best = k;
        }
    }
    out.estimated_best = best;

    const double inf = std::numeric_limits<double>::infinity();
    double min_j_sq = inf;
    const auto s_best = static_cast<double>(state.arms[best].observations);
    for (std::size_t k = 0; k < k_arms; ++k) {
        if (k == best) {
            continue;
        }
        out.gap[k] = state.arms[best].mean() - state.arms[k].mean();
        const double s_min = std::min(static_cast<double>(state.arms[k].observations), s_best);
        out.j[k] = std::max(0.0, out.gap[k] - 2.0 * std::sqrt(p.l1 * out.log_term / s_min));
        const double j_sq = out.j[k] * out.j[k];
        out.control[k] = j_sq > 0.0 ? p.l2 * out.log_term / j_sq : inf;
        min_j_sq = std::min(min_j_sq, j_sq);
    }
    out.control[best] = (k_arms > 1 && min_j_sq > 0.0) ? p.l2 * out.log_term / min_j_sq : (k_arms > 1 ? inf : 0.0);

    std::vector<std::size_t> under;
    for (std::size_t k = 0; k < k_arms; ++k) {
        if (static_cast<double>(state.arms[k].observations) < out.control[k]) {
            under.push_back(k);
        }
    }
    if (under.empty()) {
        out.chosen = best;
        return out;
    }
    out.exploring = true;
    // With two arms and only the suboptimal one short of its control number,
    // this is the plain "explore the suboptimal arm" step.
    out.chosen = under.size() == 1 ? under.front() : under[rng.below(under.size())];
    return out;
}

std::size_t hdsee_select(const BanditState& state, Rng& rng)
{
    return hdsee_evaluate(state, rng).chosen;
}

void hdsee_update(BanditState& state, std::size_t arm, double reward,
                  std::optional<std::span<const double>> true_means)
{
    ArmStats& a = state.arms.at(arm);
    ++a.selections;
    ++a.observations;
    a.reward_sum += reward;
    ++state.epoch;
    const double cost = arm < state.params.cost.size() ? state.params.cost[arm] : 0.0;
    if (true_means) {
        double best = -std::numeric_limits<double>::infinity();
        for (double m : *true_means) {
            best = std::max(best, m);
        }
        state.realized_regret += (best - (*true_means)[arm]) + cost;
    }
}

double mode_reward(PairMode mode, double er_d2d, double er_uplink, double er_downlink)
{
    return mode == PairMode::D2D ? -er_d2d : -(er_uplink + er_downlink);
}

PairMode greedy_mode(double er_d2d, double er_cellular_sum, PairMode current)
{
    if (er_d2d > er_cellular_sum) {
        return PairMode::Cellular;
    }
    if (er_d2d < er_cellular_sum) {
        return PairMode::D2D;
    }
    return current;
}

} // namespace ucs
