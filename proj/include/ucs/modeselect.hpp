#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ucs/rng.hpp"
#include "ucs/topology.hpp"

namespace ucs {

/// Arm index of each transmission mode in a pair's bandit.
constexpr std::size_t kArmD2D = 0;
constexpr std::size_t kArmCellular = 1;

constexpr std::size_t arm_of(PairMode m) { return m == PairMode::D2D ? kArmD2D : kArmCellular; }
constexpr PairMode mode_of(std::size_t arm) { return arm == kArmD2D ? PairMode::D2D : PairMode::Cellular; }

struct BanditParams {
    double l1 = 2.0;
    double l2 = 2.0;
    double delta = 0.05;
    /// Observation cost per arm (c_k).
    std::vector<double> cost{0.0, 0.0};
};

struct ArmStats {
    std::uint64_t observations = 0; // S_k
    std::uint64_t selections = 0;   // N_k
    double reward_sum = 0.0;
    double mean() const { return observations == 0 ? 0.0 : reward_sum / static_cast<double>(observations); }
};

/// HD-SEE state for one decision maker.
struct BanditState {
    BanditParams params;
    std::vector<ArmStats> arms;
    std::uint64_t epoch = 0; // t: completed decisions
    /// sum_k (gap_k * N_k + c_k * S_k), accrued when true means are supplied.
    double realized_regret = 0.0;

    explicit BanditState(BanditParams p = {}, std::size_t arm_count = 2) : params(std::move(p)), arms(arm_count) {}
};

/// Intermediate quantities of one HD-SEE decision, exposed for inspection.
struct HdseeDecision {
    std::size_t chosen = 0;
    std::size_t estimated_best = 0;
    bool initializing = false;
    bool exploring = false;
    double log_term = 0.0;          // log(t K / delta)
    std::vector<double> gap;        // estimated suboptimality gap
    std::vector<double> j;          // J_k
    std::vector<double> control;    // D_k (may be +inf)
};

/// Evaluates HD-SEE at the current epoch. Arms never observed are played first,
/// in index order. Otherwise the estimated best arm is played when every arm
/// has S_k >= D_k; else exploration picks uniformly among the arms with
/// S_k < D_k (no draw when there is only one such arm).
HdseeDecision hdsee_evaluate(const BanditState& state, Rng& rng);
std::size_t hdsee_select(const BanditState& state, Rng& rng);

/// Records that `arm` was played and its reward observed (beta_t = 1).
/// With `true_means`, the realized regret ledger accrues gap + observation cost.
void hdsee_update(BanditState& state, std::size_t arm, double reward,
                  std::optional<std::span<const double>> true_means = std::nullopt);

/// Mode reward from exclusion-region sizes: -|E_D2D| in D2D mode,
/// -(|E_Up| + |E_Down|) in cellular mode. Sizes are already averaged over the
/// pair's carrier groups.
double mode_reward(PairMode mode, double er_d2d, double er_uplink, double er_downlink);

/// Direct comparison rule: cellular when |E_D2D| > |E_Up| + |E_Down|, D2D when
/// smaller, unchanged on a tie.
PairMode greedy_mode(double er_d2d, double er_cellular_sum, PairMode current);

} // namespace ucs
