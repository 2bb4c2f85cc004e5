#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "ucs/channel.hpp"
#include "ucs/modeselect.hpp"
#include "ucs/prk.hpp"
#include "ucs/signalmap.hpp"
#include "ucs/topology.hpp"

namespace ucs {

enum class SchedulerKind : std::uint8_t { Ucs, IOrder };
enum class ModeSelectKind : std::uint8_t { Bandit, Greedy };
enum class TrafficKind : std::uint8_t { FullBuffer, Poisson };

std::string_view to_string(SchedulerKind kind);
std::string_view to_string(ModeSelectKind kind);
std::string_view to_string(TrafficKind kind);

struct TrafficConfig {
    TrafficKind kind = TrafficKind::FullBuffer;
    /// Packets offered per link per slot under full buffer.
    std::uint32_t full_buffer_demand = 1;
    /// Mean Poisson arrivals per link per slot.
    double poisson_rate = 0.5;
    /// Queue cap under Poisson traffic; arrivals beyond it are dropped.
    std::uint32_t queue_limit = 1000;
};

struct SimConfig {
    TopologyConfig topology;
    ChannelModel channel;
    std::uint32_t carriers = 50;
    std::uint32_t group_size = 25;
    std::uint64_t slots = 10000;
    std::uint32_t feedback_period = 200;
    /// EWMA weight of the signal-map gain estimator.
    double alpha_gain = 0.1;
    /// Fading samples averaged into one gain report per map entry and period.
    std::uint32_t gain_report_window = 50;
    EstimatorParams estimator;
    PrkParams prk;
    SchedulerKind scheduler = SchedulerKind::Ucs;
    ModeSelectKind mode_select = ModeSelectKind::Bandit;
    BanditParams bandit;
    TrafficConfig traffic;
    std::uint64_t seed = 1;
    /// Slots excluded from the post-warm-up link statistics.
    std::uint64_t warmup_slots = 2000;
    /// Keep the per-(slot, carrier) ACTIVE counts (needed for slots.csv).
    bool record_slots = true;

    void validate() const;
};

struct LinkMetrics {
    LinkId id = 0;
    LinkKind kind = LinkKind::Uplink;
    std::optional<PairId> pair;
    double target = 0.0;
    double tx_power_dbm = 0.0;
    std::uint64_t attempted = 0;
    std::uint64_t delivered = 0;
    std::uint64_t attempted_after_warmup = 0;
    std::uint64_t delivered_after_warmup = 0;

    std::optional<double> mean_pdr() const;
    std::optional<double> mean_pdr_after_warmup() const;
};

/// One (period, link, group) controller snapshot, taken after adaptation.
struct PrkRecord {
    std::uint64_t period = 0;
    LinkId link = 0;
    GroupId group = 0;
    double k = 0.0;
    std::uint32_t er_size = 0;
    std::optional<double> y;
    std::uint64_t attempted = 0;
    std::uint64_t delivered = 0;
};

struct ModeRecord {
    std::uint64_t epoch = 0;
    PairId pair = 0;
    PairMode observed = PairMode::Cellular; // mode that ran during the epoch
    PairMode chosen = PairMode::Cellular;   // mode for the next epoch
    double reward = 0.0;
    double mu_hat_d2d = 0.0;
    double mu_hat_cellular = 0.0;
    double er_d2d = 0.0;
    double er_cellular = 0.0; // |E_Up| + |E_Down|
    double realized_regret = 0.0;
};

struct OverheadRecord {
    std::uint64_t period = 0;
    std::uint64_t gain_entries = 0; // over-the-air UE -> BS gain reports
    std::uint64_t x2_entries = 0;   // inter-BS entries (schedule states + K values)
    std::uint64_t rounds_total = 0;
    std::uint32_t rounds_max = 0;
};

struct PairSummary {
    PairId pair = 0;
    PairMode final_mode = PairMode::Cellular;
    std::uint64_t d2d_epochs_after_warmup = 0;
    std::uint64_t epochs_after_warmup = 0;
    /// Final ER sizes of each mode's links (group-averaged, retained K values).
    double er_d2d = 0.0;
    double er_uplink = 0.0;
    double er_downlink = 0.0;
};

struct Metrics {
    Network network;
    std::uint32_t carriers = 0;
    std::uint64_t slots = 0;
    std::uint64_t warmup_slots = 0;
    std::vector<LinkMetrics> links;
    /// ACTIVE count per (slot, carrier), row-major by slot; empty unless recorded.
    std::vector<std::uint16_t> slot_active;
    std::vector<PrkRecord> prk;
    std::vector<ModeRecord> modes;
    std::vector<OverheadRecord> overhead;
    std::vector<PairSummary> pairs;

    std::uint64_t transmissions = 0;
    std::uint64_t delivered = 0;
    std::uint64_t failed = 0;
    std::uint64_t schedules_checked = 0;
    std::uint64_t rounds_total = 0;
    std::uint32_t rounds_max = 0;

    /// Mean over post-warm-up (slot, carrier) cells that carry at least one
    /// link of the number of links sharing the carrier.
    double reuse_rate = 0.0;
    /// Same numerator averaged over every (slot, carrier) cell.
    double reuse_rate_all_carriers = 0.0;
};

/// Runs one deterministic simulation. Throws ConfigError before slot 0 on an
/// invalid configuration and InvariantViolation if a schedule breaks
/// independence/maximality (UCS) or a receiver budget (iOrder).
Metrics run(const SimConfig& cfg);

/// Over-the-air gain entries per feedback period:
/// ues * neighbors * ceil(carriers / group_size). Throws on group_size == 0.
std::uint64_t control_overhead(std::uint64_t ues, std::uint64_t neighbors_per_ue, std::uint64_t carriers,
                               std::uint64_t group_size);

} // namespace ucs
