#include "ucs/engine.hpp"

#include <algorithm>
#include <memory>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "ucs/baseline.hpp"
#include "ucs/errors.hpp"
#include "ucs/scheduler.hpp"
#include "ucs/units.hpp"

namespace ucs {

std::string_view to_string(SchedulerKind kind)
{
    return kind == SchedulerKind::IOrder ? "iorder" : "ucs";
}

std::string_view to_string(ModeSelectKind kind)
{
    return kind == ModeSelectKind::Greedy ? "greedy" : "bandit";
}

std::string_view to_string(TrafficKind kind)
{
    return kind == TrafficKind::Poisson ? "poisson" : "full_buffer";
}

void SimConfig::validate() const
{
    topology.validate();
    channel.validate();
    if (group_size > carriers || group_size == 0 || carriers == 0) {
        throw ConfigError("prk.group_size must lie in [1, prk.carriers]");
    }
    if (slots == 0) {
        throw ConfigError("run.slots must be >= 1");
    }
    if (feedback_period == 0) {
        throw ConfigError("prk.feedback_period must be >= 1");
    }
    if (!(alpha_gain > 0.0 && alpha_gain <= 1.0) || !(estimator.alpha > 0.0 && estimator.alpha <= 1.0)) {
        throw ConfigError("prk.alpha_gain and prk.alpha_pdr must lie in (0, 1]");
    }
    if (!(prk.k_min > 0.0) || !(prk.k_max >= prk.k_min)) {
        throw ConfigError("prk: need 0 < k_min <= k_max");
    }
    if (!(prk.hysteresis >= 0.0) || !(prk.epsilon > 0.0 && prk.epsilon < 0.5)) {
        throw ConfigError("prk: hysteresis must be >= 0 and epsilon in (0, 0.5)");
    }
    if (!(bandit.l1 > 0.0) || !(bandit.l2 > 0.0) || !(bandit.delta > 0.0 && bandit.delta < 1.0)) {
        throw ConfigError("modeselect: need l1 > 0, l2 > 0 and delta in (0, 1)");
    }
    if (bandit.cost.size() != 2 || bandit.cost[0] < 0.0 || bandit.cost[1] < 0.0) {
        throw ConfigError("modeselect: observation costs must be two non-negative numbers");
    }
    if (traffic.kind == TrafficKind::FullBuffer && traffic.full_buffer_demand == 0) {
        throw ConfigError("traffic.demand_per_slot must be >= 1");
    }
    if (traffic.kind == TrafficKind::Poisson && !(traffic.poisson_rate >= 0.0)) {
        throw ConfigError("traffic.rate must be >= 0");
    }
}

std::optional<double> LinkMetrics::mean_pdr() const
{
    if (attempted == 0) {
        return std::nullopt;
    }
    return static_cast<double>(delivered) / static_cast<double>(attempted);
}

std::optional<double> LinkMetrics::mean_pdr_after_warmup() const
{
    if (attempted_after_warmup == 0) {
        return std::nullopt;
    }
    return static_cast<double>(delivered_after_warmup) / static_cast<double>(attempted_after_warmup);
}

std::uint64_t control_overhead(std::uint64_t ues, std::uint64_t neighbors_per_ue, std::uint64_t carriers,
                               std::uint64_t group_size)
{
    if (group_size == 0) {
        throw std::invalid_argument("control_overhead: group size must be >= 1");
    }
    const std::uint64_t groups = (carriers + group_size - 1) / group_size;
    return ues * neighbors_per_ue * groups;
}

namespace {

// Independent random streams of one run.
enum Stream : std::uint64_t { kTopology = 1, kFading, kOutcome, kTraffic, kReports, kBandit, kCarrierGains };

class Simulation {
public:
    explicit Simulation(const SimConfig& cfg)
        : cfg_(cfg),
          master_(cfg.seed),
          fading_rng_(master_.fork(kFading)),
          outcome_rng_(master_.fork(kOutcome)),
          traffic_rng_(master_.fork(kTraffic)),
          report_rng_(master_.fork(kReports)),
          bandit_rng_(master_.fork(kBandit)),
          grouping_(cfg.carriers, cfg.group_size)
    {
        Rng topo = master_.fork(kTopology);
        net_ = generate_topology(cfg.topology, topo);
        Rng carrier_rng = master_.fork(kCarrierGains);
        gains_ = PathGainTable(net_, cfg.channel, cfg.carriers, carrier_rng);
        neighbors_ = sensing_neighbors(net_, cfg.topology.sensing_radius_m);
        transmitters_ = net_.transmitters();

        const std::size_t n_nodes = net_.nodes.size();
        const std::size_t n_links = net_.links.size();
        const std::uint32_t n_groups = grouping_.group_count();

        maps_.reserve(n_nodes * n_groups);
        for (GroupId g = 0; g < n_groups; ++g) {
            for (NodeId id = 0; id < n_nodes; ++id) {
                maps_.emplace_back(id, n_nodes, cfg.alpha_gain);
            }
        }
        report_gains();

        candidates_.resize(n_links);
        for (const Link& l : net_.links) {
            if (!map(l.rx, 0).contains(l.tx)) {
                throw ConfigError("link " + std::to_string(l.id) +
                                  ": receiver cannot sense its transmitter (check topology.sensing_radius_m)");
            }
            candidates_[l.id] = interferer_candidates(map(l.rx, 0), l, transmitters_);
        }

        states_.resize(n_links * n_groups);
        for (const Link& l : net_.links) {
            for (GroupId g = 0; g < n_groups; ++g) {
                PrkState& s = state(l.id, g);
                s.link = l.id;
                s.group = g;
                s.k = init_k(net_, map(l.rx, g), l, candidates_[l.id], cfg.channel, cfg.prk);
                s.target = l.pdr_target;
                s.estimator = ReliabilityEstimator(cfg.estimator);
            }
        }

        present_.assign(n_links, 1);
        for (const CommPair& p : net_.pairs) {
            for (LinkId id : p.links_for(PairMode::D2D)) {
                present_[id] = 0;
            }
        }
        bandits_.assign(net_.pairs.size(), BanditState(cfg.bandit));
        pair_d2d_epochs_.assign(net_.pairs.size(), 0);
        pair_epochs_.assign(net_.pairs.size(), 0);

        cell_of_link_.resize(n_links);
        for (const Link& l : net_.links) {
            cell_of_link_[l.id] = net_.scheduling_cell(l.id);
        }
        carrier_ids_.resize(cfg.carriers);
        std::iota(carrier_ids_.begin(), carrier_ids_.end(), 0U);
        queue_.assign(n_links, 0);

        er_.assign(n_links * n_groups, {});
        refresh_exclusion_regions();
        rebuild_conflict_graphs();

        metrics_.carriers = cfg.carriers;
        metrics_.slots = cfg.slots;
        metrics_.warmup_slots = cfg.warmup_slots;
        metrics_.links.resize(n_links);
        for (const Link& l : net_.links) {
            LinkMetrics& m = metrics_.links[l.id];
            m.id = l.id;
            m.kind = l.kind;
            m.pair = l.pair;
            m.target = l.pdr_target;
            m.tx_power_dbm = net_.nodes[l.tx].tx_power_dbm;
        }
        if (cfg.record_slots) {
            metrics_.slot_active.assign(cfg.slots * cfg.carriers, 0);
        }
        period_attempted_.assign(n_links * n_groups, 0);
        period_delivered_.assign(n_links * n_groups, 0);
    }

    Metrics run()
    {
        double reuse_sum = 0.0;
        std::uint64_t reuse_cells = 0;
        std::uint64_t active_after_warmup = 0;
        std::uint64_t slots_after_warmup = 0;

        for (std::uint64_t t = 0; t < cfg_.slots; ++t) {
            const auto demands = offered_demand();
            SlotSchedule sched = cfg_.scheduler == SchedulerKind::Ucs
                                     ? schedule_slot(t, demands, graph_of_carrier_, carrier_ids_, cell_of_link_)
                                     : iorder_schedule(t, demands, net_, gains_, carrier_ids_, cfg_.channel);
            verify(sched);
            transmit(t, sched);

            const bool after_warmup = t >= cfg_.warmup_slots;
            for (std::size_t c = 0; c < sched.active.size(); ++c) {
                const auto count = sched.active[c].size();
                if (cfg_.record_slots) {
                    metrics_.slot_active[t * cfg_.carriers + c] = static_cast<std::uint16_t>(count);
                }
                if (after_warmup) {
                    active_after_warmup += count;
                    if (count > 0) {
                        reuse_sum += static_cast<double>(count);
                        ++reuse_cells;
                    }
                }
            }
            slots_after_warmup += after_warmup ? 1 : 0;
            period_rounds_total_ += sched.rounds;
            period_rounds_max_ = std::max(period_rounds_max_, sched.rounds);
            period_x2_ += sched.x2_entries;
            metrics_.rounds_total += sched.rounds;
            metrics_.rounds_max = std::max(metrics_.rounds_max, sched.rounds);

            if ((t + 1) % cfg_.feedback_period == 0) {
                end_period((t + 1) / cfg_.feedback_period - 1);
            }
        }

        metrics_.reuse_rate = reuse_cells == 0 ? 0.0 : reuse_sum / static_cast<double>(reuse_cells);
        metrics_.reuse_rate_all_carriers =
            slots_after_warmup == 0
                ? 0.0
                : static_cast<double>(active_after_warmup) / static_cast<double>(slots_after_warmup * cfg_.carriers);
        finalize_pairs();
        metrics_.network = net_;
        return std::move(metrics_);
    }

private:
    PrkState& state(LinkId l, GroupId g) { return states_[l * grouping_.group_count() + g]; }
    std::vector<NodeId>& er(LinkId l, GroupId g) { return er_[l * grouping_.group_count() + g]; }
    SignalMap& map(NodeId node, GroupId g) { return maps_[g * net_.nodes.size() + node]; }

    void report_gains()
    {
        std::vector<double> samples(std::max<std::uint32_t>(cfg_.gain_report_window, 1));
        for (GroupId g = 0; g < grouping_.group_count(); ++g) {
            const auto range = grouping_.group(g);
            for (NodeId r = 0; r < net_.nodes.size(); ++r) {
                for (NodeId from : neighbors_[r]) {
                    for (double& s : samples) {
                        s = sample_fading(cfg_.channel, report_rng_);
                    }
                    const double mean = gains_.mean_gain_db(from, r, range.first, range.last);
                    map(r, g).update_gain(from, gain_report_db(mean, samples));
                }
            }
        }
    }

    std::vector<std::uint32_t> offered_demand()
    {
        std::vector<std::uint32_t> d(net_.links.size(), 0);
        for (LinkId l = 0; l < d.size(); ++l) {
            if (!present_[l]) {
                continue;
            }
            if (cfg_.traffic.kind == TrafficKind::FullBuffer) {
                d[l] = cfg_.traffic.full_buffer_demand;
            } else {
                const std::uint64_t arrivals = traffic_rng_.poisson(cfg_.traffic.poisson_rate);
                queue_[l] = static_cast<std::uint32_t>(
                    std::min<std::uint64_t>(queue_[l] + arrivals, cfg_.traffic.queue_limit));
                d[l] = std::min(queue_[l], cfg_.carriers);
            }
        }
        return d;
    }

    void verify(const SlotSchedule& sched)
    {
        ++metrics_.schedules_checked;
        if (cfg_.scheduler == SchedulerKind::Ucs) {
            if (auto v = find_schedule_violation(sched, graph_of_carrier_)) {
                throw InvariantViolation("maximal non-interfering schedule violated: " + *v);
            }
        } else if (!budgets_respected(sched, net_, gains_, cfg_.channel)) {
            throw InvariantViolation("iOrder schedule at slot " + std::to_string(sched.slot) +
                                     " leaves a receiver over budget");
        }
    }

    void transmit(std::uint64_t t, const SlotSchedule& sched)
    {
        const bool after_warmup = t >= cfg_.warmup_slots;
        const double noise = cfg_.channel.noise_mw();
        for (std::size_t c = 0; c < sched.active.size(); ++c) {
            const auto& active = sched.active[c];
            const CarrierId rb = sched.carriers[c];
            const GroupId g = grouping_.group_of(rb);
            for (LinkId i : active) {
                const Link& li = net_.links[i];
                double interference = 0.0;
                for (LinkId k : active) {
                    if (k != i) {
                        interference += gains_.rx_power_mw(net_.links[k].tx, li.rx, rb) *
                                        sample_fading(cfg_.channel, fading_rng_);
                    }
                }
                const double signal = gains_.rx_power_mw(li.tx, li.rx, rb) * sample_fading(cfg_.channel, fading_rng_);
                const double sinr = linear_to_db(signal / (noise + interference));
                const bool ok = outcome_rng_.bernoulli(pdr_from_sinr(sinr, cfg_.channel));

                state(i, g).estimator.record_outcome(ok);
                ++period_attempted_[i * grouping_.group_count() + g];
                LinkMetrics& m = metrics_.links[i];
                ++m.attempted;
                ++metrics_.transmissions;
                if (after_warmup) {
                    ++m.attempted_after_warmup;
                }
                if (ok) {
                    ++m.delivered;
                    ++metrics_.delivered;
                    ++period_delivered_[i * grouping_.group_count() + g];
                    if (after_warmup) {
                        ++m.delivered_after_warmup;
                    }
                    if (cfg_.traffic.kind == TrafficKind::Poisson && queue_[i] > 0) {
                        --queue_[i];
                    }
                } else {
                    ++metrics_.failed;
                }
            }
        }
    }

    void end_period(std::uint64_t period)
    {
        const std::uint32_t n_groups = grouping_.group_count();
        report_gains();

        for (const Link& l : net_.links) {
            if (!present_[l.id]) {
                continue;
            }
            for (GroupId g = 0; g < n_groups; ++g) {
                PrkState& s = state(l.id, g);
                regulate(s, net_, map(l.rx, g), candidates_[l.id], cfg_.channel, cfg_.prk, cfg_.carriers);
            }
        }
        refresh_exclusion_regions();

        for (const Link& l : net_.links) {
            if (!present_[l.id]) {
                continue;
            }
            for (GroupId g = 0; g < n_groups; ++g) {
                PrkState& s = state(l.id, g);
                const std::size_t idx = l.id * n_groups + g;
                metrics_.prk.push_back({period, l.id, g, s.k, static_cast<std::uint32_t>(er(l.id, g).size()),
                                        s.estimator.y(), period_attempted_[idx], period_delivered_[idx]});
            }
        }

        // Over-the-air UE reports; K values of every present link go to the
        // adjacent BSes over X2 (one entry per group).
        OverheadRecord ov;
        ov.period = period;
        for (const Node& n : net_.nodes) {
            if (n.kind == NodeKind::UserEquipment) {
                ov.gain_entries += neighbors_[n.id].size() * n_groups;
            }
        }
        for (const Link& l : net_.links) {
            if (!present_[l.id]) {
                continue;
            }
            const CellId home = cell_of_link_[l.id];
            std::uint64_t adjacent = 0;
            for (CellId c = 0; c < net_.cell_count(); ++c) {
                adjacent += (c != home && net_.neighbor_cells(home, c)) ? 1 : 0;
            }
            period_x2_ += adjacent * n_groups;
        }
        ov.x2_entries = period_x2_;
        ov.rounds_total = period_rounds_total_;
        ov.rounds_max = period_rounds_max_;
        metrics_.overhead.push_back(ov);
        period_x2_ = 0;
        period_rounds_total_ = 0;
        period_rounds_max_ = 0;

        select_modes(period);

        for (auto& s : states_) {
            s.estimator.begin_period();
        }
        std::fill(period_attempted_.begin(), period_attempted_.end(), 0);
        std::fill(period_delivered_.begin(), period_delivered_.end(), 0);
        rebuild_conflict_graphs();
    }

    double mean_er_size(LinkId l)
    {
        const std::uint32_t n_groups = grouping_.group_count();
        double sum = 0.0;
        for (GroupId g = 0; g < n_groups; ++g) {
            sum += static_cast<double>(er(l, g).size());
        }
        return sum / n_groups;
    }

    void select_modes(std::uint64_t period)
    {
        const bool after_warmup = (period + 1) * cfg_.feedback_period > cfg_.warmup_slots;
        for (CommPair& p : net_.pairs) {
            const double e_d2d = mean_er_size(p.d2d);
            const double e_up = mean_er_size(p.uplink);
            const double e_down = mean_er_size(p.downlink);
            const PairMode observed = p.mode;
            const double reward = mode_reward(observed, e_d2d, e_up, e_down);

            PairMode next = observed;
            BanditState& b = bandits_[p.id];
            if (cfg_.mode_select == ModeSelectKind::Bandit) {
                hdsee_update(b, arm_of(observed), reward);
                next = mode_of(hdsee_select(b, bandit_rng_));
            } else {
                next = greedy_mode(e_d2d, e_up + e_down, observed);
            }

            if (after_warmup) {
                ++pair_epochs_[p.id];
                pair_d2d_epochs_[p.id] += observed == PairMode::D2D ? 1 : 0;
            }
            metrics_.modes.push_back({period, p.id, observed, next, reward, b.arms[kArmD2D].mean(),
                                      b.arms[kArmCellular].mean(), e_d2d, e_up + e_down, b.realized_regret});

            if (next != observed) {
                for (LinkId id : p.links_for(observed)) {
                    present_[id] = 0;
                }
                for (LinkId id : p.links_for(next)) {
                    present_[id] = 1;
                }
                p.mode = next;
            }
        }
    }

    void refresh_exclusion_regions()
    {
        const std::uint32_t n_groups = grouping_.group_count();
        for (const Link& l : net_.links) {
            for (GroupId g = 0; g < n_groups; ++g) {
                auto region = exclusion_region(net_, map(l.rx, g), l, state(l.id, g).k, candidates_[l.id]);
                std::sort(region.begin(), region.end());
                er(l.id, g) = std::move(region);
            }
        }
    }

    void rebuild_conflict_graphs()
    {
        if (cfg_.scheduler != SchedulerKind::Ucs) {
            return;
        }
        const std::uint32_t n_groups = grouping_.group_count();
        const std::size_t n_links = net_.links.size();
        if (!present_flags_) {
            present_flags_ = std::make_unique<bool[]>(n_links);
        }
        for (LinkId l = 0; l < n_links; ++l) {
            present_flags_[l] = present_[l] != 0;
        }
        const std::span<const bool> present(present_flags_.get(), n_links);
        std::vector<std::vector<NodeId>> er_of(n_links);
        graphs_.clear();
        graphs_.reserve(n_groups);
        for (GroupId g = 0; g < n_groups; ++g) {
            for (LinkId l = 0; l < n_links; ++l) {
                er_of[l] = er(l, g);
            }
            graphs_.push_back(build_conflict_graph(net_, er_of, present));
        }
        graph_of_carrier_.resize(cfg_.carriers);
        for (CarrierId c = 0; c < cfg_.carriers; ++c) {
            graph_of_carrier_[c] = &graphs_[grouping_.group_of(c)];
        }
    }

    void finalize_pairs()
    {
        for (const CommPair& p : net_.pairs) {
            PairSummary s;
            s.pair = p.id;
            s.final_mode = p.mode;
            s.d2d_epochs_after_warmup = pair_d2d_epochs_[p.id];
            s.epochs_after_warmup = pair_epochs_[p.id];
            s.er_d2d = mean_er_size(p.d2d);
            s.er_uplink = mean_er_size(p.uplink);
            s.er_downlink = mean_er_size(p.downlink);
            metrics_.pairs.push_back(s);
        }
    }

    const SimConfig& cfg_;
    Rng master_;
    Rng fading_rng_;
    Rng outcome_rng_;
    Rng traffic_rng_;
    Rng report_rng_;
    Rng bandit_rng_;
    CarrierGrouping grouping_;

    Network net_;
    PathGainTable gains_;
    std::vector<std::vector<NodeId>> neighbors_;
    std::vector<NodeId> transmitters_;
    std::vector<SignalMap> maps_;
    std::vector<std::vector<NodeId>> candidates_;
    std::vector<PrkState> states_;
    std::vector<std::vector<NodeId>> er_;
    std::vector<char> present_;
    std::vector<BanditState> bandits_;
    std::vector<std::uint64_t> pair_d2d_epochs_;
    std::vector<std::uint64_t> pair_epochs_;
    std::vector<CellId> cell_of_link_;
    std::vector<CarrierId> carrier_ids_;
    std::vector<std::uint32_t> queue_;
    std::vector<ConflictGraph> graphs_;
    std::vector<const ConflictGraph*> graph_of_carrier_;
    std::unique_ptr<bool[]> present_flags_;

    std::vector<std::uint64_t> period_attempted_;
    std::vector<std::uint64_t> period_delivered_;
    std::uint64_t period_x2_ = 0;
    std::uint64_t period_rounds_total_ = 0;
    std::uint32_t period_rounds_max_ = 0;

    Metrics metrics_;
};

} // namespace

Metrics run(const SimConfig& cfg)
{
    cfg.validate();
    Simulation sim(cfg);
    return sim.run();
}

} // namespace ucs
