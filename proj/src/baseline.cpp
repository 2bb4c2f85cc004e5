#include "ucs/baseline.hpp"

#include <algorithm>
#include <limits>
#include <optional>

#include "ucs/units.hpp"

namespace ucs {

double interference_budget_mw(double signal_mw, double target, double current_interference_mw,
                              const ChannelModel& model)
{
    return signal_mw / db_to_linear(mean_sinr_from_pdr(target, model)) - model.noise_mw() - current_interference_mw;
}

SlotSchedule iorder_schedule(std::uint64_t t, std::span<const std::uint32_t> demands, const Network& net,
                             const PathGainTable& gains, std::span<const CarrierId> carriers,
                             const ChannelModel& model)
{
    const std::size_t n = demands.size();
    SlotSchedule sched;
    sched.slot = t;
    sched.carriers.assign(carriers.begin(), carriers.end());
    sched.active.resize(carriers.size());
    sched.initial_demand.assign(demands.begin(), demands.end());
    sched.residual_demand.assign(demands.begin(), demands.end());
    auto& d = sched.residual_demand;

    std::vector<double> solo(n, 0.0);
    std::vector<LinkId> scheduled;
    std::vector<double> budget; // aligned with `scheduled`
    std::vector<char> on_carrier(n, 0);
    for (std::size_t c = 0; c < carriers.size(); ++c) {
        const CarrierId rb = carriers[c];
        auto power = [&](NodeId tx, NodeId rx) { return gains.rx_power_mw(tx, rx, rb); };
        // Interference-free budget of each link on this carrier.
        for (LinkId i = 0; i < n; ++i) {
            const Link& l = net.links[i];
            solo[i] = interference_budget_mw(power(l.tx, l.rx), l.pdr_target, 0.0, model);
        }
        scheduled.clear();
        budget.clear();
        std::fill(on_carrier.begin(), on_carrier.end(), 0);

        std::optional<LinkId> seed;
        for (LinkId i = 0; i < n; ++i) {
            if (d[i] > 0 && solo[i] >= 0.0 && (!seed || d[i] > d[*seed])) {
                seed = i;
            }
        }
        if (!seed) {
            continue;
        }
        auto place = [&](LinkId i, double own_budget) {
            const Link& l = net.links[i];
            for (std::size_t s = 0; s < scheduled.size(); ++s) {
                budget[s] -= power(l.tx, net.links[scheduled[s]].rx);
            }
            scheduled.push_back(i);
            budget.push_back(own_budget);
            on_carrier[i] = 1;
            --d[i];
        };
        place(*seed, solo[*seed]);

        for (;;) {
            std::optional<LinkId> best;
            double best_min = -std::numeric_limits<double>::infinity();
            for (LinkId j = 0; j < n; ++j) {
                if (d[j] == 0 || on_carrier[j] || solo[j] < 0.0) {
                    continue;
                }
                const Link& lj = net.links[j];
                bool feasible = true;
                double own = solo[j];
                double worst = std::numeric_limits<double>::infinity();
                for (std::size_t s = 0; s < scheduled.size() && feasible; ++s) {
                    const Link& ls = net.links[scheduled[s]];
                    if (radio_conflict(lj, ls)) {
                        feasible = false;
                        break;
                    }
                    own -= power(ls.tx, lj.rx);
                    const double after = budget[s] - power(lj.tx, ls.rx);
                    feasible = after >= 0.0;
                    worst = std::min(worst, after);
                }
                if (!feasible || own < 0.0) {
                    continue;
                }
                worst = std::min(worst, own);
                if (!best || worst > best_min) {
                    best = j;
                    best_min = worst;
                }
            }
            if (!best) {
                break;
            }
            double own = solo[*best];
            for (LinkId s : scheduled) {
                own -= power(net.links[s].tx, net.links[*best].rx);
            }
            place(*best, own);
        }
        std::sort(scheduled.begin(), scheduled.end());
        sched.active[c] = scheduled;
    }
    sched.rounds = 1;
    return sched;
}

bool budgets_respected(const SlotSchedule& sched, const Network& net, const PathGainTable& gains,
                       const ChannelModel& model)
{
    for (std::size_t c = 0; c < sched.active.size(); ++c) {
        const auto& active = sched.active[c];
        const CarrierId rb = sched.carriers[c];
        for (LinkId i : active) {
            const Link& li = net.links[i];
            double interference = 0.0;
            for (LinkId k : active) {
                if (k != i) {
                    interference += gains.rx_power_mw(net.links[k].tx, li.rx, rb);
                }
            }
            if (interference_budget_mw(gains.rx_power_mw(li.tx, li.rx, rb), li.pdr_target, interference, model) <
                0.0) {
                return false;
            }
        }
    }
    return true;
}

} // namespace ucs
