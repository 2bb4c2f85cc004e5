#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ucs/channel.hpp"
#include "ucs/scheduler.hpp"
#include "ucs/topology.hpp"

namespace ucs {

/// Tolerable additional interference at a receiver before its average SINR
/// drops below the level that yields its PDR target:
/// signal / linear(mean_sinr_from_pdr(T)) - noise - current interference.
double interference_budget_mw(double signal_mw, double target, double current_interference_mw,
                              const ChannelModel& model);

/// Centralized iOrder with full channel-state knowledge, extended to multiple
/// carriers. Carriers are filled in the given order from one shared demand pool.
/// Each carrier is seeded with the largest-queue link that is feasible alone
/// (ties to the lower id); links are then added one at a time, always the
/// feasible one that maximizes the minimum resulting budget over the carrier's
/// scheduled receivers, until none fits. Links that share a radio with a
/// scheduled link are never feasible on that carrier.
SlotSchedule iorder_schedule(std::uint64_t t, std::span<const std::uint32_t> demands, const Network& net,
                             const PathGainTable& gains, std::span<const CarrierId> carriers,
                             const ChannelModel& model);

/// True when every scheduled receiver's average SINR (no fading) meets the SINR
/// its target requires, i.e. every budget is non-negative.
bool budgets_respected(const SlotSchedule& sched, const Network& net, const PathGainTable& gains,
                       const ChannelModel& model);

} // namespace ucs
