#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ucs/channel.hpp"
#include "ucs/signalmap.hpp"
#include "ucs/topology.hpp"

namespace ucs {

using CarrierId = std::uint32_t;
using GroupId = std::uint32_t;

/// Contiguous carrier groups sharing one K: [0, n), [n, 2n), ... The last group
/// may be shorter when n does not divide N.
class CarrierGrouping {
public:
    struct Range {
        CarrierId first = 0;
        CarrierId last = 0; // exclusive
        std::uint32_t size() const { return last - first; }
    };

    CarrierGrouping() = default;
    /// Throws ConfigError unless 1 <= group_size <= total_carriers.
    CarrierGrouping(std::uint32_t total_carriers, std::uint32_t group_size);

    std::uint32_t total_carriers() const { return total_; }
    std::uint32_t group_size() const { return group_size_; }
    std::uint32_t group_count() const { return (total_ + group_size_ - 1) / group_size_; }
    GroupId group_of(CarrierId c) const { return c / group_size_; }
    Range group(GroupId g) const;

private:
    std::uint32_t total_ = 1;
    std::uint32_t group_size_ = 1;
};

struct PrkParams {
    double hysteresis = 0.02;
    double epsilon = 1e-4;
    double k_min = 1e-3;
    double k_max = 1e6;
    /// Caps on ER members added / released in one step; 0 means no cap.
    std::uint32_t max_add = 5;
    std::uint32_t max_release = 1;
    /// Longest wait, in adaptation steps, before K may be lowered again after
    /// a lowering had to be undone.
    std::uint32_t max_release_hold = 8;
};

/// Controller state of one (link, carrier group).
struct PrkState {
    LinkId link = 0;
    GroupId group = 0;
    double k = 1.0;
    double target = 0.9;
    ReliabilityEstimator estimator;
    /// Release back-off: steps left before K may drop, the current wait
    /// length, and whether the last applied step lowered K.
    std::uint32_t release_hold = 0;
    std::uint32_t release_backoff = 0;
    bool last_step_released = false;
};

/// Average received power at the map owner from `from`, dBm, using the map's
/// gain estimate and the sender's transmit power.
std::optional<double> received_dbm(const Network& net, const SignalMap& rx_map, NodeId from);

/// P(C, R) >= P(S, R) / K, evaluated in dB with a 1e-9 dB tolerance so that a
/// node placed on the boundary by construction stays inside. Nodes missing
/// from the map, and the link's own endpoints, are outside.
bool in_exclusion_region(const Network& net, const SignalMap& rx_map, const Link& link,
                         NodeId c, double k);

std::vector<NodeId> exclusion_region(const Network& net, const SignalMap& rx_map, const Link& link,
                                     double k, std::span<const NodeId> candidates);

/// Expected interference of C at the map owner when links hop over N carriers: P(C, R) / N.
/// Zero when C is not in the map.
double expected_interference_mw(const Network& net, const SignalMap& rx_map, NodeId c,
                                std::uint32_t carriers);

/// Candidate interferers of a link: transmitters present in the receiver's map,
/// excluding the link's endpoints.
std::vector<NodeId> interferer_candidates(const SignalMap& rx_map, const Link& link,
                                          std::span<const NodeId> transmitters);

/// Smallest K whose exclusion region holds every candidate that alone, on the
/// same carrier, would pull the link's PDR below its target. Without such a
/// candidate, K sits just below the strongest candidate's threshold (empty ER).
double init_k(const Network& net, const SignalMap& rx_map, const Link& link,
              std::span<const NodeId> candidates, const ChannelModel& model, const PrkParams& params);

/// One regulation step on K from the estimator's Y against the target T.
/// The PDR error is mapped to an interference-budget error through the inverse
/// PDR curve, then covered greedily by adding (Y < T) or releasing
/// (Y > T + hysteresis) the candidates closest to the threshold, each counted
/// at its expected interference P/N. No-op unless the estimator is warm.
double adapt_k(const PrkState& state, const Network& net, const SignalMap& rx_map,
               std::span<const NodeId> candidates, const ChannelModel& model,
               const PrkParams& params, std::uint32_t carriers);

/// adapt_k plus release back-off, applied in place: when raising K right
/// after a lowering, the wait before the next lowering doubles (up to
/// params.max_release_hold); a lowering that holds halves it. Returns true
/// when K changed.
bool regulate(PrkState& state, const Network& net, const SignalMap& rx_map,
              std::span<const NodeId> candidates, const ChannelModel& model,
              const PrkParams& params, std::uint32_t carriers);

} // namespace ucs
