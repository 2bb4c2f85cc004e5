#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ucs/prk.hpp"
#include "ucs/topology.hpp"

namespace ucs {

enum class LinkState : std::uint8_t { Undecided, Active, Inactive };

/// Symmetric, irreflexive conflict relation over link ids (dense, 0-based).
class ConflictGraph {
public:
    ConflictGraph() = default;
    explicit ConflictGraph(std::size_t link_count) : adj_(link_count) {}

    std::size_t size() const { return adj_.size(); }
    /// Adds the undirected edge {a, b}; self-loops are ignored.
    void add_edge(LinkId a, LinkId b);
    /// Sorts and deduplicates adjacency lists. Call once after the last add_edge.
    void finalize();

    std::span<const LinkId> neighbors(LinkId i) const { return adj_[i]; }
    bool conflicts(LinkId a, LinkId b) const;
    std::size_t edge_count() const;

private:
    std::vector<std::vector<LinkId>> adj_;
};

/// True when the two links cannot share a carrier regardless of interference:
/// same transmitter, same receiver, or one's transmitter is the other's receiver.
bool radio_conflict(const Link& a, const Link& b);

/// PRK conflict graph over the links flagged in `present`: i and k conflict when
/// tx(k) is in ER(i) or tx(i) is in ER(k), or they share a radio.
/// `er_by_link[i]` must be sorted ascending.
ConflictGraph build_conflict_graph(const Network& net, std::span<const std::vector<NodeId>> er_by_link,
                                   std::span<const bool> present);

/// Prio.k.rb.d: splitmix64 of the packed inputs, then XOR with k and d.
std::uint64_t priority(LinkId k, std::uint64_t d, std::uint64_t t, CarrierId rb);

/// Prio.k.rb: maximum of priority(k, d, t, rb) over d = 1..demand.
/// Empty when demand is zero (the link does not contend).
std::optional<std::uint64_t> link_priority(LinkId k, std::uint64_t demand, std::uint64_t t, CarrierId rb);

struct SlotSchedule {
    std::uint64_t slot = 0;
    /// Carrier ids, in the order the schedule was built.
    std::vector<CarrierId> carriers;
    /// ACTIVE link ids per carrier (index aligned with `carriers`), ascending.
    std::vector<std::vector<LinkId>> active;
    std::vector<std::uint32_t> initial_demand;
    std::vector<std::uint32_t> residual_demand;
    /// Synchronous exchange rounds until no (link, carrier) was UNDECIDED.
    std::uint32_t rounds = 0;
    /// Link-state entries shared with other BSes over all rounds.
    std::uint64_t x2_entries = 0;

    std::size_t total_active() const;
};

/// Distributed multi-channel ONAMA for one slot. Each BS agent owns the links
/// whose transmitter sits in its cell (`cell_of_link`). Rounds are synchronous:
/// every agent decides from the link states shared at the end of the previous
/// round, so the result does not depend on agent iteration order.
/// `graph_of_carrier[c]` is the conflict graph in force on `carriers[c]`.
SlotSchedule schedule_slot(std::uint64_t t, std::span<const std::uint32_t> demands,
                           std::span<const ConflictGraph* const> graph_of_carrier,
                           std::span<const CarrierId> carriers, std::span<const CellId> cell_of_link);

/// Description of the first independence/maximality/demand violation, if any.
std::optional<std::string> find_schedule_violation(const SlotSchedule& sched,
                                                   std::span<const ConflictGraph* const> graph_of_carrier);

/// Per carrier: no two ACTIVE links conflict, and every link that is not ACTIVE
/// there but still has residual demand has an ACTIVE conflicting link there.
bool check_maximality(const SlotSchedule& sched, std::span<const ConflictGraph* const> graph_of_carrier);

} // namespace ucs
