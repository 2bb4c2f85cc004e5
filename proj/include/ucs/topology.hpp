#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "ucs/rng.hpp"

namespace ucs {

using NodeId = std::uint64_t;
using LinkId = std::uint64_t;
using PairId = std::uint64_t;
using CellId = std::uint32_t;

enum class NodeKind : std::uint8_t { BaseStation, UserEquipment };
enum class LinkKind : std::uint8_t { Uplink, Downlink, D2D };
enum class PairMode : std::uint8_t { Cellular, D2D };
enum class Placement : std::uint8_t { Random, Grid };

std::string_view to_string(LinkKind kind);
std::string_view to_string(PairMode mode);
std::string_view to_string(Placement placement);

struct Position {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Position&) const = default;
};

double distance(const Position& a, const Position& b);

struct Node {
    NodeId id = 0;
    NodeKind kind = NodeKind::UserEquipment;
    CellId cell = 0;
    Position position;
    double tx_power_dbm = 0.0;
    bool operator==(const Node&) const = default;
};

struct Link {
    LinkId id = 0;
    NodeId tx = 0;
    NodeId rx = 0;
    LinkKind kind = LinkKind::Uplink;
    double pdr_target = 0.9;
    /// Set for the provisional links of a UE-to-UE pair.
    std::optional<PairId> pair;
    bool operator==(const Link&) const = default;
};

/// A UE-to-UE communication pair. Both link sets exist in the network; the
/// mode decides which one carries traffic.
struct CommPair {
    PairId id = 0;
    NodeId src_ue = 0;
    NodeId dst_ue = 0;
    PairMode mode = PairMode::Cellular;
    LinkId uplink = 0;
    LinkId downlink = 0;
    LinkId d2d = 0;

    /// Links carrying the pair's traffic in `m`: {uplink, downlink} or {d2d}.
    std::vector<LinkId> links_for(PairMode m) const;
    std::vector<LinkId> active_links() const { return links_for(mode); }
    bool operator==(const CommPair&) const = default;
};

/// Hand-placed node for fixed topologies (test fixtures, small studies).
struct FixedNode {
    NodeKind kind = NodeKind::UserEquipment;
    CellId cell = 0;
    Position position;
    /// Defaults to the configured BS/UE power when absent.
    std::optional<double> tx_power_dbm;
};

struct FixedLink {
    NodeId tx = 0;
    NodeId rx = 0;
    LinkKind kind = LinkKind::Uplink;
    /// Defaults to the first configured target when absent.
    std::optional<double> pdr_target;
};

struct TopologyConfig {
    std::uint32_t grid_cols = 3;
    std::uint32_t grid_rows = 3;
    double cell_side_m = 500.0;
    std::uint32_t ues_per_cell = 15;
    std::uint32_t cellular_per_cell = 5;
    std::uint32_t pairs_per_cell = 5;
    Placement placement = Placement::Random;
    double bs_tx_power_dbm = 40.0;
    double ue_tx_power_dbm = 20.0;
    /// When non-empty, each UE draws its transmit power uniformly from this list.
    std::vector<double> ue_tx_power_choices_dbm;
    /// A single entry gives every link the same target; with `random_targets`
    /// each link draws uniformly from the list.
    std::vector<double> pdr_targets{0.9};
    bool random_targets = false;
    /// Nodes farther apart than this never appear in each other's signal maps,
    /// unless their cells are adjacent. Non-positive disables the radius rule.
    double sensing_radius_m = 0.0;
    /// When non-empty, the network is built from these instead of being
    /// generated: node i gets id i, and nodes 0..cells-1 must be the BSes of
    /// cells 0..cells-1. Fixed topologies have no communication pairs.
    std::vector<FixedNode> fixed_nodes;
    std::vector<FixedLink> fixed_links;

    void validate() const;
};

struct Network {
    std::vector<Node> nodes;
    std::vector<Link> links;
    std::vector<CommPair> pairs;
    std::uint32_t grid_cols = 0;
    std::uint32_t grid_rows = 0;
    double cell_side_m = 0.0;

    std::size_t cell_count() const { return static_cast<std::size_t>(grid_cols) * grid_rows; }
    /// BS ids equal cell indices.
    NodeId base_station(CellId cell) const { return cell; }
    const Node& node(NodeId id) const { return nodes.at(id); }
    const Link& link(LinkId id) const { return links.at(id); }
    /// Cell whose BS schedules the link: the transmitter's cell.
    CellId scheduling_cell(LinkId id) const { return nodes[links[id].tx].cell; }
    bool neighbor_cells(CellId a, CellId b) const;
    /// Nodes that transmit on at least one link (candidate interferers).
    std::vector<NodeId> transmitters() const;

    bool operator==(const Network&) const = default;
};

/// Builds BSes at cell centres, places UEs, and creates the cellular links and
/// the provisional uplink/downlink/D2D links of each pair. Ids follow creation
/// order so the result is a pure function of (cfg, rng state).
Network generate_topology(const TopologyConfig& cfg, Rng& rng);

/// Row-major lattice offsets (relative to the cell's lower-left corner) used by
/// grid placement: the smallest m x m lattice holding `count` points.
std::vector<Position> grid_lattice(std::uint32_t count, double cell_side_m);

/// For every node, the nodes it keeps in its signal map: same or adjacent cell,
/// or within the sensing radius.
std::vector<std::vector<NodeId>> sensing_neighbors(const Network& net, double sensing_radius_m);

} // namespace ucs
