#include "ucs/topology.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>

#include "ucs/errors.hpp"

namespace ucs {

std::string_view to_string(LinkKind kind)
{
    switch (kind) {
    case LinkKind::Uplink: return "uplink";
    case LinkKind::Downlink: return "downlink";
    case LinkKind::D2D: return "d2d";
    }
    return "unknown";
}

std::string_view to_string(PairMode mode)
{
    return mode == PairMode::D2D ? "d2d" : "cellular";
}

std::string_view to_string(Placement placement)
{
    return placement == Placement::Grid ? "grid" : "random";
}

double distance(const Position& a, const Position& b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

std::vector<LinkId> CommPair::links_for(PairMode m) const
{
    if (m == PairMode::D2D) {
        return {d2d};
    }
    return {uplink, downlink};
}

void TopologyConfig::validate() const
{
    if (grid_cols == 0 || grid_rows == 0) {
        throw ConfigError("topology.grid: both dimensions must be >= 1");
    }
    if (!(cell_side_m > 0.0) || !std::isfinite(cell_side_m)) {
        throw ConfigError("topology.cell_side_m must be a positive number");
    }
    if (fixed_nodes.empty() && ues_per_cell < 2 * pairs_per_cell + cellular_per_cell) {
        throw ConfigError("topology.ues_per_cell (" + std::to_string(ues_per_cell) +
                          ") is smaller than 2*pairs_per_cell + cellular_per_cell (" +
                          std::to_string(2 * pairs_per_cell + cellular_per_cell) + ")");
    }
    if (!std::isfinite(bs_tx_power_dbm) || !std::isfinite(ue_tx_power_dbm)) {
        throw ConfigError("topology: transmit powers must be finite");
    }
    for (double p : ue_tx_power_choices_dbm) {
        if (!std::isfinite(p)) {
            throw ConfigError("topology.ue_tx_power_choices_dbm: values must be finite");
        }
    }
    if (pdr_targets.empty()) {
        throw ConfigError("topology.pdr_targets must list at least one PDR target");
    }
    if (!random_targets && pdr_targets.size() != 1) {
        throw ConfigError("topology.pdr_targets: a homogeneous run takes exactly one target "
                          "(set random_targets for per-link targets)");
    }
    for (double t : pdr_targets) {
        if (!(t > 0.0 && t < 1.0)) {
            throw ConfigError("topology.pdr_targets: every target must lie in (0, 1)");
        }
    }
}

bool Network::neighbor_cells(CellId a, CellId b) const
{
    const auto ax = static_cast<long>(a % grid_cols), ay = static_cast<long>(a / grid_cols);
    const auto bx = static_cast<long>(b % grid_cols), by = static_cast<long>(b / grid_cols);
    return std::abs(ax - bx) <= 1 && std::abs(ay - by) <= 1;
}

std::vector<NodeId> Network::transmitters() const
{
    std::vector<bool> is_tx(nodes.size(), false);
    for (const Link& l : links) {
        is_tx[l.tx] = true;
    }
    std::vector<NodeId> out;
    for (NodeId id = 0; id < nodes.size(); ++id) {
        if (is_tx[id]) {
            out.push_back(id);
        }
    }
    return out;
}

std::vector<Position> grid_lattice(std::uint32_t count, double cell_side_m)
{
    auto m = static_cast<std::uint32_t>(std::ceil(std::sqrt(static_cast<double>(count))));
    while (m * m < count) {
        ++m;
    }
    std::vector<Position> points;
    points.reserve(count);
    const double step = m == 0 ? 0.0 : cell_side_m / m;
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::uint32_t row = i / m;
        const std::uint32_t col = i % m;
        points.push_back({(col + 0.5) * step, (row + 0.5) * step});
    }
    return points;
}

namespace {

Network build_fixed(const TopologyConfig& cfg)
{
    Network net;
    net.grid_cols = cfg.grid_cols;
    net.grid_rows = cfg.grid_rows;
    net.cell_side_m = cfg.cell_side_m;
    const auto cells = net.cell_count();
    for (std::size_t i = 0; i < cfg.fixed_nodes.size(); ++i) {
        const FixedNode& f = cfg.fixed_nodes[i];
        const std::string where = "topology.nodes[" + std::to_string(i) + "]";
        if (f.cell >= cells) {
            throw ConfigError(where + ": cell " + std::to_string(f.cell) + " is outside the grid");
        }
        const bool bs = f.kind == NodeKind::BaseStation;
        if (bs != (i < cells) || (bs && f.cell != i)) {
            throw ConfigError(where + ": nodes 0.." + std::to_string(cells - 1) +
                              " must be the base stations of cells 0.." + std::to_string(cells - 1) +
                              ", in order, and no other node may be a base station");
        }
        const double power = f.tx_power_dbm.value_or(bs ? cfg.bs_tx_power_dbm : cfg.ue_tx_power_dbm);
        if (!std::isfinite(power) || !std::isfinite(f.position.x) || !std::isfinite(f.position.y)) {
            throw ConfigError(where + ": position and power must be finite");
        }
        net.nodes.push_back({i, f.kind, f.cell, f.position, power});
    }
    for (std::size_t j = 0; j < cfg.fixed_links.size(); ++j) {
        const FixedLink& f = cfg.fixed_links[j];
        const std::string where = "topology.links[" + std::to_string(j) + "]";
        if (f.tx >= net.nodes.size() || f.rx >= net.nodes.size() || f.tx == f.rx) {
            throw ConfigError(where + ": tx and rx must be distinct node ids");
        }
        const bool tx_bs = net.nodes[f.tx].kind == NodeKind::BaseStation;
        const bool rx_bs = net.nodes[f.rx].kind == NodeKind::BaseStation;
        const bool ok = (f.kind == LinkKind::Uplink && !tx_bs && rx_bs) ||
                        (f.kind == LinkKind::Downlink && tx_bs && !rx_bs) ||
                        (f.kind == LinkKind::D2D && !tx_bs && !rx_bs);
        if (!ok) {
            throw ConfigError(where + ": endpoints do not match link kind " + std::string(to_string(f.kind)));
        }
        const double target = f.pdr_target.value_or(cfg.pdr_targets.front());
        if (!(target > 0.0 && target < 1.0)) {
            throw ConfigError(where + ": target must lie in (0, 1)");
        }
        net.links.push_back({j, f.tx, f.rx, f.kind, target, std::nullopt});
    }
    return net;
}

} // namespace

Network generate_topology(const TopologyConfig& cfg, Rng& rng)
{
    cfg.validate();
    if (!cfg.fixed_nodes.empty()) {
        return build_fixed(cfg);
    }

    Network net;
    net.grid_cols = cfg.grid_cols;
    net.grid_rows = cfg.grid_rows;
    net.cell_side_m = cfg.cell_side_m;
    const auto cells = static_cast<CellId>(net.cell_count());

    auto cell_origin = [&](CellId c) {
        return Position{(c % cfg.grid_cols) * cfg.cell_side_m, (c / cfg.grid_cols) * cfg.cell_side_m};
    };

    for (CellId c = 0; c < cells; ++c) {
        const Position o = cell_origin(c);
        net.nodes.push_back({c, NodeKind::BaseStation, c,
                             {o.x + cfg.cell_side_m / 2, o.y + cfg.cell_side_m / 2},
                             cfg.bs_tx_power_dbm});
    }

    const std::vector<Position> lattice = grid_lattice(cfg.ues_per_cell, cfg.cell_side_m);
    std::vector<std::vector<NodeId>> ues_of_cell(cells);
    for (CellId c = 0; c < cells; ++c) {
        const Position o = cell_origin(c);
        for (std::uint32_t u = 0; u < cfg.ues_per_cell; ++u) {
            Position p;
            if (cfg.placement == Placement::Grid) {
                p = {o.x + lattice[u].x, o.y + lattice[u].y};
            } else {
                p.x = o.x + rng.uniform() * cfg.cell_side_m;
                p.y = o.y + rng.uniform() * cfg.cell_side_m;
            }
            double power = cfg.ue_tx_power_dbm;
            if (!cfg.ue_tx_power_choices_dbm.empty()) {
                power = cfg.ue_tx_power_choices_dbm[rng.below(cfg.ue_tx_power_choices_dbm.size())];
            }
            const NodeId id = net.nodes.size();
            net.nodes.push_back({id, NodeKind::UserEquipment, c, p, power});
            ues_of_cell[c].push_back(id);
        }
    }

    auto draw_target = [&]() {
        if (cfg.random_targets) {
            return cfg.pdr_targets[rng.below(cfg.pdr_targets.size())];
        }
        return cfg.pdr_targets.front();
    };
    auto add_link = [&](NodeId tx, NodeId rx, LinkKind kind, std::optional<PairId> pair) {
        const LinkId id = net.links.size();
        net.links.push_back({id, tx, rx, kind, draw_target(), pair});
        return id;
    };

    for (CellId c = 0; c < cells; ++c) {
        // Random role assignment: Fisher-Yates over the cell's UEs.
        std::vector<NodeId> ues = ues_of_cell[c];
        for (std::size_t i = ues.size(); i > 1; --i) {
            std::swap(ues[i - 1], ues[rng.below(i)]);
        }
        const NodeId bs = net.base_station(c);
        std::size_t next = 0;
        for (std::uint32_t k = 0; k < cfg.cellular_per_cell; ++k) {
            const NodeId ue = ues[next++];
            add_link(ue, bs, LinkKind::Uplink, std::nullopt);
            add_link(bs, ue, LinkKind::Downlink, std::nullopt);
        }
        for (std::uint32_t k = 0; k < cfg.pairs_per_cell; ++k) {
            CommPair pair;
            pair.id = net.pairs.size();
            pair.src_ue = ues[next++];
            pair.dst_ue = ues[next++];
            pair.mode = PairMode::Cellular;
            pair.uplink = add_link(pair.src_ue, bs, LinkKind::Uplink, pair.id);
            pair.downlink = add_link(bs, pair.dst_ue, LinkKind::Downlink, pair.id);
            pair.d2d = add_link(pair.src_ue, pair.dst_ue, LinkKind::D2D, pair.id);
            net.pairs.push_back(pair);
        }
    }
    return net;
}

std::vector<std::vector<NodeId>> sensing_neighbors(const Network& net, double sensing_radius_m)
{
    std::vector<std::vector<NodeId>> out(net.nodes.size());
    for (const Node& a : net.nodes) {
        for (const Node& b : net.nodes) {
            if (a.id == b.id) {
                continue;
            }
            const bool by_cell = net.neighbor_cells(a.cell, b.cell);
            const bool by_radius =
                sensing_radius_m > 0.0 && distance(a.position, b.position) <= sensing_radius_m;
            if (by_cell || by_radius) {
                out[a.id].push_back(b.id);
            }
        }
    }
    return out;
}

} // namespace ucs
