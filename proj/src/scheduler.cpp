#include "ucs/scheduler.hpp"

#include <algorithm>
#include <sstream>

#include "ucs/errors.hpp"
#include "ucs/rng.hpp"

namespace ucs {

void ConflictGraph::add_edge(LinkId a, LinkId b)
{
    if (a == b) {
        return;
    }
    adj_.at(a).push_back(b);
    adj_.at(b).push_back(a);
}

void ConflictGraph::finalize()
{
    for (auto& nbrs : adj_) {
        std::sort(nbrs.begin(), nbrs.end());
        nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    }
}

bool ConflictGraph::conflicts(LinkId a, LinkId b) const
{
    const auto& nbrs = adj_.at(a);
    return std::binary_search(nbrs.begin(), nbrs.end(), b);
}

std::size_t ConflictGraph::edge_count() const
{
    std::size_t n = 0;
    for (const auto& nbrs : adj_) {
        n += nbrs.size();
    }
    return n / 2;
}

bool radio_conflict(const Link& a, const Link& b)
{
    return a.tx == b.tx || a.rx == b.rx || a.tx == b.rx || a.rx == b.tx;
}

ConflictGraph build_conflict_graph(const Network& net, std::span<const std::vector<NodeId>> er_by_link,
                                   std::span<const bool> present)
{
    const std::size_t n = net.links.size();
    ConflictGraph g(n);
    auto in_er = [&](LinkId owner, NodeId node) {
        const auto& er = er_by_link[owner];
        return std::binary_search(er.begin(), er.end(), node);
    };
    for (LinkId i = 0; i < n; ++i) {
        if (!present[i]) {
            continue;
        }
        for (LinkId k = i + 1; k < n; ++k) {
            if (!present[k]) {
                continue;
            }
            const Link& a = net.links[i];
            const Link& b = net.links[k];
            if (radio_conflict(a, b) || in_er(i, b.tx) || in_er(k, a.tx)) {
                g.add_edge(i, k);
            }
        }
    }
    g.finalize();
    return g;
}

std::uint64_t priority(LinkId k, std::uint64_t d, std::uint64_t t, CarrierId rb)
{
    const std::uint64_t packed = k ^ (d * 0x9E3779B97F4A7C15ULL) ^ (t * 0xBF58476D1CE4E5B9ULL) ^
                                 (static_cast<std::uint64_t>(rb) * 0x94D049BB133111EBULL);
    return splitmix64(packed) ^ k ^ d;
}

std::optional<std::uint64_t> link_priority(LinkId k, std::uint64_t demand, std::uint64_t t, CarrierId rb)
{
    if (demand == 0) {
        return std::nullopt;
    }
    std::uint64_t best = 0;
    for (std::uint64_t d = 1; d <= demand; ++d) {
        best = std::max(best, priority(k, d, t, rb));
    }
    return best;
}

std::size_t SlotSchedule::total_active() const
{
    std::size_t n = 0;
    for (const auto& a : active) {
        n += a.size();
    }
    return n;
}

namespace {

// Number of distinct other cells owning a neighbour of each link, per graph.
std::vector<std::uint32_t> foreign_cells(const ConflictGraph& g, std::span<const CellId> cell_of_link)
{
    std::vector<std::uint32_t> out(g.size(), 0);
    std::vector<CellId> cells;
    for (LinkId i = 0; i < g.size(); ++i) {
        cells.clear();
        for (LinkId k : g.neighbors(i)) {
            if (cell_of_link[k] != cell_of_link[i]) {
                cells.push_back(cell_of_link[k]);
            }
        }
        std::sort(cells.begin(), cells.end());
        out[i] = static_cast<std::uint32_t>(std::unique(cells.begin(), cells.end()) - cells.begin());
    }
    return out;
}

} // namespace

SlotSchedule schedule_slot(std::uint64_t t, std::span<const std::uint32_t> demands,
                           std::span<const ConflictGraph* const> graph_of_carrier,
                           std::span<const CarrierId> carriers, std::span<const CellId> cell_of_link)
{
    const std::size_t n_links = demands.size();
    const std::size_t n_rb = carriers.size();
    if (graph_of_carrier.size() != n_rb || cell_of_link.size() != n_links) {
        throw std::invalid_argument("schedule_slot: inconsistent input sizes");
    }

    SlotSchedule sched;
    sched.slot = t;
    sched.carriers.assign(carriers.begin(), carriers.end());
    sched.active.resize(n_rb);
    sched.initial_demand.assign(demands.begin(), demands.end());
    sched.residual_demand.assign(demands.begin(), demands.end());
    auto& d = sched.residual_demand;

    auto at = [n_rb](LinkId i, std::size_t c) { return i * n_rb + c; };
    std::vector<LinkState> state(n_links * n_rb, LinkState::Inactive);
    std::vector<std::uint64_t> prio(n_links * n_rb, 0);
    std::size_t undecided = 0;
    for (LinkId i = 0; i < n_links; ++i) {
        if (d[i] == 0) {
            continue;
        }
        for (std::size_t c = 0; c < n_rb; ++c) {
            state[at(i, c)] = LinkState::Undecided;
            prio[at(i, c)] = *link_priority(i, d[i], t, carriers[c]);
        }
        undecided += n_rb;
    }

    // Agents: links grouped by owning cell, ascending id within a cell.
    CellId max_cell = 0;
    for (CellId c : cell_of_link) {
        max_cell = std::max(max_cell, c);
    }
    std::vector<std::vector<LinkId>> links_of_cell(n_links == 0 ? 0 : max_cell + 1);
    for (LinkId i = 0; i < n_links; ++i) {
        if (d[i] > 0) {
            links_of_cell[cell_of_link[i]].push_back(i);
        }
    }

    // Carriers of the same group share a graph; cache the exchange fan-out per graph.
    std::vector<const ConflictGraph*> distinct;
    std::vector<std::size_t> graph_index(n_rb);
    std::vector<std::vector<std::uint32_t>> fanout;
    for (std::size_t c = 0; c < n_rb; ++c) {
        auto it = std::find(distinct.begin(), distinct.end(), graph_of_carrier[c]);
        if (it == distinct.end()) {
            distinct.push_back(graph_of_carrier[c]);
            fanout.push_back(foreign_cells(*graph_of_carrier[c], cell_of_link));
            it = distinct.end() - 1;
        }
        graph_index[c] = static_cast<std::size_t>(it - distinct.begin());
    }

    // Link sets as bitsets of `words` 64-bit words.
    const std::size_t words = (n_links + 63) / 64;
    auto set_bit = [](std::uint64_t* bits, std::size_t i) { bits[i / 64] |= 1ULL << (i % 64); };
    auto clear_bit = [](std::uint64_t* bits, std::size_t i) { bits[i / 64] &= ~(1ULL << (i % 64)); };
    auto intersects3 = [words](const std::uint64_t* a, const std::uint64_t* b, const std::uint64_t* c) {
        for (std::size_t w = 0; w < words; ++w) {
            if ((a[w] & b[w] & c[w]) != 0) {
                return true;
            }
        }
        return false;
    };

    std::vector<std::uint64_t> nbr_bits(distinct.size() * n_links * words, 0);
    for (std::size_t gi = 0; gi < distinct.size(); ++gi) {
        for (LinkId i = 0; i < n_links; ++i) {
            std::uint64_t* row = &nbr_bits[(gi * n_links + i) * words];
            for (LinkId k : distinct[gi]->neighbors(i)) {
                set_bit(row, k);
            }
        }
    }

    // Per carrier: links ranked by priority (ties to the lower id), and for
    // each link the set of contending links that outrank it there.
    std::vector<std::uint64_t> above(n_rb * n_links * words, 0);
    std::vector<LinkId> order;
    std::vector<std::uint64_t> prefix(words);
    for (std::size_t c = 0; c < n_rb; ++c) {
        order.clear();
        for (LinkId i = 0; i < n_links; ++i) {
            if (d[i] > 0) {
                order.push_back(i);
            }
        }
        std::sort(order.begin(), order.end(), [&](LinkId x, LinkId y) {
            const std::uint64_t px = prio[at(x, c)];
            const std::uint64_t py = prio[at(y, c)];
            return px != py ? px > py : x < y;
        });
        std::fill(prefix.begin(), prefix.end(), 0);
        for (LinkId i : order) {
            std::copy(prefix.begin(), prefix.end(), &above[(c * n_links + i) * words]);
            set_bit(prefix.data(), i);
        }
    }

    // Shared snapshot per carrier: links not yet INACTIVE, links ACTIVE.
    std::vector<std::uint64_t> alive(n_rb * words, 0);
    std::vector<std::uint64_t> active(n_rb * words, 0);
    for (std::size_t c = 0; c < n_rb; ++c) {
        for (LinkId i = 0; i < n_links; ++i) {
            if (d[i] > 0) {
                set_bit(&alive[c * words], i);
            }
        }
    }

    const std::uint64_t guard = 10ULL * std::max<std::size_t>(n_rb, 1) * std::max<std::size_t>(n_links, 1);
    std::vector<std::pair<LinkId, std::size_t>> changed;
    while (undecided > 0) {
        if (++sched.rounds > guard) {
            throw InvariantViolation("schedule_slot: round guard exceeded at slot " + std::to_string(t));
        }
        changed.clear();
        for (const auto& agent_links : links_of_cell) {
            for (LinkId i : agent_links) {
                for (std::size_t c = 0; c < n_rb; ++c) {
                    if (state[at(i, c)] != LinkState::Undecided) {
                        continue;
                    }
                    const std::uint64_t* nbrs = &nbr_bits[(graph_index[c] * n_links + i) * words];
                    const std::uint64_t* higher = &above[(c * n_links + i) * words];
                    if (d[i] > 0 && !intersects3(nbrs, higher, &alive[c * words])) {
                        state[at(i, c)] = LinkState::Active;
                        changed.emplace_back(i, c);
                        --undecided;
                        if (--d[i] == 0) {
                            for (std::size_t c2 = 0; c2 < n_rb; ++c2) {
                                if (state[at(i, c2)] == LinkState::Undecided) {
                                    state[at(i, c2)] = LinkState::Inactive;
                                    changed.emplace_back(i, c2);
                                    --undecided;
                                }
                            }
                        }
                    } else if (intersects3(nbrs, higher, &active[c * words])) {
                        state[at(i, c)] = LinkState::Inactive;
                        changed.emplace_back(i, c);
                        --undecided;
                    }
                }
            }
        }
        // Share step: every changed (link, carrier) state goes to each other BS
        // owning a conflicting link on that carrier.
        for (const auto& [i, c] : changed) {
            sched.x2_entries += fanout[graph_index[c]][i];
            if (state[at(i, c)] == LinkState::Active) {
                set_bit(&active[c * words], i);
            } else {
                clear_bit(&alive[c * words], i);
            }
        }
    }

    for (std::size_t c = 0; c < n_rb; ++c) {
        for (LinkId i = 0; i < n_links; ++i) {
            if (state[at(i, c)] == LinkState::Active) {
                sched.active[c].push_back(i);
            }
        }
    }
    return sched;
}

std::optional<std::string> find_schedule_violation(const SlotSchedule& sched,
                                                   std::span<const ConflictGraph* const> graph_of_carrier)
{
    const std::size_t n_links = sched.initial_demand.size();
    std::vector<std::uint32_t> used(n_links, 0);
    std::vector<char> is_active(n_links, 0);
    for (std::size_t c = 0; c < sched.active.size(); ++c) {
        const ConflictGraph& g = *graph_of_carrier[c];
        std::fill(is_active.begin(), is_active.end(), 0);
        for (LinkId i : sched.active[c]) {
            is_active[i] = 1;
            ++used[i];
        }
        for (LinkId i : sched.active[c]) {
            for (LinkId k : g.neighbors(i)) {
                if (is_active[k]) {
                    std::ostringstream msg;
                    msg << "slot " << sched.slot << " carrier " << sched.carriers[c] << ": conflicting links "
                        << i << " and " << k << " both ACTIVE";
                    return msg.str();
                }
            }
        }
        for (LinkId i = 0; i < n_links; ++i) {
            if (is_active[i] || sched.residual_demand[i] == 0) {
                continue;
            }
            const auto nbrs = g.neighbors(i);
            const bool blocked = std::any_of(nbrs.begin(), nbrs.end(), [&](LinkId k) { return is_active[k] != 0; });
            if (!blocked) {
                std::ostringstream msg;
                msg << "slot " << sched.slot << " carrier " << sched.carriers[c] << ": link " << i
                    << " has residual demand and no ACTIVE conflicting link";
                return msg.str();
            }
        }
    }
    for (LinkId i = 0; i < n_links; ++i) {
        if (used[i] + sched.residual_demand[i] != sched.initial_demand[i]) {
            std::ostringstream msg;
            msg << "slot " << sched.slot << ": link " << i << " demand bookkeeping is inconsistent";
            return msg.str();
        }
        if (used[i] > sched.initial_demand[i]) {
            std::ostringstream msg;
            msg << "slot " << sched.slot << ": link " << i << " ACTIVE on " << used[i] << " carriers with demand "
                << sched.initial_demand[i];
            return msg.str();
        }
    }
    return std::nullopt;
}

bool check_maximality(const SlotSchedule& sched, std::span<const ConflictGraph* const> graph_of_carrier)
{
    return !find_schedule_violation(sched, graph_of_carrier).has_value();
}

} // namespace ucs
