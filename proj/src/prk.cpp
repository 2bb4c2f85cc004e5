#include "ucs/prk.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ucs/errors.hpp"
#include "ucs/units.hpp"

namespace ucs {

namespace {

constexpr double kBoundaryToleranceDb = 1e-9;
// Places K strictly below a candidate's threshold (about -4.3e-6 dB).
constexpr double kJustBelow = 1.0 - 1e-6;

double signal_dbm(const Network& net, const SignalMap& rx_map, const Link& link)
{
    const auto s = received_dbm(net, rx_map, link.tx);
    if (!s) {
        throw std::invalid_argument("PRK: receiver's signal map has no entry for the link transmitter");
    }
    return *s;
}

struct Interferer {
    NodeId id;
    double dbm;
};

std::vector<Interferer> known_interferers(const Network& net, const SignalMap& rx_map,
                                          const Link& link, std::span<const NodeId> candidates)
{
    std::vector<Interferer> out;
    out.reserve(candidates.size());
    for (NodeId c : candidates) {
        if (c == link.tx || c == link.rx) {
            continue;
        }
        if (auto p = received_dbm(net, rx_map, c)) {
            out.push_back({c, *p});
        }
    }
    return out;
}

double clamp_k(double k, const PrkParams& params)
{
    return std::clamp(k, params.k_min, params.k_max);
}

} // namespace

CarrierGrouping::CarrierGrouping(std::uint32_t total_carriers, std::uint32_t group_size)
    : total_(total_carriers), group_size_(group_size)
{
    if (total_carriers == 0) {
        throw ConfigError("prk.carriers must be >= 1");
    }
    if (group_size == 0 || group_size > total_carriers) {
        throw ConfigError("prk.group_size must lie in [1, carriers]");
    }
}

CarrierGrouping::Range CarrierGrouping::group(GroupId g) const
{
    const CarrierId first = g * group_size_;
    return {first, std::min(total_, first + group_size_)};
}

std::optional<double> received_dbm(const Network& net, const SignalMap& rx_map, NodeId from)
{
    const auto g = rx_map.gain_db(from);
    if (!g) {
        return std::nullopt;
    }
    return net.nodes[from].tx_power_dbm + *g;
}

bool in_exclusion_region(const Network& net, const SignalMap& rx_map, const Link& link,
                         NodeId c, double k)
{
    if (c == link.tx || c == link.rx) {
        return false;
    }
    const auto p = received_dbm(net, rx_map, c);
    if (!p) {
        return false;
    }
    if (!(k > 0.0)) {
        return false;
    }
    const double threshold = signal_dbm(net, rx_map, link) - linear_to_db(k);
    return *p >= threshold - kBoundaryToleranceDb;
}

std::vector<NodeId> exclusion_region(const Network& net, const SignalMap& rx_map, const Link& link,
                                     double k, std::span<const NodeId> candidates)
{
    std::vector<NodeId> out;
    if (candidates.empty() || !(k > 0.0)) {
        return out;
    }
    const double threshold = signal_dbm(net, rx_map, link) - linear_to_db(k);
    for (NodeId c : candidates) {
        if (c == link.tx || c == link.rx) {
            continue;
        }
        const auto p = received_dbm(net, rx_map, c);
        if (p && *p >= threshold - kBoundaryToleranceDb) {
            out.push_back(c);
        }
    }
    return out;
}

double expected_interference_mw(const Network& net, const SignalMap& rx_map, NodeId c,
                                std::uint32_t carriers)
{
    if (carriers == 0) {
        throw std::invalid_argument("expected_interference_mw: carrier count must be >= 1");
    }
    const auto p = received_dbm(net, rx_map, c);
    if (!p) {
        return 0.0;
    }
    return dbm_to_mw(*p) / static_cast<double>(carriers);
}

std::vector<NodeId> interferer_candidates(const SignalMap& rx_map, const Link& link,
                                          std::span<const NodeId> transmitters)
{
    std::vector<NodeId> out;
    for (NodeId c : transmitters) {
        if (c != link.tx && c != link.rx && rx_map.contains(c)) {
            out.push_back(c);
        }
    }
    return out;
}

double init_k(const Network& net, const SignalMap& rx_map, const Link& link,
              std::span<const NodeId> candidates, const ChannelModel& model, const PrkParams& params)
{
    const double s = signal_dbm(net, rx_map, link);
    const double noise = model.noise_mw();
    const auto interferers = known_interferers(net, rx_map, link, candidates);
    if (interferers.empty()) {
        return params.k_min;
    }

    std::optional<double> weakest_qualifying;
    double strongest = -INFINITY;
    for (const Interferer& c : interferers) {
        strongest = std::max(strongest, c.dbm);
        const double solo = s - mw_to_dbm(noise + dbm_to_mw(c.dbm));
        if (mean_pdr_from_sinr(solo, model) < link.pdr_target) {
            if (!weakest_qualifying || c.dbm < *weakest_qualifying) {
                weakest_qualifying = c.dbm;
            }
        }
    }
    if (weakest_qualifying) {
        return clamp_k(db_to_linear(s - *weakest_qualifying), params);
    }
    return clamp_k(db_to_linear(s - strongest) * kJustBelow, params);
}

double adapt_k(const PrkState& state, const Network& net, const SignalMap& rx_map,
               std::span<const NodeId> candidates, const ChannelModel& model,
               const PrkParams& params, std::uint32_t carriers)
{
    if (!state.estimator.warm()) {
        return state.k;
    }
    const auto y_raw = state.estimator.y();
    if (!y_raw) {
        return state.k;
    }
    const Link& link = net.links.at(state.link);
    const double target = state.target;
    const double y = std::clamp(*y_raw, params.epsilon, 1.0 - params.epsilon);
    if (y >= target && y <= target + params.hysteresis) {
        return state.k;
    }

    const double s_dbm = signal_dbm(net, rx_map, link);
    const double s_mw = dbm_to_mw(s_dbm);
    const double noise = model.noise_mw();
    auto tolerable = [&](double p) { return s_mw / db_to_linear(mean_sinr_from_pdr(p, model)) - noise; };
    // Negative: interference must drop by |delta|. Positive: budget to release.
    const double delta = tolerable(target) - tolerable(y);
    const double threshold = s_dbm - linear_to_db(state.k);

    auto interferers = known_interferers(net, rx_map, link, candidates);
    std::vector<Interferer> inside;
    std::vector<Interferer> outside;
    for (const Interferer& c : interferers) {
        (c.dbm >= threshold - kBoundaryToleranceDb ? inside : outside).push_back(c);
    }
    auto per_carrier = [&](const Interferer& c) {
        return dbm_to_mw(c.dbm) / static_cast<double>(carriers);
    };
    // Ties on power are ordered by id so the step is deterministic.
    auto stronger = [](const Interferer& a, const Interferer& b) {
        return a.dbm != b.dbm ? a.dbm > b.dbm : a.id < b.id;
    };

    double k = state.k;
    if (y < target) {
        std::sort(outside.begin(), outside.end(), stronger);
        double covered = 0.0;
        std::uint32_t added = 0;
        for (const Interferer& c : outside) {
            covered += per_carrier(c);
            k = db_to_linear(s_dbm - c.dbm);
            ++added;
            if (covered >= -delta || added == params.max_add) {
                break;
            }
        }
    } else {
        std::sort(inside.begin(), inside.end(), [&](const Interferer& a, const Interferer& b) {
            return stronger(b, a);
        });
        double released = 0.0;
        std::size_t removed = 0;
        for (const Interferer& c : inside) {
            if (released + per_carrier(c) > delta || removed == params.max_release) {
                break;
            }
            released += per_carrier(c);
            ++removed;
        }
        if (removed == inside.size() && removed > 0) {
            k = db_to_linear(s_dbm - inside.back().dbm) * kJustBelow;
        } else if (removed > 0) {
            k = db_to_linear(s_dbm - inside[removed].dbm);
        }
    }
    return clamp_k(k, params);
}

bool regulate(PrkState& state, const Network& net, const SignalMap& rx_map,
              std::span<const NodeId> candidates, const ChannelModel& model,
              const PrkParams& params, std::uint32_t carriers)
{
    if (!state.estimator.warm()) {
        return false;
    }
    const double next = adapt_k(state, net, rx_map, candidates, model, params, carriers);
    if (next > state.k) {
        if (state.last_step_released) {
            state.release_backoff =
                std::min(params.max_release_hold, std::max<std::uint32_t>(1, 2 * state.release_backoff));
            state.release_hold = state.release_backoff;
        }
        state.last_step_released = false;
        state.k = next;
        return true;
    }
    if (next < state.k) {
        if (state.release_hold > 0) {
            --state.release_hold;
            return false;
        }
        state.last_step_released = true;
        state.k = next;
        return true;
    }
    if (state.last_step_released) {
        state.release_backoff /= 2;
        state.last_step_released = false;
    }
    return false;
}

} // namespace ucs
