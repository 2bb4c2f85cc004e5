#include "ucs/config.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <type_traits>

#include <json.hpp>

#include "ucs/errors.hpp"

namespace ucs {
namespace {

using nlohmann::json;

// Line of the first occurrence of `"key"`, 1-based.
std::size_t line_of_key(const std::string& text, const std::string& key)
{
    const std::string quoted = "\"" + key + "\"";
    const auto pos = text.find(quoted);
    if (pos == std::string::npos) {
        return 1;
    }
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

std::size_t line_of_offset(const std::string& text, std::size_t offset)
{
    offset = std::min(offset, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

template <typename E>
using Names = std::vector<std::pair<const char*, E>>;

const Names<SchedulerKind> kSchedulers{{"ucs", SchedulerKind::Ucs}, {"iorder", SchedulerKind::IOrder}};
const Names<Placement> kPlacements{{"random", Placement::Random}, {"grid", Placement::Grid}};
const Names<ModeSelectKind> kModeSelects{{"bandit", ModeSelectKind::Bandit}, {"greedy", ModeSelectKind::Greedy}};
const Names<TrafficKind> kTraffic{{"full_buffer", TrafficKind::FullBuffer}, {"poisson", TrafficKind::Poisson}};
const Names<NodeKind> kNodeKinds{{"bs", NodeKind::BaseStation}, {"ue", NodeKind::UserEquipment}};
const Names<LinkKind> kLinkKinds{{"uplink", LinkKind::Uplink}, {"downlink", LinkKind::Downlink}, {"d2d", LinkKind::D2D}};
const Names<FadingKind> kFading{{"rayleigh", FadingKind::Rayleigh}, {"rice", FadingKind::Rice}, {"awgn", FadingKind::Awgn}};

class Parser {
public:
    Parser(const std::string& text, const std::string& source) : text_(text), source_(source) {}

    [[noreturn]] void fail(const std::string& key, const std::string& what) const
    {
        throw ConfigError(source_ + ":" + std::to_string(line_of_key(text_, key)) + ": " + what);
    }

    // Rejects keys outside `allowed`.
    void check_keys(const json& obj, const std::string& section, std::initializer_list<const char*> allowed) const
    {
        if (!obj.is_object()) {
            fail(section, "'" + section + "' must be an object");
        }
        const std::set<std::string> ok(allowed.begin(), allowed.end());
        for (const auto& [key, value] : obj.items()) {
            if (!ok.contains(key)) {
                fail(key, "unknown key '" + key + "' in '" + section + "'");
            }
        }
    }

    template <typename T>
    void read(const json& obj, const char* key, T& out) const
    {
        if (!obj.contains(key)) {
            return;
        }
        const json& v = obj.at(key);
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) {
                fail(key, std::string("'") + key + "' must be a boolean");
            }
            out = v.get<bool>();
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
                fail(key, std::string("'") + key + "' must be a non-negative integer");
            }
            const auto raw = v.get<std::uint64_t>();
            if (raw > static_cast<std::uint64_t>(std::numeric_limits<T>::max())) {
                fail(key, std::string("'") + key + "' is out of range");
            }
            out = static_cast<T>(raw);
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) {
                fail(key, std::string("'") + key + "' must be a number");
            }
            out = v.get<T>();
        } else {
            static_assert(sizeof(T) == 0, "unsupported field type");
        }
    }

    template <typename T>
    void read_list(const json& obj, const char* key, std::vector<T>& out) const
    {
        if (!obj.contains(key)) {
            return;
        }
        const json& v = obj.at(key);
        if (!v.is_array()) {
            fail(key, std::string("'") + key + "' must be an array");
        }
        out.clear();
        for (const json& e : v) {
            json wrapper = json::object();
            wrapper[key] = e;
            T item{};
            read(wrapper, key, item);
            out.push_back(item);
        }
    }

    template <typename E>
    E parse_enum(const json& v, const char* key, const Names<E>& names) const
    {
        if (v.is_string()) {
            for (const auto& [name, value] : names) {
                if (v.get<std::string>() == name) {
                    return value;
                }
            }
        }
        std::string options;
        for (const auto& [name, value] : names) {
            options += options.empty() ? name : std::string("|") + name;
        }
        fail(key, std::string("'") + key + "' must be one of " + options);
    }

    template <typename E>
    void read_enum(const json& obj, const char* key, E& out, const Names<E>& names) const
    {
        if (obj.contains(key)) {
            out = parse_enum(obj.at(key), key, names);
        }
    }

    ExperimentConfig parse()
    {
        json root;
        try {
            root = json::parse(text_);
        } catch (const json::parse_error& e) {
            throw ConfigError(source_ + ":" + std::to_string(line_of_offset(text_, e.byte == 0 ? 0 : e.byte - 1)) +
                              ": malformed JSON: " + e.what());
        }
        if (!root.is_object()) {
            throw ConfigError(source_ + ":1: top level must be an object");
        }
        check_keys(root, "<root>",
                   {"topology", "channel", "prk", "scheduler", "modeselect", "traffic", "run", "sweep"});

        ExperimentConfig cfg;
        SimConfig& sim = cfg.sim;
        if (root.contains("topology")) {
            topology(root.at("topology"), sim.topology);
        }
        if (root.contains("channel")) {
            channel(root.at("channel"), sim.channel);
        }
        if (root.contains("prk")) {
            prk(root.at("prk"), sim);
        }
        if (root.contains("scheduler")) {
            const json& s = root.at("scheduler");
            check_keys(s, "scheduler", {"kind"});
            read_enum(s, "kind", sim.scheduler, kSchedulers);
        }
        if (root.contains("modeselect")) {
            const json& m = root.at("modeselect");
            check_keys(m, "modeselect", {"kind", "l1", "l2", "delta", "cost"});
            read_enum(m, "kind", sim.mode_select, kModeSelects);
            read(m, "l1", sim.bandit.l1);
            read(m, "l2", sim.bandit.l2);
            read(m, "delta", sim.bandit.delta);
            read_list(m, "cost", sim.bandit.cost);
        }
        if (root.contains("traffic")) {
            const json& t = root.at("traffic");
            check_keys(t, "traffic", {"kind", "demand_per_slot", "rate", "queue_limit"});
            read_enum(t, "kind", sim.traffic.kind, kTraffic);
            read(t, "demand_per_slot", sim.traffic.full_buffer_demand);
            read(t, "rate", sim.traffic.poisson_rate);
            read(t, "queue_limit", sim.traffic.queue_limit);
        }
        if (root.contains("run")) {
            const json& r = root.at("run");
            check_keys(r, "run", {"slots", "seed", "warmup_slots", "repeats", "record_slots"});
            read(r, "slots", sim.slots);
            read(r, "seed", sim.seed);
            read(r, "warmup_slots", sim.warmup_slots);
            read(r, "repeats", cfg.repeats);
            read(r, "record_slots", sim.record_slots);
        }
        if (root.contains("sweep")) {
            sweep(root.at("sweep"), cfg.sweep);
        }

        try {
            sim.validate();
            for (const SweepCell& cell : expand_sweep(cfg)) {
                cell.sim.validate();
            }
        } catch (const ConfigError& e) {
            // Point at the first key named in the message, if any.
            const std::string msg = e.what();
            std::string key;
            if (const auto dot = msg.find('.'); dot != std::string::npos) {
                auto end = msg.find_first_of(" :[", dot);
                key = msg.substr(dot + 1, end == std::string::npos ? std::string::npos : end - dot - 1);
            }
            fail(key.empty() ? "run" : key, msg);
        }
        return cfg;
    }

private:
    void topology(const json& t, TopologyConfig& topo) const
    {
        check_keys(t, "topology",
                   {"grid_cols", "grid_rows", "cell_side_m", "ues_per_cell", "cellular_per_cell", "pairs_per_cell",
                    "placement", "bs_tx_power_dbm", "ue_tx_power_dbm", "ue_tx_power_choices_dbm", "pdr_targets",
                    "random_targets", "sensing_radius_m", "nodes", "links"});
        read(t, "grid_cols", topo.grid_cols);
        read(t, "grid_rows", topo.grid_rows);
        read(t, "cell_side_m", topo.cell_side_m);
        read(t, "ues_per_cell", topo.ues_per_cell);
        read(t, "cellular_per_cell", topo.cellular_per_cell);
        read(t, "pairs_per_cell", topo.pairs_per_cell);
        read_enum(t, "placement", topo.placement, kPlacements);
        read(t, "bs_tx_power_dbm", topo.bs_tx_power_dbm);
        read(t, "ue_tx_power_dbm", topo.ue_tx_power_dbm);
        read_list(t, "ue_tx_power_choices_dbm", topo.ue_tx_power_choices_dbm);
        read_list(t, "pdr_targets", topo.pdr_targets);
        read(t, "random_targets", topo.random_targets);
        read(t, "sensing_radius_m", topo.sensing_radius_m);

        if (t.contains("nodes")) {
            if (!t.at("nodes").is_array()) {
                fail("nodes", "'nodes' must be an array");
            }
            for (const json& n : t.at("nodes")) {
                check_keys(n, "nodes", {"kind", "cell", "x", "y", "tx_power_dbm"});
                FixedNode node;
                if (n.contains("kind")) {
                    node.kind = parse_enum(n.at("kind"), "kind", kNodeKinds);
                }
                read(n, "cell", node.cell);
                read(n, "x", node.position.x);
                read(n, "y", node.position.y);
                if (n.contains("tx_power_dbm")) {
                    double p = 0.0;
                    read(n, "tx_power_dbm", p);
                    node.tx_power_dbm = p;
                }
                topo.fixed_nodes.push_back(node);
            }
        }
        if (t.contains("links")) {
            if (!t.at("links").is_array()) {
                fail("links", "'links' must be an array");
            }
            for (const json& l : t.at("links")) {
                check_keys(l, "links", {"tx", "rx", "kind", "pdr_target"});
                if (!l.contains("tx") || !l.contains("rx")) {
                    fail("links", "every link needs 'tx' and 'rx'");
                }
                FixedLink link;
                read(l, "tx", link.tx);
                read(l, "rx", link.rx);
                if (l.contains("kind")) {
                    link.kind = parse_enum(l.at("kind"), "kind", kLinkKinds);
                }
                if (l.contains("pdr_target")) {
                    double p = 0.0;
                    read(l, "pdr_target", p);
                    link.pdr_target = p;
                }
                topo.fixed_links.push_back(link);
            }
        }
    }

    void channel(const json& c, ChannelModel& model) const
    {
        check_keys(c, "channel",
                   {"path_loss_exponent", "reference_loss_db", "fading", "rice_k_db", "noise_dbm", "gamma50_db",
                    "slope_per_db", "carrier_shadowing_db", "coherence_carriers"});
        read(c, "path_loss_exponent", model.path_loss_exponent);
        read(c, "reference_loss_db", model.reference_loss_db);
        read_enum(c, "fading", model.fading.kind, kFading);
        read(c, "rice_k_db", model.fading.rice_k_db);
        read(c, "noise_dbm", model.noise_dbm);
        read(c, "gamma50_db", model.pdr.gamma50_db);
        read(c, "slope_per_db", model.pdr.slope_per_db);
        read(c, "carrier_shadowing_db", model.carrier_shadowing_db);
        read(c, "coherence_carriers", model.coherence_carriers);
    }

    void prk(const json& p, SimConfig& sim) const
    {
        check_keys(p, "prk",
                   {"carriers", "group_size", "feedback_period", "alpha_gain", "gain_report_window", "alpha_pdr",
                    "warmup_samples", "hysteresis", "epsilon", "k_min", "k_max", "max_add", "max_release",
                    "max_release_hold"});
        read(p, "carriers", sim.carriers);
        read(p, "group_size", sim.group_size);
        read(p, "feedback_period", sim.feedback_period);
        read(p, "alpha_gain", sim.alpha_gain);
        read(p, "gain_report_window", sim.gain_report_window);
        read(p, "alpha_pdr", sim.estimator.alpha);
        read(p, "warmup_samples", sim.estimator.warmup);
        read(p, "hysteresis", sim.prk.hysteresis);
        read(p, "epsilon", sim.prk.epsilon);
        read(p, "k_min", sim.prk.k_min);
        read(p, "k_max", sim.prk.k_max);
        read(p, "max_add", sim.prk.max_add);
        read(p, "max_release", sim.prk.max_release);
        read(p, "max_release_hold", sim.prk.max_release_hold);
    }

    void sweep(const json& s, SweepSpec& spec) const
    {
        check_keys(s, "sweep", {"targets", "group_sizes", "carriers", "placements", "schedulers"});
        read_list(s, "targets", spec.targets);
        read_list(s, "group_sizes", spec.group_sizes);
        read_list(s, "carriers", spec.carriers);
        for (const char* key : {"placements", "schedulers"}) {
            if (!s.contains(key)) {
                continue;
            }
            if (!s.at(key).is_array()) {
                fail(key, std::string("'") + key + "' must be an array");
            }
            for (const json& e : s.at(key)) {
                if (std::string(key) == "placements") {
                    spec.placements.push_back(parse_enum(e, key, kPlacements));
                } else {
                    spec.schedulers.push_back(parse_enum(e, key, kSchedulers));
                }
            }
        }
    }

    const std::string& text_;
    const std::string& source_;
};

std::string format_target(double t)
{
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(2);
    os << t;
    return os.str();
}

} // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& source)
{
    return Parser(text, source).parse();
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError(path + ":0: cannot open config file");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

std::vector<SweepCell> expand_sweep(const ExperimentConfig& cfg)
{
    const SweepSpec& s = cfg.sweep;
    const SimConfig& base = cfg.sim;
    // An empty axis contributes one "keep base" entry, marked by nullopt.
    auto axis = [](const auto& values) {
        using V = std::decay_t<decltype(values.front())>;
        std::vector<std::optional<V>> out;
        for (const V& v : values) {
            out.emplace_back(v);
        }
        if (out.empty()) {
            out.emplace_back(std::nullopt);
        }
        return out;
    };

    std::vector<SweepCell> cells;
    for (const auto& sched : axis(s.schedulers)) {
        for (const auto& place : axis(s.placements)) {
            for (const auto& carriers : axis(s.carriers)) {
                for (const auto& group : axis(s.group_sizes)) {
                    for (const auto& target : axis(s.targets)) {
                        SweepCell cell{"", base};
                        std::string name;
                        auto add = [&name](const std::string& part) { name += (name.empty() ? "" : "_") + part; };
                        if (sched) {
                            cell.sim.scheduler = *sched;
                            add(std::string(to_string(*sched)));
                        }
                        if (place) {
                            cell.sim.topology.placement = *place;
                            add(std::string(to_string(*place)));
                        }
                        if (carriers) {
                            cell.sim.carriers = *carriers;
                            add("N" + std::to_string(*carriers));
                        }
                        if (group) {
                            cell.sim.group_size = *group;
                            add("n" + std::to_string(*group));
                        }
                        if (target) {
                            cell.sim.topology.pdr_targets = {*target};
                            cell.sim.topology.random_targets = false;
                            add("T" + format_target(*target));
                        }
                        cell.name = name.empty() ? "base" : name;
                        cells.push_back(std::move(cell));
                    }
                }
            }
        }
    }
    return cells;
}

} // namespace ucs
