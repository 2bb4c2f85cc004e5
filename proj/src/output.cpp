#include "ucs/output.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace ucs {
namespace {

std::string fmt(const char* format, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

std::string opt(const std::optional<double>& v, const char* format = "%.6f")
{
    return v ? fmt(format, *v) : std::string();
}

// Rounds for the summary so the JSON text is as stable as the CSVs.
double round6(double v) { return std::stod(fmt("%.6f", v)); }

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
}

} // namespace

std::string links_csv(const Metrics& m, const std::string& run_id)
{
    std::string s = "run_id,link_id,kind,target_T,mean_pdr,tx_power_dbm,attempted,delivered\n";
    for (const LinkMetrics& l : m.links) {
        s += run_id + "," + std::to_string(l.id) + "," + std::string(to_string(l.kind)) + "," +
             fmt("%.4f", l.target) + "," + opt(l.mean_pdr_after_warmup()) + "," + fmt("%.1f", l.tx_power_dbm) +
             "," + std::to_string(l.attempted_after_warmup) + "," + std::to_string(l.delivered_after_warmup) + "\n";
    }
    return s;
}

std::string slots_csv(const Metrics& m, const std::string& run_id)
{
    std::string s = "run_id,slot,carrier,active_count\n";
    if (m.carriers == 0) {
        return s;
    }
    for (std::size_t i = 0; i < m.slot_active.size(); ++i) {
        s += run_id + "," + std::to_string(i / m.carriers) + "," + std::to_string(i % m.carriers) + "," +
             std::to_string(m.slot_active[i]) + "\n";
    }
    return s;
}

std::string prk_csv(const Metrics& m, const std::string& run_id)
{
    std::string s = "run_id,period,link,group,K,er_size,Y,attempted,delivered\n";
    for (const PrkRecord& r : m.prk) {
        s += run_id + "," + std::to_string(r.period) + "," + std::to_string(r.link) + "," + std::to_string(r.group) +
             "," + fmt("%.9g", r.k) + "," + std::to_string(r.er_size) + "," + opt(r.y) + "," +
             std::to_string(r.attempted) + "," + std::to_string(r.delivered) + "\n";
    }
    return s;
}

std::string modes_csv(const Metrics& m, const std::string& run_id)
{
    std::string s =
        "run_id,epoch,pair,observed,chosen,reward,mu_hat_d2d,mu_hat_cellular,er_d2d,er_cellular,realized_regret\n";
    for (const ModeRecord& r : m.modes) {
        s += run_id + "," + std::to_string(r.epoch) + "," + std::to_string(r.pair) + "," +
             std::string(to_string(r.observed)) + "," + std::string(to_string(r.chosen)) + "," +
             fmt("%.6f", r.reward) + "," + fmt("%.6f", r.mu_hat_d2d) + "," + fmt("%.6f", r.mu_hat_cellular) + "," +
             fmt("%.6f", r.er_d2d) + "," + fmt("%.6f", r.er_cellular) + "," + fmt("%.6f", r.realized_regret) + "\n";
    }
    return s;
}

std::string overhead_csv(const Metrics& m, const std::string& run_id)
{
    std::string s = "run_id,period,gain_entries,x2_entries,rounds_total,rounds_max\n";
    for (const OverheadRecord& r : m.overhead) {
        s += run_id + "," + std::to_string(r.period) + "," + std::to_string(r.gain_entries) + "," +
             std::to_string(r.x2_entries) + "," + std::to_string(r.rounds_total) + "," +
             std::to_string(r.rounds_max) + "\n";
    }
    return s;
}

std::string summary_json(const Metrics& m, const SimConfig& cfg, const std::string& run_id)
{
    std::size_t measured = 0;
    std::size_t meeting = 0;
    double pdr_sum = 0.0;
    for (const LinkMetrics& l : m.links) {
        if (auto p = l.mean_pdr_after_warmup()) {
            ++measured;
            pdr_sum += *p;
            meeting += *p >= l.target - 0.02 ? 1 : 0;
        }
    }
    std::size_t d2d = 0;
    for (const PairSummary& p : m.pairs) {
        d2d += p.final_mode == PairMode::D2D ? 1 : 0;
    }

    nlohmann::ordered_json j;
    j["schema_version"] = kOutputSchemaVersion;
    j["run_id"] = run_id;
    j["seed"] = cfg.seed;
    j["scheduler"] = to_string(cfg.scheduler);
    j["mode_select"] = to_string(cfg.mode_select);
    j["carriers"] = cfg.carriers;
    j["group_size"] = cfg.group_size;
    j["slots"] = cfg.slots;
    j["warmup_slots"] = cfg.warmup_slots;
    j["nodes"] = m.network.nodes.size();
    j["links"] = m.links.size();
    j["pairs"] = m.pairs.size();
    j["pairs_final_d2d"] = d2d;
    j["transmissions"] = m.transmissions;
    j["delivered"] = m.delivered;
    j["schedules_checked"] = m.schedules_checked;
    j["rounds_max"] = m.rounds_max;
    j["links_measured"] = measured;
    j["links_meeting_target"] = meeting; // mean PDR >= T - 0.02
    j["mean_pdr"] = measured == 0 ? 0.0 : round6(pdr_sum / static_cast<double>(measured));
    j["reuse_rate"] = round6(m.reuse_rate);
    j["reuse_rate_all_carriers"] = round6(m.reuse_rate_all_carriers);
    return j.dump(2) + "\n";
}

void write_outputs(const Metrics& m, const SimConfig& cfg, const std::string& run_id,
                   const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    write_file(dir / "links.csv", links_csv(m, run_id));
    write_file(dir / "slots.csv", slots_csv(m, run_id));
    write_file(dir / "prk.csv", prk_csv(m, run_id));
    write_file(dir / "modes.csv", modes_csv(m, run_id));
    write_file(dir / "overhead.csv", overhead_csv(m, run_id));
    write_file(dir / "summary.json", summary_json(m, cfg, run_id));
}

} // namespace ucs
