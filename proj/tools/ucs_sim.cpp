// Experiment runner: single runs and sweeps, CSV/JSON outputs per run.

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "ucs/config.hpp"
#include "ucs/errors.hpp"
#include "ucs/output.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInvariant = 3;

struct Job {
    std::string run_id;
    ucs::SimConfig sim;
    std::filesystem::path dir;
};

unsigned worker_count(std::size_t jobs)
{
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* cap = std::getenv("UCS_SIM_THREADS")) {
        const long v = std::strtol(cap, nullptr, 10);
        if (v > 0) {
            n = std::min(n, static_cast<unsigned>(v));
        }
    }
    return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

// Runs every job; the first invariant violation wins over other failures.
int execute(const std::vector<Job>& jobs, bool quiet)
{
    std::atomic<std::size_t> next{0};
    std::atomic<int> status{kExitOk};
    std::mutex log;

    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            const Job& job = jobs[i];
            try {
                const ucs::Metrics m = ucs::run(job.sim);
                ucs::write_outputs(m, job.sim, job.run_id, job.dir);
                if (!quiet) {
                    std::lock_guard lock(log);
                    std::printf("%s: %llu transmissions, reuse %.3f -> %s\n", job.run_id.c_str(),
                                static_cast<unsigned long long>(m.transmissions), m.reuse_rate, job.dir.c_str());
                    std::fflush(stdout);
                }
            } catch (const ucs::InvariantViolation& e) {
                std::lock_guard lock(log);
                std::fprintf(stderr, "%s: invariant violated: %s\n", job.run_id.c_str(), e.what());
                status = kExitInvariant;
            } catch (const ucs::ConfigError& e) {
                std::lock_guard lock(log);
                std::fprintf(stderr, "%s: configuration error: %s\n", job.run_id.c_str(), e.what());
                if (status != kExitInvariant) {
                    status = kExitConfig;
                }
            } catch (const std::exception& e) {
                std::lock_guard lock(log);
                std::fprintf(stderr, "%s: %s\n", job.run_id.c_str(), e.what());
                if (status == kExitOk) {
                    status = kExitFailure;
                }
            }
        }
    };

    const unsigned n = worker_count(jobs.size());
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& t : pool) {
        t.join();
    }
    return status;
}

std::string repeat_name(std::uint32_t r) { return "r" + std::to_string(r); }

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Multi-carrier D2D/cellular scheduling simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint32_t> repeats;
    std::optional<std::string> scheduler;
    bool quiet = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON experiment config")->required();
        cmd->add_option("--seed", seed, "Base seed (overrides run.seed)");
        cmd->add_option("--repeats", repeats, "Runs per config, seeds seed, seed+1, ...");
        cmd->add_option("--scheduler", scheduler, "ucs or iorder (overrides scheduler.kind)")
            ->check(CLI::IsMember({"ucs", "iorder"}));
        cmd->add_flag("--quiet", quiet, "No progress output");
    };

    CLI::App* run_cmd = app.add_subcommand("run", "Run one config");
    add_common(run_cmd);
    run_cmd->add_option("--out", out_dir, "Output directory")->default_val("ucs_out");

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run every cell of the config's sweep");
    add_common(sweep_cmd);
    sweep_cmd->add_option("--out", out_dir, "Output root directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    // Everything is parsed and validated before the first output is written.
    std::vector<Job> jobs;
    try {
        ucs::ExperimentConfig cfg = ucs::load_config(config_path);
        if (seed) {
            cfg.sim.seed = *seed;
        }
        if (scheduler) {
            cfg.sim.scheduler = *scheduler == "iorder" ? ucs::SchedulerKind::IOrder : ucs::SchedulerKind::Ucs;
            cfg.sweep.schedulers.clear();
        }
        const bool sweeping = sweep_cmd->parsed();
        const std::uint32_t r_count = repeats.value_or(cfg.repeats != 0 ? cfg.repeats : (sweeping ? 10u : 1u));
        if (r_count == 0) {
            throw ucs::ConfigError(config_path + ":0: --repeats must be >= 1");
        }

        std::vector<ucs::SweepCell> cells;
        if (sweeping) {
            cells = ucs::expand_sweep(cfg);
        } else {
            cells.push_back({"run", cfg.sim});
        }
        for (const ucs::SweepCell& cell : cells) {
            for (std::uint32_t r = 0; r < r_count; ++r) {
                Job job{cell.name + "_" + repeat_name(r), cell.sim, {}};
                job.sim.seed = cfg.sim.seed + r;
                job.sim.validate();
                if (sweeping) {
                    job.dir = std::filesystem::path(out_dir) / cell.name / repeat_name(r);
                } else {
                    job.dir = r_count == 1 ? std::filesystem::path(out_dir)
                                           : std::filesystem::path(out_dir) / repeat_name(r);
                }
                jobs.push_back(std::move(job));
            }
        }
    } catch (const ucs::ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return kExitConfig;
    }

    return execute(jobs, quiet);
}
