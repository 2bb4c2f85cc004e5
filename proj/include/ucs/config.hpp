#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ucs/engine.hpp"

namespace ucs {

/// Axes of a sweep; each empty axis keeps the base config's value.
struct SweepSpec {
    std::vector<double> targets;
    std::vector<std::uint32_t> group_sizes;
    std::vector<std::uint32_t> carriers;
    std::vector<Placement> placements;
    std::vector<SchedulerKind> schedulers;
};

struct ExperimentConfig {
    SimConfig sim;
    /// Repetitions with seeds seed, seed+1, ...; 0 means "use the CLI default".
    std::uint32_t repeats = 0;
    SweepSpec sweep;
};

/// One point of a sweep: a label usable as a directory name plus its config.
struct SweepCell {
    std::string name;
    SimConfig sim;
};

/// Parses a JSON experiment description. Throws ConfigError whose message
/// starts with "<source>:<line>:" for syntax errors and for bad values, where
/// the line is that of the offending key.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

/// Cartesian product of the sweep axes, in a fixed order.
std::vector<SweepCell> expand_sweep(const ExperimentConfig& cfg);

} // namespace ucs
