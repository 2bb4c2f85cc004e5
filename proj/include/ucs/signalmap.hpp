#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ucs/topology.hpp"

namespace ucs {

struct GainEntry {
    double gain_est_db = 0.0;
    std::uint64_t sample_count = 0;
};

/// A receiver's local signal map: EWMA estimates (dB) of the average channel
/// gain from each nearby node.
class SignalMap {
public:
    SignalMap() = default;
    SignalMap(NodeId owner, std::size_t node_count, double alpha);

    NodeId owner() const { return owner_; }
    double alpha() const { return alpha_; }

    /// est <- (1 - alpha) * est + alpha * sample; the first sample initialises.
    void update_gain(NodeId from, double sample_db);

    std::optional<double> gain_db(NodeId from) const;
    bool contains(NodeId from) const { return from < entries_.size() && entries_[from].sample_count > 0; }
    const GainEntry& entry(NodeId from) const { return entries_.at(from); }
    /// Nodes with an entry, ascending id.
    std::span<const NodeId> known() const { return known_; }
    std::size_t size() const { return known_.size(); }

private:
    NodeId owner_ = 0;
    double alpha_ = 0.1;
    std::vector<GainEntry> entries_;
    std::vector<NodeId> known_;
};

/// One gain report: the mean of `fading` linear power samples around a true
/// average gain, expressed in dB. Averaging happens in the linear domain so the
/// report is an unbiased power estimate.
double gain_report_db(double true_gain_db, std::span<const double> fading);

struct EstimatorParams {
    double alpha = 0.05;
    std::uint32_t warmup = 20;
};

/// PDR estimate Y for one (link, carrier group): arithmetic mean over the first
/// `warmup` outcomes, EWMA afterwards.
class ReliabilityEstimator {
public:
    ReliabilityEstimator() = default;
    explicit ReliabilityEstimator(EstimatorParams params) : params_(params) {}

    void record_outcome(bool success);

    /// Undefined until the first outcome.
    std::optional<double> y() const;
    std::uint64_t samples() const { return samples_; }
    std::uint64_t samples_in_period() const { return samples_in_period_; }
    /// Enough outcomes this feedback period to drive an adaptation step.
    bool warm() const { return samples_in_period_ >= params_.warmup; }
    void begin_period() { samples_in_period_ = 0; }

private:
    EstimatorParams params_;
    double y_ = 0.0;
    std::uint64_t successes_ = 0;
    std::uint64_t samples_ = 0;
    std::uint64_t samples_in_period_ = 0;
};

} // namespace ucs
