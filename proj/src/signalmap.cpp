#include "ucs/signalmap.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ucs/units.hpp"

namespace ucs {

SignalMap::SignalMap(NodeId owner, std::size_t node_count, double alpha)
    : owner_(owner), alpha_(alpha), entries_(node_count)
{
}

void SignalMap::update_gain(NodeId from, double sample_db)
{
    if (!std::isfinite(sample_db)) {
        throw std::invalid_argument("SignalMap::update_gain: sample must be finite");
    }
    if (from >= entries_.size()) {
        entries_.resize(from + 1);
    }
    GainEntry& e = entries_[from];
    if (e.sample_count == 0) {
        e.gain_est_db = sample_db;
        known_.insert(std::upper_bound(known_.begin(), known_.end(), from), from);
    } else {
        e.gain_est_db = (1.0 - alpha_) * e.gain_est_db + alpha_ * sample_db;
    }
    ++e.sample_count;
}

std::optional<double> SignalMap::gain_db(NodeId from) const
{
    if (!contains(from)) {
        return std::nullopt;
    }
    return entries_[from].gain_est_db;
}

double gain_report_db(double true_gain_db, std::span<const double> fading)
{
    if (fading.empty()) {
        return true_gain_db;
    }
    double sum = 0.0;
    for (double f : fading) {
        sum += f;
    }
    const double mean = sum / static_cast<double>(fading.size());
    // A report of all-zero samples is impossible for the supported fading laws,
    // but keep the result finite regardless.
    return true_gain_db + linear_to_db(std::max(mean, 1e-12));
}

void ReliabilityEstimator::record_outcome(bool success)
{
    ++samples_;
    ++samples_in_period_;
    if (samples_ <= params_.warmup) {
        successes_ += success ? 1 : 0;
        y_ = static_cast<double>(successes_) / static_cast<double>(samples_);
    } else {
        y_ = (1.0 - params_.alpha) * y_ + params_.alpha * (success ? 1.0 : 0.0);
    }
}

std::optional<double> ReliabilityEstimator::y() const
{
    if (samples_ == 0) {
        return std::nullopt;
    }
    return y_;
}

} // namespace ucs
