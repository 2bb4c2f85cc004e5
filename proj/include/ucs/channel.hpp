#pragma once

#include <span>
#include <vector>

#include "ucs/rng.hpp"
#include "ucs/topology.hpp"

namespace ucs {

enum class FadingKind : std::uint8_t { Rayleigh, Rice, Awgn };

std::string_view to_string(FadingKind kind);

struct FadingModel {
    FadingKind kind = FadingKind::Rayleigh;
    /// Rice K-factor (LOS/scatter power ratio), dB. Ignored for other kinds.
    double rice_k_db = 6.0;
};

/// Logistic PDR-SINR relation: PDR(g) = 1 / (1 + exp(-slope * (g - gamma50))).
struct PdrCurve {
    double gamma50_db = 6.0;
    double slope_per_db = 0.8;
};

struct ChannelModel {
    double path_loss_exponent = 3.5;
    double reference_loss_db = 40.0;
    FadingModel fading;
    double noise_dbm = -110.0;
    PdrCurve pdr;
    /// Frequency selectivity: each node pair gets an independent zero-mean
    /// Gaussian gain offset (dB, this standard deviation) per block of
    /// `coherence_carriers` adjacent carriers, fixed for the whole run.
    /// Zero disables it.
    double carrier_shadowing_db = 0.0;
    std::uint32_t coherence_carriers = 25;

    double noise_mw() const;
    void validate() const;
};

/// Log-distance path loss. Distances below 1 m are clamped to 1 m.
double path_loss_db(double distance_m, const ChannelModel& model);

/// Unit-mean linear power gain for one slot.
double sample_fading(const ChannelModel& model, Rng& rng);

/// SINR in dB from linear powers.
double sinr_db(double signal_mw, std::span<const double> interference_mw, double noise_mw);

double pdr_from_sinr(double gamma_db, const ChannelModel& model);
/// Inverse of pdr_from_sinr; throws std::domain_error unless 0 < p < 1.
double sinr_from_pdr(double p, const ChannelModel& model);

/// Expected PDR of a link whose average SINR is `mean_gamma_db` once the
/// signal's fading is averaged out. Equals pdr_from_sinr under AWGN.
double mean_pdr_from_sinr(double mean_gamma_db, const ChannelModel& model);
/// Average SINR needed for an expected PDR of p under the model's fading.
/// Throws std::domain_error unless 0 < p < 1.
double mean_sinr_from_pdr(double p, const ChannelModel& model);

/// True (omniscient) average channel gains and received powers between all
/// node pairs. Gains are -path_loss, plus a per-carrier offset when the model
/// is frequency selective; fading multiplies them per slot.
class PathGainTable {
public:
    PathGainTable() = default;
    /// Flat channel: every carrier sees the path gain.
    PathGainTable(const Network& net, const ChannelModel& model);
    /// Draws the per-carrier offsets (reciprocal: a->b equals b->a) for
    /// `carriers` carriers when model.carrier_shadowing_db > 0.
    PathGainTable(const Network& net, const ChannelModel& model, std::uint32_t carriers, Rng& rng);

    std::size_t size() const { return n_; }
    double gain_db(NodeId tx, NodeId rx) const { return gain_db_[tx * n_ + rx]; }
    double gain_db(NodeId tx, NodeId rx, std::uint32_t carrier) const;
    /// Gain averaged (linearly) over carriers [first, last), dB.
    double mean_gain_db(NodeId tx, NodeId rx, std::uint32_t first, std::uint32_t last) const;
    /// Received power (tx power x gain), mW, without and with the carrier offset.
    double rx_power_mw(NodeId tx, NodeId rx) const { return rx_mw_[tx * n_ + rx]; }
    double rx_power_mw(NodeId tx, NodeId rx, std::uint32_t carrier) const
    {
        return blocks_ == 0 ? rx_power_mw(tx, rx) : rx_mw_[tx * n_ + rx] * offset_[block_index(tx, rx, carrier)];
    }

private:
    std::size_t block_index(NodeId tx, NodeId rx, std::uint32_t carrier) const
    {
        return (tx * n_ + rx) * blocks_ + carrier / coherence_;
    }

    std::size_t n_ = 0;
    std::size_t blocks_ = 0;
    std::uint32_t coherence_ = 1;
    std::vector<double> gain_db_;
    std::vector<double> rx_mw_;
    std::vector<double> offset_; // linear factor per (tx, rx, block)
};

/// Per-slot SINR of `link` against the transmitters in `concurrent_tx`.
/// `fading` holds the signal's draw first, then one draw per interferer.
/// Throws std::invalid_argument if the link's own transmitter is listed.
double link_sinr_db(const Link& link, std::span<const NodeId> concurrent_tx,
                    const PathGainTable& gains, std::span<const double> fading,
                    const ChannelModel& model);

} // namespace ucs
