#include "ucs/channel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <tuple>

#include "ucs/errors.hpp"
#include "ucs/units.hpp"

namespace ucs {

std::string_view to_string(FadingKind kind)
{
    switch (kind) {
    case FadingKind::Rayleigh: return "rayleigh";
    case FadingKind::Rice: return "rice";
    case FadingKind::Awgn: return "awgn";
    }
    return "unknown";
}

double ChannelModel::noise_mw() const
{
    return dbm_to_mw(noise_dbm);
}

void ChannelModel::validate() const
{
    if (!(path_loss_exponent > 2.0) || !std::isfinite(path_loss_exponent)) {
        throw ConfigError("channel.path_loss_exponent must be > 2");
    }
    if (!std::isfinite(reference_loss_db)) {
        throw ConfigError("channel.reference_loss_db must be finite");
    }
    if (!std::isfinite(noise_dbm)) {
        throw ConfigError("channel.noise_dbm must be finite");
    }
    if (!(pdr.slope_per_db > 0.0) || !std::isfinite(pdr.slope_per_db)) {
        throw ConfigError("channel.slope_per_db must be > 0");
    }
    if (!std::isfinite(pdr.gamma50_db)) {
        throw ConfigError("channel.gamma50_db must be finite");
    }
    if (!std::isfinite(fading.rice_k_db)) {
        throw ConfigError("channel.rice_k_db must be finite");
    }
    if (!(carrier_shadowing_db >= 0.0) || !std::isfinite(carrier_shadowing_db)) {
        throw ConfigError("channel.carrier_shadowing_db must be >= 0");
    }
    if (coherence_carriers == 0) {
        throw ConfigError("channel.coherence_carriers must be >= 1");
    }
}

double path_loss_db(double distance_m, const ChannelModel& model)
{
    const double d = std::max(distance_m, 1.0);
    return model.reference_loss_db + 10.0 * model.path_loss_exponent * std::log10(d);
}

double sample_fading(const ChannelModel& model, Rng& rng)
{
    switch (model.fading.kind) {
    case FadingKind::Awgn:
        return 1.0;
    case FadingKind::Rayleigh:
        return rng.exponential();
    case FadingKind::Rice: {
        // h = sqrt(K/(K+1)) + sqrt(1/(K+1)) * CN(0,1); E|h|^2 = 1.
        const double k = db_to_linear(model.fading.rice_k_db);
        const double los = std::sqrt(k / (k + 1.0));
        const double sigma = std::sqrt(1.0 / (2.0 * (k + 1.0)));
        const double re = los + sigma * rng.normal();
        const double im = sigma * rng.normal();
        return re * re + im * im;
    }
    }
    return 1.0;
}

double sinr_db(double signal_mw, std::span<const double> interference_mw, double noise_mw)
{
    double denom = noise_mw;
    for (double i : interference_mw) {
        denom += i;
    }
    return linear_to_db(signal_mw / denom);
}

double pdr_from_sinr(double gamma_db, const ChannelModel& model)
{
    return 1.0 / (1.0 + std::exp(-model.pdr.slope_per_db * (gamma_db - model.pdr.gamma50_db)));
}

double sinr_from_pdr(double p, const ChannelModel& model)
{
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("sinr_from_pdr: probability must lie in (0, 1)");
    }
    return model.pdr.gamma50_db + std::log(p / (1.0 - p)) / model.pdr.slope_per_db;
}

namespace {

// Expected PDR tabulated over average SINR for one (fading, curve) setting.
class MeanPdrTable {
public:
    static constexpr double kLo = -40.0;
    static constexpr double kHi = 110.0;
    static constexpr double kStep = 0.02;

    explicit MeanPdrTable(const ChannelModel& model)
    {
        // Fading power density integrated on a dB grid.
        std::vector<double> fade_db;
        std::vector<double> weight;
        const double k = db_to_linear(model.fading.rice_k_db);
        double total = 0.0;
        for (double x_db = -80.0; x_db <= 25.0; x_db += 0.05) {
            const double x = db_to_linear(x_db);
            double log_pdf = 0.0;
            if (model.fading.kind == FadingKind::Rayleigh) {
                log_pdf = -x;
            } else {
                const double z = 2.0 * std::sqrt(k * (k + 1.0) * x);
                const double log_i0 = z < 600.0 ? std::log(std::cyl_bessel_i(0.0, z))
                                                : z - 0.5 * std::log(2.0 * std::numbers::pi * z);
                log_pdf = std::log(k + 1.0) - k - (k + 1.0) * x + log_i0;
            }
            const double w = std::exp(log_pdf) * x;
            fade_db.push_back(x_db);
            weight.push_back(w);
            total += w;
        }
        for (double& w : weight) {
            w /= total;
        }
        const auto n = static_cast<std::size_t>((kHi - kLo) / kStep) + 1;
        pdr_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double g = kLo + kStep * static_cast<double>(i);
            double acc = 0.0;
            for (std::size_t j = 0; j < fade_db.size(); ++j) {
                acc += weight[j] * pdr_from_sinr(g + fade_db[j], model);
            }
            pdr_[i] = acc;
        }
    }

    double pdr(double g) const
    {
        if (g <= kLo) {
            return pdr_.front();
        }
        if (g >= kHi) {
            return pdr_.back();
        }
        const double pos = (g - kLo) / kStep;
        const auto i = std::min(static_cast<std::size_t>(pos), pdr_.size() - 2);
        const double f = pos - static_cast<double>(i);
        return pdr_[i] + f * (pdr_[i + 1] - pdr_[i]);
    }

    double sinr(double p) const
    {
        if (p <= pdr_.front()) {
            return kLo;
        }
        if (p >= pdr_.back()) {
            return kHi;
        }
        const auto it = std::lower_bound(pdr_.begin(), pdr_.end(), p);
        const auto i = static_cast<std::size_t>(it - pdr_.begin());
        const double lo = pdr_[i - 1];
        const double hi = pdr_[i];
        const double f = hi > lo ? (p - lo) / (hi - lo) : 0.0;
        return kLo + kStep * (static_cast<double>(i - 1) + f);
    }

private:
    std::vector<double> pdr_;
};

const MeanPdrTable& mean_pdr_table(const ChannelModel& model)
{
    using Key = std::tuple<int, double, double, double>;
    static std::mutex mu;
    static std::map<Key, std::unique_ptr<MeanPdrTable>> cache;
    const Key key{static_cast<int>(model.fading.kind),
                  model.fading.kind == FadingKind::Rice ? model.fading.rice_k_db : 0.0, model.pdr.gamma50_db,
                  model.pdr.slope_per_db};
    std::lock_guard lock(mu);
    auto& slot = cache[key];
    if (!slot) {
        slot = std::make_unique<MeanPdrTable>(model);
    }
    return *slot;
}

} // namespace

double mean_pdr_from_sinr(double mean_gamma_db, const ChannelModel& model)
{
    if (model.fading.kind == FadingKind::Awgn) {
        return pdr_from_sinr(mean_gamma_db, model);
    }
    return mean_pdr_table(model).pdr(mean_gamma_db);
}

double mean_sinr_from_pdr(double p, const ChannelModel& model)
{
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("mean_sinr_from_pdr: probability must lie in (0, 1)");
    }
    if (model.fading.kind == FadingKind::Awgn) {
        return sinr_from_pdr(p, model);
    }
    return mean_pdr_table(model).sinr(p);
}

PathGainTable::PathGainTable(const Network& net, const ChannelModel& model)
    : n_(net.nodes.size()), gain_db_(n_ * n_, 0.0), rx_mw_(n_ * n_, 0.0)
{
    for (const Node& a : net.nodes) {
        for (const Node& b : net.nodes) {
            if (a.id == b.id) {
                continue;
            }
            const double g = -path_loss_db(distance(a.position, b.position), model);
            gain_db_[a.id * n_ + b.id] = g;
            rx_mw_[a.id * n_ + b.id] = dbm_to_mw(a.tx_power_dbm + g);
        }
    }
}

PathGainTable::PathGainTable(const Network& net, const ChannelModel& model, std::uint32_t carriers, Rng& rng)
    : PathGainTable(net, model)
{
    if (!(model.carrier_shadowing_db > 0.0) || carriers == 0) {
        return;
    }
    coherence_ = model.coherence_carriers;
    blocks_ = (carriers + coherence_ - 1) / coherence_;
    offset_.assign(n_ * n_ * blocks_, 1.0);
    for (NodeId a = 0; a < n_; ++a) {
        for (NodeId b = a + 1; b < n_; ++b) {
            for (std::size_t k = 0; k < blocks_; ++k) {
                const double f = db_to_linear(model.carrier_shadowing_db * rng.normal());
                offset_[(a * n_ + b) * blocks_ + k] = f;
                offset_[(b * n_ + a) * blocks_ + k] = f;
            }
        }
    }
}

double PathGainTable::gain_db(NodeId tx, NodeId rx, std::uint32_t carrier) const
{
    if (blocks_ == 0) {
        return gain_db(tx, rx);
    }
    return gain_db(tx, rx) + linear_to_db(offset_[block_index(tx, rx, carrier)]);
}

double PathGainTable::mean_gain_db(NodeId tx, NodeId rx, std::uint32_t first, std::uint32_t last) const
{
    if (blocks_ == 0 || last <= first) {
        return gain_db(tx, rx);
    }
    double sum = 0.0;
    for (std::uint32_t c = first; c < last; ++c) {
        sum += offset_[block_index(tx, rx, c)];
    }
    return gain_db(tx, rx) + linear_to_db(sum / static_cast<double>(last - first));
}

double link_sinr_db(const Link& link, std::span<const NodeId> concurrent_tx,
                    const PathGainTable& gains, std::span<const double> fading,
                    const ChannelModel& model)
{
    if (fading.size() != concurrent_tx.size() + 1) {
        throw std::invalid_argument("link_sinr_db: need one fading draw per transmitter plus the signal");
    }
    double interference = 0.0;
    for (std::size_t j = 0; j < concurrent_tx.size(); ++j) {
        if (concurrent_tx[j] == link.tx) {
            throw std::invalid_argument("link_sinr_db: link transmitter listed as interferer");
        }
        interference += gains.rx_power_mw(concurrent_tx[j], link.rx) * fading[j + 1];
    }
    const double signal = gains.rx_power_mw(link.tx, link.rx) * fading[0];
    return linear_to_db(signal / (model.noise_mw() + interference));
}

} // namespace ucs
