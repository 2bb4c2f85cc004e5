#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gen.hpp"
#include "ucs/channel.hpp"
#include "ucs/errors.hpp"
#include "ucs/units.hpp"

using namespace ucs;

namespace {

ChannelModel model_with(FadingKind kind)
{
    ChannelModel m;
    m.fading.kind = kind;
    return m;
}

double sample_mean(const ChannelModel& m, std::uint64_t seed, int n)
{
    Rng rng(seed);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        sum += sample_fading(m, rng);
    }
    return sum / n;
}

} // namespace

TEST_CASE("path loss at one metre is the reference loss")
{
    ChannelModel m;
    CHECK(path_loss_db(1.0, m) == m.reference_loss_db);
    CHECK(path_loss_db(0.2, m) == m.reference_loss_db);
}

TEST_CASE("path loss at ten metres with exponent three")
{
    ChannelModel m;
    m.path_loss_exponent = 3.0;
    m.reference_loss_db = 40.0;
    CHECK(path_loss_db(10.0, m) == doctest::Approx(70.0).epsilon(1e-12));
}

TEST_CASE("path loss at 250 m with exponent 3.5")
{
    ChannelModel m;
    m.path_loss_exponent = 3.5;
    m.reference_loss_db = 40.0;
    CHECK(path_loss_db(250.0, m) == doctest::Approx(123.92790030352132).epsilon(1e-12));
}

TEST_CASE("AWGN fading is always one")
{
    const ChannelModel m = model_with(FadingKind::Awgn);
    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
        CHECK(sample_fading(m, rng) == 1.0);
    }
}

TEST_CASE("Rayleigh and Rice fading have unit mean")
{
    CHECK(sample_mean(model_with(FadingKind::Rayleigh), 11, 1000000) == doctest::Approx(1.0).epsilon(0.01));
    ChannelModel rice = model_with(FadingKind::Rice);
    rice.fading.rice_k_db = 6.0;
    CHECK(sample_mean(rice, 12, 1000000) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("SINR without interferers is the SNR")
{
    const double signal = dbm_to_mw(-80.0);
    CHECK(sinr_db(signal, {}, dbm_to_mw(-110.0)) == doctest::Approx(30.0).epsilon(1e-12));
}

TEST_CASE("one interferer at the signal power gives about 0 dB")
{
    const double signal = dbm_to_mw(-60.0);
    const std::vector<double> interference{signal};
    CHECK(sinr_db(signal, interference, dbm_to_mw(-140.0)) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("three interferers match a linear recomputation")
{
    const double s = dbm_to_mw(-70.0);
    const std::vector<double> i{dbm_to_mw(-85.0), dbm_to_mw(-90.0), dbm_to_mw(-88.5)};
    const double n = dbm_to_mw(-110.0);
    const double expected = 10.0 * std::log10(s / (n + i[0] + i[1] + i[2]));
    CHECK(sinr_db(s, i, n) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("link SINR uses tx power, gain and the fading draws")
{
    Network net = testgen::line_network(1, {{300, 250}, {400, 250}});
    testgen::add_link(net, 1, 0, LinkKind::Uplink, 0.9);
    ChannelModel m;
    const PathGainTable gains(net, m);
    const std::vector<NodeId> interferers{2};
    const std::vector<double> fading{0.5, 2.0};
    const double s = dbm_to_mw(20.0 - path_loss_db(50.0, m)) * 0.5;
    const double i = dbm_to_mw(20.0 - path_loss_db(150.0, m)) * 2.0;
    CHECK(link_sinr_db(net.links[0], interferers, gains, fading, m) ==
          doctest::Approx(10.0 * std::log10(s / (m.noise_mw() + i))).epsilon(1e-12));
    const std::vector<NodeId> self{1};
    CHECK_THROWS_AS(link_sinr_db(net.links[0], self, gains, fading, m), std::invalid_argument);
}

TEST_CASE("SINR falls as interferers are added")
{
    Rng rng(4);
    for (int trial = 0; trial < 200; ++trial) {
        const double s = dbm_to_mw(rng.uniform(-90, -50));
        std::vector<double> interference;
        double last = sinr_db(s, interference, dbm_to_mw(-110));
        for (int k = 0; k < 6; ++k) {
            interference.push_back(dbm_to_mw(rng.uniform(-120, -60)));
            const double now = sinr_db(s, interference, dbm_to_mw(-110));
            CHECK(now < last);
            last = now;
        }
    }
}

TEST_CASE("logistic PDR curve midpoint, inverse and a pinned value")
{
    ChannelModel m;
    CHECK(pdr_from_sinr(m.pdr.gamma50_db, m) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(pdr_from_sinr(sinr_from_pdr(0.9, m), m) == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(pdr_from_sinr(10.0, m) == doctest::Approx(0.96083427720323564).epsilon(1e-12));
    CHECK_THROWS_AS(sinr_from_pdr(0.0, m), std::domain_error);
    CHECK_THROWS_AS(sinr_from_pdr(1.0, m), std::domain_error);
}

TEST_CASE("PDR curve is increasing and round-trips over -20..40 dB")
{
    ChannelModel m;
    double prev = -1.0;
    for (double g = -20.0; g <= 40.0; g += 0.25) {
        const double p = pdr_from_sinr(g, m);
        CHECK(p > prev);
        prev = p;
        // Round-trip in probability space; dB space is ill-conditioned near 0 and 1.
        if (p > 0.0 && p < 1.0) {
            CHECK(std::abs(pdr_from_sinr(sinr_from_pdr(p, m), m) - p) < 1e-12);
        }
        if (p > 1e-3 && p < 1.0 - 1e-3) {
            CHECK(std::abs(sinr_from_pdr(p, m) - g) < 1e-9);
        }
    }
}

TEST_CASE("fading-averaged curve equals the logistic under AWGN")
{
    const ChannelModel m = model_with(FadingKind::Awgn);
    for (double g : {-5.0, 3.0, 6.0, 9.5, 20.0}) {
        CHECK(mean_pdr_from_sinr(g, m) == doctest::Approx(pdr_from_sinr(g, m)).epsilon(1e-12));
    }
    CHECK(mean_sinr_from_pdr(0.9, m) == doctest::Approx(sinr_from_pdr(0.9, m)).epsilon(1e-12));
}

TEST_CASE("fading-averaged curve matches Monte-Carlo under Rayleigh and Rice")
{
    for (FadingKind kind : {FadingKind::Rayleigh, FadingKind::Rice}) {
        const ChannelModel m = model_with(kind);
        for (double mean_db : {5.0, 12.0, 20.0}) {
            Rng rng(21);
            double sum = 0.0;
            const int n = 200000;
            for (int i = 0; i < n; ++i) {
                sum += pdr_from_sinr(mean_db + linear_to_db(sample_fading(m, rng)), m);
            }
            CHECK(mean_pdr_from_sinr(mean_db, m) == doctest::Approx(sum / n).epsilon(0.005));
        }
    }
}

TEST_CASE("fading raises the mean SINR a target needs, and the inverse round-trips")
{
    const ChannelModel ray = model_with(FadingKind::Rayleigh);
    const ChannelModel awgn = model_with(FadingKind::Awgn);
    for (double p : {0.5, 0.8, 0.9, 0.95}) {
        CHECK(mean_sinr_from_pdr(p, ray) > mean_sinr_from_pdr(p, awgn));
        CHECK(mean_pdr_from_sinr(mean_sinr_from_pdr(p, ray), ray) == doctest::Approx(p).epsilon(1e-6));
    }
    CHECK_THROWS_AS(mean_sinr_from_pdr(1.0, ray), std::domain_error);
}

TEST_CASE("channel validation rejects bad parameters")
{
    ChannelModel m;
    m.path_loss_exponent = 2.0;
    CHECK_THROWS_AS(m.validate(), ConfigError);
    m = {};
    m.pdr.slope_per_db = 0.0;
    CHECK_THROWS_AS(m.validate(), ConfigError);
    m = {};
    m.coherence_carriers = 0;
    CHECK_THROWS_AS(m.validate(), ConfigError);
    CHECK_NOTHROW(ChannelModel{}.validate());
}

TEST_CASE("carrier gain offsets are reciprocal, blockwise and absent when disabled")
{
    Network net = testgen::line_network(2, {{100, 250}, {700, 250}});
    ChannelModel m;
    Rng flat_rng(1);
    const PathGainTable flat(net, m, 50, flat_rng);
    CHECK(flat.gain_db(2, 0, 17) == flat.gain_db(2, 0));

    m.carrier_shadowing_db = 6.0;
    m.coherence_carriers = 10;
    Rng rng(1);
    const PathGainTable sel(net, m, 50, rng);
    CHECK(sel.gain_db(2, 0, 13) == sel.gain_db(0, 2, 13));
    CHECK(sel.gain_db(2, 0, 10) == sel.gain_db(2, 0, 19));
    CHECK(sel.gain_db(2, 0, 10) != sel.gain_db(2, 0, 20));
    CHECK(sel.rx_power_mw(2, 0, 5) ==
          doctest::Approx(dbm_to_mw(net.nodes[2].tx_power_dbm + sel.gain_db(2, 0, 5))).epsilon(1e-12));
    const double mean = sel.mean_gain_db(2, 0, 0, 20);
    const double expected = linear_to_db((db_to_linear(sel.gain_db(2, 0, 0)) + db_to_linear(sel.gain_db(2, 0, 10))) / 2);
    CHECK(mean == doctest::Approx(expected).epsilon(1e-12));
}
