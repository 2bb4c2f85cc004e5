#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "gen.hpp"
#include "ucs/errors.hpp"
#include "ucs/prk.hpp"
#include "ucs/units.hpp"

using namespace ucs;

namespace {

// One uplink 1 -> 0 and interferers 2.. with all UE powers at 0 dBm, so a
// map gain of g dB is a received power of g dBm.
struct Fixture {
    Network net;
    SignalMap map;
    std::vector<NodeId> candidates;
};

Fixture fixture(double signal_dbm, const std::vector<double>& interferer_dbm, double target = 0.9)
{
    std::vector<Position> ues(1 + interferer_dbm.size(), Position{300, 250});
    Fixture f{testgen::line_network(1, ues, 0.0), SignalMap(0, 2 + interferer_dbm.size(), 0.1), {}};
    testgen::add_link(f.net, 1, 0, LinkKind::Uplink, target);
    f.map.update_gain(1, signal_dbm);
    for (std::size_t i = 0; i < interferer_dbm.size(); ++i) {
        f.map.update_gain(2 + i, interferer_dbm[i]);
        f.candidates.push_back(2 + i);
    }
    return f;
}

PrkState state_with_y(double k, double target, int successes, int failures)
{
    PrkState s;
    s.k = k;
    s.target = target;
    s.estimator = ReliabilityEstimator(EstimatorParams{0.05, static_cast<std::uint32_t>(successes + failures)});
    for (int i = 0; i < successes; ++i) {
        s.estimator.record_outcome(true);
    }
    for (int i = 0; i < failures; ++i) {
        s.estimator.record_outcome(false);
    }
    return s;
}

double k_db(double k) { return 10.0 * std::log10(k); }

} // namespace

TEST_CASE("carrier groups cover every carrier exactly once")
{
    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const auto n_total = 1 + static_cast<std::uint32_t>(rng.below(120));
        const auto n = 1 + static_cast<std::uint32_t>(rng.below(n_total));
        const CarrierGrouping g(n_total, n);
        std::vector<int> hits(n_total, 0);
        for (GroupId k = 0; k < g.group_count(); ++k) {
            const auto r = g.group(k);
            CHECK(r.size() >= 1);
            for (CarrierId c = r.first; c < r.last; ++c) {
                ++hits[c];
                CHECK(g.group_of(c) == k);
            }
        }
        CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    }
    CHECK_THROWS_AS(CarrierGrouping(10, 0), ConfigError);
    CHECK_THROWS_AS(CarrierGrouping(10, 11), ConfigError);
}

TEST_CASE("equal powers with K = 1 sit on the boundary and are inside")
{
    Fixture f = fixture(-80.0, {-80.0});
    CHECK(in_exclusion_region(f.net, f.map, f.net.links[0], 2, 1.0));
}

TEST_CASE("vanishing K empties the region")
{
    Fixture f = fixture(-80.0, {-40.0, -60.0, -95.0});
    for (NodeId c : f.candidates) {
        CHECK_FALSE(in_exclusion_region(f.net, f.map, f.net.links[0], c, 1e-12));
    }
}

TEST_CASE("K = 40 admits a node 15 dB below the signal")
{
    Fixture f = fixture(-80.0, {-95.0, -96.5});
    CHECK(k_db(40.0) == doctest::Approx(16.020599913279624).epsilon(1e-12));
    CHECK(in_exclusion_region(f.net, f.map, f.net.links[0], 2, 40.0));
    CHECK_FALSE(in_exclusion_region(f.net, f.map, f.net.links[0], 3, 40.0));
}

TEST_CASE("nodes outside the map and the link endpoints are never inside")
{
    Fixture f = fixture(-80.0, {-70.0});
    CHECK_FALSE(in_exclusion_region(f.net, f.map, f.net.links[0], 1, 1e6));
    CHECK_FALSE(in_exclusion_region(f.net, f.map, f.net.links[0], 0, 1e6));
    f.net.nodes.push_back({3, NodeKind::UserEquipment, 0, {0, 0}, 0.0});
    CHECK_FALSE(in_exclusion_region(f.net, f.map, f.net.links[0], 3, 1e6));
}

TEST_CASE("exclusion region filters the candidates")
{
    Fixture f = fixture(-80.0, {-85.0, -99.0, -90.0, -110.0, -120.0});
    CHECK(exclusion_region(f.net, f.map, f.net.links[0], 10.0, {}).empty());
    const auto er = exclusion_region(f.net, f.map, f.net.links[0], db_to_linear(12.0), f.candidates);
    CHECK(er == std::vector<NodeId>{2, 4});
}

TEST_CASE("exclusion regions grow with K on random instances")
{
    Rng rng(17);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<double> powers(1 + rng.below(12));
        for (double& p : powers) {
            p = rng.uniform(-130, -50);
        }
        Fixture f = fixture(rng.uniform(-100, -50), powers);
        const double k1 = db_to_linear(rng.uniform(-10, 50));
        const double k2 = k1 * db_to_linear(rng.uniform(0, 20));
        const auto a = exclusion_region(f.net, f.map, f.net.links[0], k1, f.candidates);
        const auto b = exclusion_region(f.net, f.map, f.net.links[0], k2, f.candidates);
        CHECK(std::includes(b.begin(), b.end(), a.begin(), a.end()));
        // Brute-force predicate check.
        for (std::size_t i = 0; i < powers.size(); ++i) {
            const bool inside = std::find(b.begin(), b.end(), NodeId{2 + i}) != b.end();
            const double threshold = *f.map.gain_db(1) - k_db(k2);
            CHECK(inside == (powers[i] >= threshold - 1e-9));
        }
    }
}

TEST_CASE("expected interference divides the received power by N")
{
    Fixture f = fixture(-70.0, {-90.0});
    CHECK(expected_interference_mw(f.net, f.map, 2, 1) == doctest::Approx(dbm_to_mw(-90.0)).epsilon(1e-15));
    CHECK(mw_to_dbm(expected_interference_mw(f.net, f.map, 2, 25)) ==
          doctest::Approx(-103.97940008672037).epsilon(1e-12));
    CHECK(expected_interference_mw(f.net, f.map, 2, 50) ==
          doctest::Approx(expected_interference_mw(f.net, f.map, 2, 25) / 2).epsilon(1e-15));
    CHECK(expected_interference_mw(f.net, f.map, 7, 5) == 0.0);
}

TEST_CASE("init K without a strong interferer leaves the region empty")
{
    ChannelModel m;
    Fixture f = fixture(-60.0, {-120.0, -115.0});
    const double k = init_k(f.net, f.map, f.net.links[0], f.candidates, m, PrkParams{});
    CHECK(exclusion_region(f.net, f.map, f.net.links[0], k, f.candidates).empty());
    // Just below the strongest candidate's threshold.
    CHECK(k_db(k) == doctest::Approx(-60.0 + 115.0).epsilon(1e-6));
}

TEST_CASE("init K puts a boundary interferer exactly on the region boundary")
{
    ChannelModel m;
    const double s = -70.0;
    // Interference that alone gives exactly the mean SINR the target needs.
    const double need_db = mean_sinr_from_pdr(0.9, m);
    const double boundary_dbm = mw_to_dbm(dbm_to_mw(s - need_db) - m.noise_mw());

    Fixture stronger = fixture(s, {boundary_dbm + 0.01, boundary_dbm - 20.0});
    const double k = init_k(stronger.net, stronger.map, stronger.net.links[0], stronger.candidates, m, PrkParams{});
    CHECK(k_db(k) == doctest::Approx(s - (boundary_dbm + 0.01)).epsilon(1e-12));
    CHECK(exclusion_region(stronger.net, stronger.map, stronger.net.links[0], k, stronger.candidates) ==
          std::vector<NodeId>{2});

    Fixture weaker = fixture(s, {boundary_dbm - 0.01});
    const double k_weak = init_k(weaker.net, weaker.map, weaker.net.links[0], weaker.candidates, m, PrkParams{});
    CHECK(exclusion_region(weaker.net, weaker.map, weaker.net.links[0], k_weak, weaker.candidates).empty());
}

TEST_CASE("init K does not decrease with the target")
{
    ChannelModel m;
    Rng rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> powers(1 + rng.below(10));
        for (double& p : powers) {
            p = rng.uniform(-120, -60);
        }
        const double s = rng.uniform(-90, -55);
        double last = 0.0;
        for (double t : {0.5, 0.7, 0.8, 0.85, 0.9, 0.95, 0.99}) {
            Fixture f = fixture(s, powers, t);
            const double k = init_k(f.net, f.map, f.net.links[0], f.candidates, m, PrkParams{});
            CHECK(k >= last);
            last = k;
        }
    }
}

TEST_CASE("adapt K: unchanged at target, grows below it, no-op when cold")
{
    ChannelModel m;
    PrkParams p;
    Fixture f = fixture(-70.0, {-80.0, -95.0});
    const double k0 = db_to_linear(12.0); // -80 inside, -95 outside

    PrkState at = state_with_y(k0, 0.9, 9, 1);
    at.link = 0;
    CHECK(adapt_k(at, f.net, f.map, f.candidates, m, p, 1) == k0);

    PrkState below = state_with_y(k0, 0.9, 5, 5);
    const double k1 = adapt_k(below, f.net, f.map, f.candidates, m, p, 1);
    CHECK(k1 > k0);
    CHECK(in_exclusion_region(f.net, f.map, f.net.links[0], 3, k1));

    PrkState cold = below;
    cold.estimator.begin_period();
    CHECK(adapt_k(cold, f.net, f.map, f.candidates, m, p, 1) == k0);
}

TEST_CASE("adapt K moves in the right direction on random instances")
{
    ChannelModel m;
    PrkParams p;
    Rng rng(31);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> powers(1 + rng.below(15));
        for (double& v : powers) {
            v = rng.uniform(-130, -60);
        }
        Fixture f = fixture(rng.uniform(-90, -55), powers);
        const double k = db_to_linear(rng.uniform(-5, 40));
        const int n = 40;
        const int ok = static_cast<int>(rng.below(n + 1));
        PrkState s = state_with_y(k, 0.9, ok, n - ok);
        const double y = *s.estimator.y();
        const double next = adapt_k(s, f.net, f.map, f.candidates, m, p, 1 + static_cast<std::uint32_t>(rng.below(50)));
        if (y < 0.9) {
            CHECK(next >= k);
        }
        if (y > 0.9 + p.hysteresis) {
            CHECK(next <= k);
        }
        CHECK(next >= p.k_min);
        CHECK(next <= p.k_max);
    }
}

TEST_CASE("regulate backs off releases that had to be undone")
{
    ChannelModel m;
    PrkParams p;
    Fixture f = fixture(-70.0, {-78.0, -80.0, -82.0, -95.0});
    PrkState s = state_with_y(db_to_linear(26.0), 0.9, 20, 0); // all four inside, Y = 1
    CHECK(regulate(s, f.net, f.map, f.candidates, m, p, 1));
    CHECK(s.last_step_released);
    const double released = s.k;

    PrkState low = state_with_y(released, 0.9, 10, 10);
    low.last_step_released = true;
    CHECK(regulate(low, f.net, f.map, f.candidates, m, p, 1));
    CHECK(low.k > released);
    CHECK(low.release_hold == 1);

    // The next lowering is held for one step.
    PrkState high = state_with_y(low.k, 0.9, 20, 0);
    high.release_hold = low.release_hold;
    high.release_backoff = low.release_backoff;
    CHECK_FALSE(regulate(high, f.net, f.map, f.candidates, m, p, 1));
    CHECK(high.release_hold == 0);
    CHECK(regulate(high, f.net, f.map, f.candidates, m, p, 1));
}

TEST_CASE("regulation drives mean Y into [T, T + 0.05] under stationary interference")
{
    // Ten links on one carrier: the regulated link and nine interfering links
    // whose transmitters stay silent while inside its exclusion region and
    // otherwise transmit in every slot. Y is noisy over a 200-slot period, so
    // the mean over periods 40..49 is averaged across 20 seeds.
    ChannelModel m;
    PrkParams p;
    const double target = 0.9;
    const double s_dbm = -75.0;
    std::vector<double> powers;
    for (int i = 0; i < 9; ++i) {
        powers.push_back(-82.0 - 2.5 * i);
    }
    Fixture f = fixture(s_dbm, powers, target);
    double grand = 0.0;
    int in_band = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        PrkState st;
        st.link = 0;
        st.target = target;
        st.k = init_k(f.net, f.map, f.net.links[0], f.candidates, m, p);
        st.estimator = ReliabilityEstimator(EstimatorParams{0.05, 20});
        Rng rng(seed);
        double mean_y = 0.0;
        for (int period = 0; period < 50; ++period) {
            st.estimator.begin_period();
            const auto er = exclusion_region(f.net, f.map, f.net.links[0], st.k, f.candidates);
            for (int slot = 0; slot < 200; ++slot) {
                double interference = 0.0;
                for (std::size_t i = 0; i < powers.size(); ++i) {
                    if (std::find(er.begin(), er.end(), NodeId{2 + i}) == er.end()) {
                        interference += dbm_to_mw(powers[i]) * sample_fading(m, rng);
                    }
                }
                const double signal = dbm_to_mw(s_dbm) * sample_fading(m, rng);
                st.estimator.record_outcome(
                    rng.bernoulli(pdr_from_sinr(linear_to_db(signal / (m.noise_mw() + interference)), m)));
            }
            if (period >= 40) {
                mean_y += *st.estimator.y() / 10.0;
            }
            regulate(st, f.net, f.map, f.candidates, m, p, 1);
        }
        grand += mean_y / 20.0;
        in_band += mean_y >= target && mean_y <= target + 0.05 ? 1 : 0;
    }
    CHECK(grand >= target);
    CHECK(grand <= target + 0.05);
    CHECK(in_band >= 15);
}
