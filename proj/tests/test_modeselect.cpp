#include <doctest.h>

#include <cmath>
#include <vector>

#include "ucs/modeselect.hpp"

using namespace ucs;

namespace {

BanditState with_history(std::uint64_t epoch, const std::vector<std::pair<std::uint64_t, double>>& arms)
{
    BanditState s;
    s.epoch = epoch;
    for (std::size_t k = 0; k < arms.size(); ++k) {
        s.arms[k].observations = arms[k].first;
        s.arms[k].selections = arms[k].first;
        s.arms[k].reward_sum = arms[k].second * static_cast<double>(arms[k].first);
    }
    return s;
}

// Two-arm Gaussian bandit with unit noise; returns pulls of the worse arm
// after each horizon in `checkpoints`.
std::vector<std::uint64_t> worse_arm_pulls(std::uint64_t seed, double gap, const std::vector<std::uint64_t>& checkpoints)
{
    BanditState s;
    Rng select_rng(seed);
    Rng noise(seed + 1000);
    const std::vector<double> means{0.0, -gap};
    std::vector<std::uint64_t> out;
    std::uint64_t worse = 0;
    std::size_t next = 0;
    for (std::uint64_t t = 1; next < checkpoints.size(); ++t) {
        const std::size_t arm = hdsee_select(s, select_rng);
        hdsee_update(s, arm, means[arm] + noise.normal());
        worse += arm == 1 ? 1 : 0;
        if (t == checkpoints[next]) {
            out.push_back(worse);
            ++next;
        }
    }
    return out;
}

} // namespace

TEST_CASE("rewards are negative exclusion-region sizes")
{
    CHECK(mode_reward(PairMode::D2D, 0.0, 5.0, 5.0) == 0.0);
    CHECK(mode_reward(PairMode::Cellular, 1.0, 3.0, 4.0) == -7.0);
    CHECK(mode_reward(PairMode::D2D, 2.5, 3.0, 4.0) == -2.5);
}

TEST_CASE("greedy rule compares the D2D region with the cellular pair")
{
    CHECK(greedy_mode(8.0, 7.0, PairMode::D2D) == PairMode::Cellular);
    CHECK(greedy_mode(6.0, 7.0, PairMode::Cellular) == PairMode::D2D);
    CHECK(greedy_mode(7.0, 7.0, PairMode::Cellular) == PairMode::Cellular);
}

TEST_CASE("unobserved arms are played first, in order")
{
    BanditState s;
    Rng rng(1);
    CHECK(hdsee_select(s, rng) == 0);
    hdsee_update(s, 0, -3.0);
    const auto d = hdsee_evaluate(s, rng);
    CHECK(d.initializing);
    CHECK(d.chosen == 1);
}

TEST_CASE("settled arms exploit the estimated best")
{
    // t = 100, S = 10 each, gap 5: J = 5 - 2 sqrt(2 log(4000) / 10) = 2.4241040952550854,
    // D = 2 log(4000) / J^2 = 2.8228909112600283 < 10 for both arms.
    const BanditState s = with_history(100, {{10, -2.0}, {10, -7.0}});
    Rng rng(1);
    const auto d = hdsee_evaluate(s, rng);
    CHECK(d.log_term == doctest::Approx(8.2940496401020277).epsilon(1e-12));
    CHECK(d.j[1] == doctest::Approx(2.4241040952550854).epsilon(1e-12));
    CHECK(d.control[1] == doctest::Approx(2.8228909112600283).epsilon(1e-12));
    CHECK(d.control[0] == doctest::Approx(2.8228909112600283).epsilon(1e-12));
    CHECK_FALSE(d.exploring);
    CHECK(d.chosen == 0);
    CHECK(d.estimated_best == 0);
}

TEST_CASE("equal means force exploration")
{
    const BanditState s = with_history(50, {{25, -4.0}, {25, -4.0}});
    Rng rng(2);
    const auto d = hdsee_evaluate(s, rng);
    CHECK(d.j[1] == 0.0);
    CHECK(std::isinf(d.control[1]));
    CHECK(d.exploring);
}

TEST_CASE("an under-sampled suboptimal arm is explored without a draw")
{
    // t = 1000, gap 6, S = 3: J = 0.68 and D = 45.8, met by the best arm only.
    const BanditState s = with_history(1000, {{900, 0.0}, {3, -6.0}});
    Rng a(5);
    Rng b(6);
    const auto da = hdsee_evaluate(s, a);
    const auto db = hdsee_evaluate(s, b);
    CHECK(da.exploring);
    CHECK(da.chosen == 1);
    CHECK(db.chosen == 1);
    CHECK(a.next_u64() == Rng(5).next_u64());
}

TEST_CASE("update keeps running means and counts")
{
    BanditState s;
    hdsee_update(s, 1, -4.0);
    CHECK(s.arms[1].mean() == -4.0);
    hdsee_update(s, 1, -6.0);
    CHECK(s.arms[1].mean() == -5.0);
    CHECK(s.arms[1].selections == 2);
    CHECK(s.arms[1].observations <= s.arms[1].selections);
    CHECK(s.epoch == 2);
}

TEST_CASE("realized regret adds gaps and observation costs")
{
    BanditParams p;
    p.cost = {0.5, 0.25};
    BanditState s(p);
    const std::vector<double> means{-1.0, -3.0};
    hdsee_update(s, 0, -1.0, means);
    hdsee_update(s, 1, -3.0, means);
    hdsee_update(s, 1, -3.0, means);
    // gap*N + c*S = 2*2 + 0.5*1 + 0.25*2
    CHECK(s.realized_regret == doctest::Approx(5.0));
}

TEST_CASE("selection is invariant to shifting every reward")
{
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        BanditState a;
        BanditState b;
        Rng ra(seed);
        Rng rb(seed);
        Rng noise(seed * 7);
        const std::vector<double> means{-2.0, -3.5};
        for (int t = 0; t < 400; ++t) {
            const std::size_t arm_a = hdsee_select(a, ra);
            const std::size_t arm_b = hdsee_select(b, rb);
            REQUIRE(arm_a == arm_b);
            const double r = means[arm_a] + noise.normal();
            hdsee_update(a, arm_a, r);
            hdsee_update(b, arm_b, r + 100.0);
        }
    }
}

TEST_CASE("worse-arm pulls grow sub-linearly")
{
    double r_small = 0.0;
    double r_large = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto pulls = worse_arm_pulls(seed, 2.0, {1000, 2000, 10000, 20000});
        r_small += static_cast<double>(pulls[1]) / static_cast<double>(pulls[0]) / 20.0;
        r_large += static_cast<double>(pulls[3]) / static_cast<double>(pulls[2]) / 20.0;
    }
    CHECK(r_small < 1.8);
    CHECK(r_large < 1.8);
}
