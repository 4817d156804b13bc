#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rwre/regen.hpp"

using namespace rwre;

namespace {

Trajectory path_of(std::initializer_list<int> steps) {
    Trajectory t;
    t.dim = 2;
    for (int s : steps) t.steps.push_back(static_cast<std::uint8_t>(s));
    return t;
}

}  // namespace

TEST_CASE("short path: first candidate is time 4") {
    // e1, -e1, e1, e1, e1: heights 0 1 0 1 2 3. Time 1 is revisited at
    // height 0 later and time 3 ties the earlier maximum, so 4 comes first.
    const auto rec = find_regenerations(path_of({0, 1, 0, 0, 0}), Site{{1, 0, 0}}, 0);
    CHECK(rec.candidates == std::vector<std::uint64_t>{4, 5});
    REQUIRE(!rec.times.empty());
    CHECK(rec.times.front() == 4);
    CHECK(rec.first_position == Site{{2, 0, 0}});
}

TEST_CASE("straight path: every time is a candidate, guard certifies the early ones") {
    const auto rec = find_regenerations(path_of({0, 0, 0, 0, 0, 0}), Site{{1, 0, 0}}, 3);
    CHECK(rec.candidates == std::vector<std::uint64_t>{1, 2, 3, 4, 5, 6});
    // Final height 6 >= h + 3 for h <= 3; the last time is never certified.
    CHECK(rec.times == std::vector<std::uint64_t>{1, 2, 3});
    REQUIRE(rec.increments.size() == 2);
    CHECK(rec.increments[0].dtau == 1);
    CHECK(rec.increments[0].dx == Site{{1, 0, 0}});
}

TEST_CASE("degenerate paths") {
    CHECK(find_regenerations(path_of({}), Site{{1, 0, 0}}).candidates.empty());
    // A path that only goes backwards has no candidates.
    CHECK(find_regenerations(path_of({1, 1, 1}), Site{{1, 0, 0}}).candidates.empty());
    // Sideways steps never raise the height.
    CHECK(find_regenerations(path_of({2, 3, 2}), Site{{1, 0, 0}}).candidates.empty());
}

TEST_CASE("detector matches the quadratic oracle on random paths") {
    const std::vector<EnvironmentLaw> laws = {
        EnvironmentLaw::drift_perturbed(2, 0.2, 0, 0.05),
        EnvironmentLaw::drift_perturbed(3, 0.3, 0, 0.02),
        EnvironmentLaw::uniform(2),
    };
    const std::vector<Site> dirs = {Site{{1, 0, 0}}, Site{{1, 1, 0}}, Site{{2, -1, 0}}};
    for (const auto& law : laws) {
        for (const auto& dir : dirs) {
            for (std::uint64_t t = 0; t < 30; ++t) {
                const auto traj = run_annealed(law, Site{}, FixedSteps{300}, 300, t, 77).first;
                const auto h = oracle::heights(traj, dir);
                CHECK(find_regenerations(traj, dir).candidates == oracle::regeneration_candidates(h));
            }
        }
    }
}

TEST_CASE("detector matches the oracle on integer height sequences with ties") {
    SplitMix64 g(8);
    for (int rep = 0; rep < 500; ++rep) {
        std::vector<std::int64_t> h{0};
        const int n = 1 + static_cast<int>(g() % 40);
        for (int i = 0; i < n; ++i) h.push_back(h.back() + static_cast<std::int64_t>(g() % 5) - 1);
        CHECK(find_regenerations(h, 0).candidates == oracle::regeneration_candidates(h));
    }
}

TEST_CASE("increments of a renewal sequence look independent") {
    // Geometric gaps: a true renewal process.
    std::vector<RegenerationRecord> recs(50);
    SplitMix64 g(1);
    for (auto& r : recs) {
        for (int i = 0; i < 40; ++i) {
            RegenerationIncrement inc;
            inc.dtau = 1 + static_cast<std::uint64_t>(g.exponential() * 10);
            inc.dx = Site{{static_cast<std::int64_t>(inc.dtau), 0, 0}};
            r.increments.push_back(inc);
        }
    }
    const auto rep = iid_diagnostics(recs);
    CHECK_FALSE(rep.insufficient);
    CHECK(rep.increments == 2000);
    CHECK(std::abs(rep.lag1_autocorrelation) < 0.1);
    CHECK(rep.ks_p_value > 0.001);
    CHECK(rep.mean_dtau == doctest::Approx(rep.mean_dx[0]));
}

TEST_CASE("too few increments are flagged") {
    std::vector<RegenerationRecord> recs(3);
    CHECK(iid_diagnostics(recs).insufficient);
}

TEST_CASE("tail estimate of exponential samples") {
    std::vector<double> xs;
    SplitMix64 g(2);
    for (int i = 0; i < 20000; ++i) xs.push_back(g.exponential() * 10.0);
    const std::vector<double> grid{5, 10, 20, 40, 1e6};
    const auto est = tail_estimate(xs, grid);
    REQUIRE(est.points.size() == 5);
    for (std::size_t i = 0; i < 4; ++i) {
        const double s = std::exp(-grid[i] / 10.0);
        CHECK(est.points[i].lower <= s);
        CHECK(est.points[i].upper >= s);
    }
    CHECK(est.points[4].beyond_max);
    CHECK(est.points[4].survival == 0.0);
    CHECK(est.points[4].upper > 0.0);
    REQUIRE(est.fit.has_value());
    // Exponential tails are power-like in log(-log S), not log-like.
    CHECK(est.fit->non_log_shape);
    CHECK(est.fit->power_slope == doctest::Approx(1.0).epsilon(0.1));
    CHECK_THROWS(tail_estimate(std::vector<double>{}, grid));
}
