#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rwre/kernel.hpp"
#include "rwre/torus.hpp"

using namespace rwre;

TEST_CASE("two-step simple random walk kernel") {
    const Environment env(EnvironmentLaw::uniform(2), 0);
    const auto k = heat_kernel_forward(env, Site{}, 2);
    CHECK(k.at(Site{}) == doctest::Approx(0.25));
    CHECK(k.at(Site{{2, 0, 0}}) == doctest::Approx(1.0 / 16));
    CHECK(k.at(Site{{0, -2, 0}}) == doctest::Approx(1.0 / 16));
    CHECK(k.at(Site{{1, -1, 0}}) == doctest::Approx(1.0 / 8));
    CHECK(k.at(Site{{1, 0, 0}}) == 0.0);
    CHECK(k.total() == doctest::Approx(1.0));
}

TEST_CASE("forward kernel equals path enumeration") {
    for (int dim : {1, 2, 3}) {
        const Environment env(EnvironmentLaw::drift_perturbed(dim, 0.2, 0, default_kappa(dim)), 31);
        const Site z{{1, dim > 1 ? -1 : 0, 0}};
        const int n = dim == 3 ? 3 : 4;
        const auto k = heat_kernel_forward(env, z, static_cast<std::uint64_t>(n));
        const auto exact = oracle::enumerate_kernel(env, z, n);
        double total = 0;
        for (const auto& [x, p] : exact) {
            CHECK(k.at(x) == doctest::Approx(p).epsilon(1e-12));
            total += k.at(x);
        }
        CHECK(total == doctest::Approx(k.total()).epsilon(1e-14));
    }
}

TEST_CASE("one forward pass gives the same fields as separate runs") {
    const Environment env(EnvironmentLaw::drift_perturbed(2, 0.2, 0, 0.05), 2);
    const std::uint64_t times[] = {0, 3, 10};
    const auto many = heat_kernel_forward_at(env, Site{}, times);
    REQUIRE(many.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        const auto one = heat_kernel_forward(env, Site{}, times[i]);
        CHECK(one.values() == many[i].values());
    }
}

TEST_CASE("forward and backward recursions are dual") {
    const Environment env(EnvironmentLaw::drift_perturbed(2, 0.2, 0, 0.05), 6);
    for (std::uint64_t n = 0; n <= 4; ++n) {
        const auto h = backward_kernel(env, n);
        double sum_back = 0.0, sum_fwd = 0.0;
        for (int x = -2; x <= 2; ++x) {
            for (int y = -2; y <= 2; ++y) {
                const Site z{{x, y, 0}};
                const double fwd = heat_kernel_forward(env, z, n).at(Site{});
                CHECK(h.at(z) == doctest::Approx(fwd).epsilon(1e-13));
                sum_back += h.at(z);
                sum_fwd += fwd;
            }
        }
        CHECK(sum_back == doctest::Approx(sum_fwd).epsilon(1e-13));
        // The whole ball, not just the 5x5 window.
        double f = 0.0;
        for_each_ball_site(2, static_cast<std::int64_t>(n), static_cast<int>(n % 2),
                           [&](const Site& z) { f += heat_kernel_forward(env, z, n).at(Site{}); });
        CHECK(f_n_exact(env, n) == doctest::Approx(f).epsilon(1e-13));
    }
}

TEST_CASE("forward fields conserve mass") {
    const Environment e1(EnvironmentLaw::drift_perturbed(1, 0.3, 0, 0.1), 3);
    CHECK(std::abs(heat_kernel_forward(e1, Site{}, 1000).total() - 1.0) < 1e-10);
    const Environment e2(EnvironmentLaw::drift_perturbed(2, 0.2, 0, 0.05), 3);
    const auto k = heat_kernel_forward(e2, Site{}, 300);
    CHECK(std::abs(k.total() + k.pruned_mass() - 1.0) < 1e-10);
    const Environment e3(EnvironmentLaw::drift_perturbed(3, 0.3, 0, 0.02), 3);
    CHECK(std::abs(heat_kernel_forward(e3, Site{}, 40).total() - 1.0) < 1e-10);
}

TEST_CASE("f_n in a constant environment is 1") {
    const auto law = EnvironmentLaw::constant(make_site_dist(std::vector<double>{0.4, 0.2, 0.25, 0.15}));
    const Environment env(law, 0);
    const auto f = f_n_sequence(env, 64);
    CHECK(f[0] == 1.0);
    for (double v : f) CHECK(std::abs(v - 1.0) < 1e-12);
}

TEST_CASE("f_n is strictly positive and h_n has the ellipticity floor") {
    const double kappa = 0.05;
    const Environment env(EnvironmentLaw::drift_perturbed(2, 0.2, 0, kappa), 10);
    const std::uint64_t n = 12;
    const auto h = backward_kernel(env, n);
    for_each_ball_site(2, static_cast<std::int64_t>(n), 0,
                       [&](const Site& z) { CHECK(h.at(z) >= std::pow(kappa, static_cast<double>(n))); });
    CHECK(f_n_exact(env, n) > 0.0);
}

TEST_CASE("environment average of f_n is near 1") {
    const auto law = EnvironmentLaw::drift_perturbed(2, 0.2, 0, 0.05);
    const auto tail = f_n_tail(law, 16, 150, std::vector<double>{1.0, 2.0}, 4, 2);
    CHECK(std::abs(tail.mean.mean - 1.0) < 4 * tail.mean.se);
    REQUIRE(tail.survival.size() == 2);
    CHECK(tail.survival[0].survival >= tail.survival[1].survival);
}

TEST_CASE("f_n tail does not depend on the thread count") {
    const auto law = EnvironmentLaw::drift_perturbed(2, 0.2, 0, 0.05);
    const auto a = f_n_tail(law, 8, 20, {}, 3, 1);
    const auto b = f_n_tail(law, 8, 20, {}, 3, 5);
    CHECK(a.samples == b.samples);
}

TEST_CASE("local CLT for the simple random walk") {
    const auto law = EnvironmentLaw::uniform(2);
    const auto r = local_clt_gap(law, 100, 1, 0);
    CHECK_FALSE(r.singular);
    CHECK(r.tv < 0.1);
    CHECK(r.covariance[0][0] == doctest::Approx(50.0).epsilon(1e-9));
    CHECK(std::abs(r.mean[0]) < 1e-12);
}

TEST_CASE("local CLT of a point mass is singular") {
    KernelField k(KernelField::Kind::forward, 2, 0, Site{});
    k.values()[k.box().index(Site{})] = 1.0;
    CHECK(local_clt_report(k).singular);
}

TEST_CASE("annealed decay of the simple random walk") {
    const auto law = EnvironmentLaw::uniform(2);
    const std::uint64_t grid[] = {16, 32, 64, 128};
    const auto d = annealed_kernel_decay(law, grid, 1, 0);
    CHECK(d.fit.slope == doctest::Approx(-1.0).epsilon(0.05));
}

TEST_CASE("kernel volume guard") {
    const Environment env(EnvironmentLaw::uniform(3), 0);
    CHECK_THROWS_AS(heat_kernel_forward(env, Site{}, 1000), ResourceGuardError);
    try {
        f_n_exact(env, 1000);
    } catch (const ResourceGuardError& e) {
        CHECK(e.guard() == "kernel-volume");
    }
}

TEST_CASE("torus stationary law matches a dense linear solve") {
    for (auto [dim, side] : {std::pair{1, 4}, std::pair{2, 3}}) {
        const auto law = EnvironmentLaw::drift_perturbed(dim, 0.2, 0, default_kappa(dim));
        const Environment env(law, 13);
        const auto chain = torus_stationary(env, side);
        const std::size_t n = chain.states();
        std::vector<std::vector<double>> P(n, std::vector<double>(n, 0.0));
        for (std::size_t s = 0; s < n; ++s)
            for (int e = 0; e < num_steps(dim); ++e) P[s][chain.neighbor(s, e)] += chain.rows[s][e];
        const auto pi = oracle::stationary_dense(P);
        CHECK(chain.converged);
        CHECK(chain.residual <= 1e-10);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(chain.stationary[i] == doctest::Approx(pi[i]).epsilon(1e-9));
            CHECK(chain.stationary[i] > 0.0);
        }
    }
}

TEST_CASE("torus state indexing") {
    const Environment env(EnvironmentLaw::uniform(2), 0);
    const auto chain = torus_stationary(env, 5);
    for (std::size_t s = 0; s < chain.states(); ++s) CHECK(chain.state_of(chain.site_of(s)) == s);
    CHECK(chain.state_of(Site{{-1, 5, 0}}) == chain.state_of(Site{{4, 0, 0}}));
    for (double d : chain.density) CHECK(d == doctest::Approx(1.0));
}

TEST_CASE("torus f_n approaches the stationary density") {
    const Environment env(EnvironmentLaw::drift_perturbed(2, 0.2, 0, 0.05), 5);
    const auto c = torus_fn_consistency(env, 5, 500);
    CHECK(c.gap < 1e-6);
    CHECK(torus_f_sequence(env, 5, 3).front() == 1.0);
}
