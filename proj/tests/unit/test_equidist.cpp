#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "polydyn/equidist.hpp"
#include "polydyn/linearize.hpp"
#include "polydyn/util.hpp"

using namespace polydyn;

namespace {

cpoly zsq() { return cpoly::monomial(cd(1, 0), 2); }
cpoly cheb() { return cpoly({cd(-2, 0), cd(0, 0), cd(1, 0)}); }
cpoly basilica() { return cpoly({cd(-1, 0), cd(0, 0), cd(1, 0)}); }

std::vector<cd> circle_points(int n, double radius = 1.0) {
    std::vector<cd> pts((std::size_t)n);
    for (int k = 0; k < n; ++k) pts[std::size_t(k)] = radius * std::exp(cd(0, 2 * kPi * k / n));
    return pts;
}

}  // namespace

TEST_CASE("bl_distance: metric sanity") {
    rect_t rect{-2, 2, -2, 2};
    empirical_measure mu = empirical_measure::uniform(circle_points(64));
    CHECK(bl_distance(mu, mu, rect) <= 1e-15);

    empirical_measure d0 = empirical_measure::uniform({cd(0, 0)});
    empirical_measure d1 = empirical_measure::uniform({cd(1, 0)});
    double v = bl_distance(d0, d1, rect);
    CHECK(v > 0.0);
    CHECK(v <= 1.0);

    // separation monotonicity along a ray
    double prev = 0.0;
    for (double t : {0.25, 0.5, 1.0, 1.5}) {
        double dt = bl_distance(d0, empirical_measure::uniform({cd(t, 0)}), rect);
        CHECK(dt >= prev - 1e-12);
        prev = dt;
    }
}

TEST_CASE("bl_distance: Monte Carlo rate against a finer circle sample") {
    rect_t rect{-2, 2, -2, 2};
    std::vector<double> vals;
    for (int N : {256, 1024, 4096}) {
        rng64 rng(100 + N);
        std::vector<cd> sample((std::size_t)N);
        for (auto& p : sample) p = std::exp(cd(0, rng.uniform(0, 2 * kPi)));
        empirical_measure mu = empirical_measure::uniform(sample);
        empirical_measure nu = empirical_measure::uniform(circle_points(4 * N));
        vals.push_back(bl_distance(mu, nu, rect));
    }
    // O(N^{-1/2}): quadrupling N should roughly halve the distance
    CHECK(vals[1] < vals[0]);
    CHECK(vals[2] < vals[1]);
    CHECK(vals[2] < 0.6 * vals[0]);
}

TEST_CASE("equidistribution run: Chebyshev converges") {
    cpoly f = cheb();
    rect_t rect{-2.3, 2.3, -1.5, 1.5};
    empirical_measure mu_ref = brolin_sample(f, cd(2.5, 0), 14, 2048, 31);
    equidist_options opts;
    opts.n_esc = 26;
    convergence_report rep =
        equidistribution_run(f, 1, {3, 4, 5, 6, 7}, mu_ref, rect, 96, 64, 0.12, opts);
    CHECK(rep.verdict == verdict_t::converging);
    CHECK(rep.l1_norms.size() == 5);
    CHECK(rep.bl_distances.size() == 5);
    CHECK(rep.l1_norms.back() < rep.l1_norms.front());
}

TEST_CASE("equidistribution run: exceptional map is the expected counterexample") {
    cpoly f = zsq();
    rect_t rect{-2, 2, -2, 2};
    empirical_measure mu_ref = brolin_sample(f, cd(2, 0), 12, 1024, 9);
    convergence_report rep = equidistribution_run(f, 1, {2, 4, 6, 8}, mu_ref, rect, 48, 48, 0.08);
    CHECK(rep.verdict == verdict_t::counterexample_expected);
    REQUIRE(rep.exceptional.has_finite_exceptional);
    CHECK(std::abs(rep.exceptional.b) < 1e-10);
    // the cloud is delta_0 for every n: the distance cannot drop
    for (double d : rep.bl_distances) CHECK(d >= 0.3);
    for (std::size_t k = 1; k < rep.bl_distances.size(); ++k)
        CHECK(rep.bl_distances[k] == doctest::Approx(rep.bl_distances[0]).epsilon(1e-9));
}

TEST_CASE("equidistribution run on a cubic map") {
    cpoly f({cd(-1, 0), cd(0, 0), cd(0, 0), cd(1, 0)});  // z^3 - 1
    REQUIRE_FALSE(detect_exceptional(f).has_finite_exceptional);
    rect_t rect{-2, 2, -2, 2};
    empirical_measure mu_ref = brolin_sample(f, cd(2.0, 0.5), 12, 1024, 3);
    convergence_report rep = equidistribution_run(f, 1, {2, 3, 4}, mu_ref, rect, 48, 48, 0.2);
    CHECK(rep.verdict != verdict_t::counterexample_expected);
    REQUIRE(rep.l1_norms.size() == 3);
    for (double v : rep.l1_norms) CHECK(std::isfinite(v));
    // 3^n - 1 zeros per cloud, the double critical point included
    root_cloud c4 = roots_of_iterated_derivative(f, 4, 1, 1e-10, 600);
    CHECK(c4.points.size() == 80);
    CHECK(rep.l1_norms[2] < rep.l1_norms[0]);
}

TEST_CASE("degree accounting: cloud size is d^n - m exactly") {
    cpoly f = basilica();
    for (int n : {2, 3, 4})
        for (int m : {1, 2}) {
            root_cloud c = roots_of_iterated_derivative(f, n, m);
            CHECK((long long)c.points.size() == (1LL << n) - m);
        }
}

TEST_CASE("cloud potential of the zero cloud reproduces the log-modulus grid") {
    cpoly f({cd(1, 0), cd(0, 0), cd(1, 0)});  // z^2 + 1: all zeros of (f^n)' simple
    int n = 5, m = 1;                         // degree 31 <= 2^9
    rect_t rect{-1.9, 1.9, -1.4, 1.4};
    root_cloud cloud = roots_of_iterated_derivative(f, n, m, 1e-11, 500);
    grid_field pot = cloud_potential(zero_cloud_measure(cloud), rect, 48, 40);
    grid_field lm = normalized_logmod_grid(f, n, m, rect, 48, 40);
    // log|p| = log|lead| + sum log|z - r|; lead of (f^n)^(m) here: lead(f^n) = 1
    // times the falling factorial d^n (d^n - 1) ... (d^n - m + 1)
    double dn = std::pow(2.0, n);
    double log_lead = 0.0;
    for (int i = 0; i < m; ++i) log_lead += std::log(dn - i);
    double norm = dn - m;
    int checked = 0;
    for (std::size_t k = 0; k < pot.values.size(); ++k) {
        if (pot.masked(k) || lm.masked(k)) continue;
        double lhs = (pot.values[k] * norm + log_lead) / norm;
        CHECK(std::abs(lhs - lm.values[k]) <= 1e-6);
        ++checked;
    }
    CHECK(checked > 1000);
}

TEST_CASE("counterexample invariance: the z^2 cloud is frozen at the origin") {
    cpoly f = zsq();
    for (int n : {3, 6, 9}) {
        root_cloud c = roots_of_iterated_derivative(f, n, 1);
        for (cd z : c.points) CHECK(std::abs(z) < 1e-12);
    }
}

TEST_CASE("first-derivative multiset check: hand case z^2+1, n = 2") {
    cpoly f({cd(1, 0), cd(0, 0), cd(1, 0)});
    multiset_match_report rep = first_derivative_multiset_check(f, 2);
    CHECK(rep.pass);
    CHECK(rep.expected_count == 3);
    CHECK(rep.max_match_distance < 1e-8);
}

TEST_CASE("first-derivative multiset check: counting identity for d = 2 and 3") {
    multiset_match_report r2 = first_derivative_multiset_check(cheb(), 3);
    CHECK(r2.pass);
    CHECK(r2.expected_count == 7);  // 1 + 2 + 4

    cpoly cubic({cd(0, 0), cd(-1, 0), cd(0, 0), cd(1, 0)});  // z^3 - z
    multiset_match_report r3 = first_derivative_multiset_check(cubic, 3);
    CHECK(r3.pass);
    CHECK(r3.expected_count == 26);  // 3^3 - 1 = (3-1)(1+3+9)

    cpoly monomial = zsq();
    multiset_match_report rm = first_derivative_multiset_check(monomial, 4);
    CHECK(rm.pass);  // all 15 zeros at 0, the backward orbit of the critical point
    CHECK(rm.expected_count == 15);
}

TEST_CASE("superattracting cascade: monomials by hand") {
    cpoly f = zsq();
    cycle_data super;
    for (const auto& c : find_cycle(f, 1))
        if (c.kind == cycle_kind::superattracting) super = c;
    REQUIRE(super.kind == cycle_kind::superattracting);

    cascade_report rep = superattracting_cascade_check(f, super, 2, {1, 2, 3, 4, 6, 8});
    CHECK(rep.pass);
    for (std::size_t k = 0; k < rep.n_list.size(); ++k) {
        CHECK(rep.base_zero[k]);
        CHECK(rep.inequality_ok[k]);
    }

    cpoly cub = cpoly::monomial(cd(1, 0), 3);
    cycle_data super3;
    for (const auto& c : find_cycle(cub, 1))
        if (c.kind == cycle_kind::superattracting) super3 = c;
    cascade_report rep3 = superattracting_cascade_check(cub, super3, 3, {2, 3});
    CHECK(rep3.pass);  // (f^n)'' vanishes at 0, confirmed through jets
}
