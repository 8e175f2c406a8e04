#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "polydyn/bell.hpp"
#include "polydyn/linearize.hpp"
#include "polydyn/rootfinder.hpp"
#include "polydyn/util.hpp"

using namespace polydyn;

namespace {

cpoly quad02() { return cpoly({cd(0.2, 0), cd(0, 0), cd(1, 0)}); }   // z^2 + 0.2
cpoly parab() { return cpoly({cd(0, 0), cd(1, 0), cd(1, 0)}); }      // z + z^2
cpoly zsq() { return cpoly::monomial(cd(1, 0), 2); }

cycle_data attracting_cycle(const cpoly& f, int p = 1) {
    for (const auto& c : find_cycle(f, p))
        if (c.kind == cycle_kind::attracting) return c;
    throw std::runtime_error("no attracting cycle in test fixture");
}

cycle_data parabolic_cycle(const cpoly& f, int p = 1) {
    for (const auto& c : find_cycle(f, p))
        if (c.kind == cycle_kind::parabolic) return c;
    throw std::runtime_error("no parabolic cycle in test fixture");
}

}  // namespace

TEST_CASE("find_cycle: quadratic formula fixture") {
    auto cycles = find_cycle(quad02(), 1);
    REQUIRE(cycles.size() == 2);
    double a_expect = (1.0 - std::sqrt(0.2)) / 2.0;  // 0.276393...
    const cycle_data& att = cycles[0].kind == cycle_kind::attracting ? cycles[0] : cycles[1];
    const cycle_data& rep = cycles[0].kind == cycle_kind::attracting ? cycles[1] : cycles[0];
    CHECK(std::abs(att.point - cd(a_expect, 0)) < 1e-12);
    CHECK(std::abs(att.multiplier - cd(2 * a_expect, 0)) < 1e-12);
    CHECK(att.kind == cycle_kind::attracting);
    CHECK(rep.kind == cycle_kind::unusable);
    CHECK(std::abs(rep.multiplier) > 1.0);
}

TEST_CASE("find_cycle: superattracting and repelling fixed points of z^2") {
    auto cycles = find_cycle(zsq(), 1);
    REQUIRE(cycles.size() == 2);
    CHECK(cycles[0].kind == cycle_kind::superattracting);
    CHECK(std::abs(cycles[0].point) < 1e-10);
    CHECK(cycles[1].kind == cycle_kind::unusable);
    CHECK(std::abs(cycles[1].multiplier - cd(2, 0)) < 1e-9);
}

TEST_CASE("find_cycle: parabolic fixed point of z + z^2") {
    auto cycles = find_cycle(parab(), 1);
    bool found = false;
    for (const auto& c : cycles)
        if (c.kind == cycle_kind::parabolic && std::abs(c.point) < 1e-6) found = true;
    CHECK(found);
}

TEST_CASE("find_cycle: minimal period detection on a 2-cycle map") {
    // z^2 - 1 has the superattracting 2-cycle {0, -1} and fixed points of period 1
    cpoly f({cd(-1, 0), cd(0, 0), cd(1, 0)});
    auto cycles = find_cycle(f, 2);
    int super2 = 0, fixed1 = 0;
    for (const auto& c : cycles) {
        if (c.kind == cycle_kind::superattracting) {
            CHECK(c.period == 2);
            ++super2;
        }
        if (c.period == 1) ++fixed1;
    }
    CHECK(super2 == 2);  // both cycle points are fixed by f^2
    CHECK(fixed1 == 2);
}

TEST_CASE("period-2 attracting cycle: root convention and cross-cycle equation") {
    cpoly f({cd(-0.8, 0), cd(0, 0), cd(1, 0)});  // z^2 - 0.8, 2-cycle multiplier 4(c+1) = 0.8
    cycle_data c;
    bool found = false;
    for (const auto& x : find_cycle(f, 2))
        if (x.kind == cycle_kind::attracting && x.period == 2) {
            c = x;
            found = true;
            break;
        }
    REQUIRE(found);
    CHECK(std::abs(c.multiplier - cd(0.8, 0)) < 1e-10);
    CHECK(std::abs(c.multiplier_root * c.multiplier_root - c.multiplier) < 1e-12);

    linearizer L = linearizer::make_schroeder(f, c);
    rng64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        cd z = c.point + 0.05 * rng.unit_disk();
        cd phi_z = L.phi(z, 0).value();
        // single-step equation with the fixed root of the multiplier
        cd phi_fz = L.phi(f(z), 0).value();
        CHECK(std::abs(phi_fz - c.multiplier_root * phi_z) <= 1e-8 * (1.0 + std::abs(phi_z)));
        // full-period equation with the multiplier itself
        cd phi_f2z = L.phi(f(f(z)), 0).value();
        CHECK(std::abs(phi_f2z - c.multiplier * phi_z) <= 1e-8 * (1.0 + std::abs(phi_z)));
    }
}

TEST_CASE("schroeder on a linear test map is the identity chart") {
    cpoly lin({cd(0, 0), cd(0.6, 0.1)});  // f = lambda z, degree 1
    cycle_data c;
    c.point = cd(0, 0);
    c.period = 1;
    c.multiplier = cd(0.6, 0.1);
    c.multiplier_root = cd(0.6, 0.1);
    c.kind = cycle_kind::attracting;
    linearizer L = linearizer::make_schroeder(lin, c);
    jet ph = L.phi(cd(0.3, -0.2), 2);
    CHECK(std::abs(ph.value() - cd(0.3, -0.2)) < 1e-9);
    CHECK(std::abs(ph.deriv(1) - cd(1, 0)) < 1e-9);
    CHECK(std::abs(ph.deriv(2)) < 1e-9);
}

TEST_CASE("schroeder: normalization and functional equation") {
    cpoly f = quad02();
    cycle_data c = attracting_cycle(f);
    linearizer L = linearizer::make_schroeder(f, c, 80);

    jet at_a = L.phi(c.point, 2);
    CHECK(std::abs(at_a.value()) < 1e-10);
    CHECK(std::abs(at_a.deriv(1) - cd(1, 0)) < 1e-7);

    rng64 rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        cd z = c.point + 0.2 * rng.unit_disk();
        cd phi_z = L.phi(z, 0).value();
        cd phi_fz = L.phi(f(z), 0).value();
        CHECK(std::abs(phi_fz - c.multiplier * phi_z) <= 1e-8 * (1.0 + std::abs(phi_z)));
    }
}

TEST_CASE("schroeder rejects points outside the basin and multiplier 0") {
    cpoly f = quad02();
    cycle_data c = attracting_cycle(f);
    linearizer L = linearizer::make_schroeder(f, c);
    CHECK_THROWS_AS((void)L.phi(cd(5, 5), 1), not_in_basin);

    cycle_data super = find_cycle(zsq(), 1)[0];
    REQUIRE(super.kind == cycle_kind::superattracting);
    CHECK_THROWS_AS((void)linearizer::make_schroeder(zsq(), super), superattracting_unsupported);
}

TEST_CASE("chain identity (phi' o f^n) (f^n)' = lambda^n phi'") {
    cpoly f = quad02();
    cycle_data c = attracting_cycle(f);
    linearizer L = linearizer::make_schroeder(f, c);
    cd z(0.1, 0.05);
    cd phi1 = L.phi(z, 1).deriv(1);
    for (int n = 1; n <= 20; ++n) {
        jet orbit = iterate_jet(f, z, n, 1);
        cd lhs = L.phi(orbit.value(), 1).deriv(1) * orbit.deriv(1);
        cd rhs = linearizer::pow_int(c.multiplier, n) * phi1;
        CHECK(std::abs(lhs - rhs) <= 1e-7 * (1.0 + std::abs(rhs)));
    }
}

TEST_CASE("phi' vanishes along the backward orbit of the critical point") {
    cpoly f = quad02();
    cycle_data c = attracting_cycle(f);
    linearizer L = linearizer::make_schroeder(f, c);
    std::vector<cd> level = {cd(0, 0)};  // the critical point of z^2 + 0.2
    for (int depth = 0; depth < 3; ++depth) {
        for (cd z : level) {
            double mag = std::abs(L.phi(z, 1).deriv(1));
            CHECK(mag <= 1e-6);
        }
        std::vector<cd> next;
        for (cd w : level) {
            root_cloud pre = find_roots(f - cpoly({w}), 1e-12, 200);
            next.insert(next.end(), pre.points.begin(), pre.points.end());
        }
        level = next;
    }
}

TEST_CASE("abel: functional equation residual at the default truncation") {
    cpoly f = parab();
    cycle_data c = parabolic_cycle(f);
    linearizer L = linearizer::make_abel(f, c, 10000);
    CHECK(L.petal().radius > 0.2);
    for (double x : {-0.45, -0.35, -0.25, -0.15}) {
        cd z(x, 0);
        REQUIRE(L.petal().contains(z, c.point));
        cd phi_z = L.phi(z, 0).value();
        cd phi_fz = L.phi(f(z), 0).value();
        CHECK(std::abs(phi_fz - phi_z - cd(1, 0)) <= 1e-6);
    }
}

TEST_CASE("abel: fitted residue of z + z^2 is 1 and the chart grows like n") {
    cpoly f = parab();
    cycle_data c = parabolic_cycle(f);
    linearizer L = linearizer::make_abel(f, c, 20000);
    cd beta = L.fit_beta(cd(-0.3, 0));
    CHECK(std::abs(beta - cd(1, 0)) < 0.05);  // w' = w + 1 + beta/w with beta = 1 by hand
}

TEST_CASE("abel: injectivity on the petal") {
    cpoly f = parab();
    cycle_data c = parabolic_cycle(f);
    linearizer L = linearizer::make_abel(f, c, 4000);
    rng64 rng(12);
    const petal_t& P = L.petal();
    auto sample = [&]() {
        while (true) {
            cd z = c.point + P.radius * P.direction +
                   P.radius * cd(rng.uniform(-1, 1), rng.uniform(-1, 1));
            if (P.contains(z, c.point) && std::abs(z - c.point) > 0.02) return z;
        }
    };
    for (int trial = 0; trial < 200; ++trial) {
        cd z1 = sample(), z2 = sample();
        if (std::abs(z1 - z2) < 1e-4) continue;
        cd p1 = L.phi(z1, 0).value(), p2 = L.phi(z2, 0).value();
        CHECK(std::abs(p1 - p2) >= 1e-8);
    }
}

TEST_CASE("abel rejects points outside the petal") {
    cpoly f = parab();
    cycle_data c = parabolic_cycle(f);
    linearizer L = linearizer::make_abel(f, c, 1000);
    CHECK_THROWS_AS((void)L.phi(cd(0.5, 0), 1), not_in_petal);
}

TEST_CASE("abel reports vanishing quadratic terms instead of guessing") {
    cpoly f({cd(0, 0), cd(1, 0), cd(0, 0), cd(1, 0)});  // z + z^3: multiplicity 3 at 0
    cycle_data c = parabolic_cycle(f);
    CHECK_THROWS_AS(linearizer::make_abel(f, c), degenerate_parabolic);
}

TEST_CASE("derivative_ratio_iterate: hand values") {
    cpoly lin({cd(0, 0), cd(0.7, 0)});
    for (int n : {1, 3, 7}) CHECK(std::abs(derivative_ratio_iterate(lin, n, 2, cd(0.4, 0.1))) < 1e-13);

    CHECK(std::abs(derivative_ratio_iterate(quad02(), 1, 2, cd(0.1, 0)) - cd(10, 0)) < 1e-11);
    CHECK(std::abs(derivative_ratio_iterate(zsq(), 2, 2, cd(1, 0)) - cd(3, 0)) < 1e-11);
}

TEST_CASE("derivative_ratio_iterate refuses vanishing first derivative") {
    CHECK_THROWS_AS((void)derivative_ratio_iterate(zsq(), 3, 2, cd(0, 0)), derivative_vanishes);
}

TEST_CASE("rates, attracting: geometric decay at the multiplier rate") {
    cpoly f = quad02();
    cycle_data c = attracting_cycle(f);
    std::vector<cd> pts;
    for (int k = 0; k < 6; ++k)
        pts.push_back(c.point + 0.12 * std::exp(cd(0, 2 * kPi * k / 6.0)));
    std::vector<int> ns;
    for (int n = 5; n <= 40; ++n) ns.push_back(n);
    rate_report rep = derivative_ratio_rates(f, c, 2, pts, ns);
    double expect = std::log(std::abs(c.multiplier));
    CHECK(rep.expected_slope == doctest::Approx(expect));
    CHECK(std::abs(rep.fitted_slope - expect) <= 0.1 * std::abs(expect));
    // eventually decreasing with 10% jitter
    std::vector<double> errs;
    for (auto& [n, e] : rep.errors)
        if (e > rep.residual_floor) errs.push_back(e);
    CHECK(decreasing_with_jitter(errs, 1.10));
}

TEST_CASE("rates, parabolic: 1/n decay on the attracting axis") {
    cpoly f = parab();
    cycle_data c = parabolic_cycle(f);
    std::vector<cd> pts = {cd(-0.4, 0), cd(-0.3, 0), cd(-0.2, 0)};
    std::vector<int> ns = {16, 32, 64, 128, 256, 512, 1024};
    rate_report rep = derivative_ratio_rates(f, c, 2, pts, ns, 200000);
    CHECK(rep.expected_slope == doctest::Approx(-1.0));
    CHECK(rep.fitted_slope > -1.2);
    CHECK(rep.fitted_slope < -0.8);
    std::vector<double> errs;
    for (auto& [n, e] : rep.errors) errs.push_back(e);
    CHECK(decreasing_with_jitter(errs, 1.10));
}

TEST_CASE("rates on the linear map are identically zero") {
    cpoly lin({cd(0, 0), cd(0.5, 0.2)});
    cycle_data c;
    c.point = cd(0, 0);
    c.period = 1;
    c.multiplier = cd(0.5, 0.2);
    c.multiplier_root = cd(0.5, 0.2);
    c.kind = cycle_kind::attracting;
    std::vector<cd> pts = {cd(0.2, 0.1), cd(-0.1, 0.3)};
    rate_report rep = derivative_ratio_rates(lin, c, 2, pts, {2, 4, 8, 16});
    for (auto& [n, e] : rep.errors) CHECK(e <= 1e-12);
}

TEST_CASE("expansion residual: t = 2 and t = 3 at n = 10") {
    cpoly f = quad02();
    cycle_data c = attracting_cycle(f);
    bell_table table = build_bell_table(4);
    CHECK(derivative_ratio_expansion_residual(f, c, table, 2, cd(0.1, 0), 10) <= 1e-6);
    CHECK(derivative_ratio_expansion_residual(f, c, table, 3, cd(0.1, 0), 10) <= 1e-6);
}

TEST_CASE("expansion correction decays like lambda^n") {
    // the t = 2 correction term is A_{1,1}(lr^n phi') * (phiInv''/phiInv') * 1,
    // linear in lr^n, so doubling n squares its size
    cpoly f = quad02();
    cycle_data c = attracting_cycle(f);
    linearizer L = linearizer::make_schroeder(f, c);
    cd z(0.1, 0);
    auto correction = [&](int n) {
        cd lhs = derivative_ratio_iterate(f, n, 2, z);
        jet ph = L.phi(z, 2);
        return std::abs(lhs - ph.deriv(2) / ph.deriv(1));
    };
    double c5 = correction(5), c10 = correction(10), c20 = correction(20);
    double lam = std::abs(c.multiplier);
    CHECK(c10 / c5 == doctest::Approx(std::pow(lam, 5)).epsilon(0.15));
    CHECK(c20 / c10 == doctest::Approx(std::pow(lam, 10)).epsilon(0.15));
}
