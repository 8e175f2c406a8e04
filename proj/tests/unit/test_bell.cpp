#include "doctest.h"

#include <cmath>

#include "polydyn/bell.hpp"
#include "polydyn/util.hpp"

using namespace polydyn;

namespace {

multi_int_poly mono(std::vector<int> exps, long long coeff) {
    multi_int_poly p;
    p.add_term(std::move(exps), coeff);
    return p;
}

jet random_jet(rng64& rng, cd base, int order) {
    jet j(base, order);
    for (int k = 0; k <= order; ++k) j.coeff(k) = cd(rng.uniform(-1, 1), rng.uniform(-1, 1));
    return j;
}

}  // namespace

TEST_CASE("table entries from the recursion, low orders by hand") {
    bell_table t = build_bell_table(3);
    CHECK(t.entry(0, 0) == multi_int_poly::one());
    CHECK(t.entry(1, 1) == mono({1}, 1));           // X0
    CHECK(t.entry(1, 0).is_zero());
    CHECK(t.entry(2, 1) == mono({0, 1}, 1));        // X1
    CHECK(t.entry(2, 2) == mono({2}, 1));           // X0^2
    CHECK(t.entry(3, 1) == mono({0, 0, 1}, 1));     // X2
    CHECK(t.entry(3, 2) == mono({1, 1}, 3));        // 3 X0 X1
    CHECK(t.entry(3, 3) == mono({3}, 1));           // X0^3
}

TEST_CASE("partition oracle at small sizes") {
    CHECK(partial_bell_oracle(2, 2) == mono({2}, 1));
    CHECK(partial_bell_oracle(3, 2) == mono({1, 1}, 3));
    multi_int_poly b42 = mono({1, 0, 1}, 4) + mono({0, 2}, 3);  // 4 X0 X2 + 3 X1^2
    CHECK(partial_bell_oracle(4, 2) == b42);
}

TEST_CASE("recursion equals the partition oracle, integer-exact to s = 8") {
    bell_table t = build_bell_table(8);
    for (int s = 1; s <= 8; ++s)
        for (int u = 1; u <= s; ++u) CHECK(t.entry(s, u) == partial_bell_oracle(s, u));
}

TEST_CASE("homogeneity: u factors of total weight s") {
    bell_table t = build_bell_table(8);
    for (int s = 1; s <= 8; ++s)
        for (int u = 1; u <= s; ++u)
            for (const auto& [e, c] : t.entry(s, u).terms) {
                (void)c;
                long long factors = 0, weight = 0;
                for (std::size_t q = 0; q < e.size(); ++q) {
                    factors += e[q];
                    weight += (long long)(q + 1) * e[q];
                }
                CHECK(factors == u);
                CHECK(weight == s);
            }
}

TEST_CASE("variables above X_{s-1} never appear") {
    bell_table t = build_bell_table(8);
    for (int s = 1; s <= 8; ++s)
        for (int u = 0; u <= s; ++u) CHECK(t.entry(s, u).max_variable() <= s - 1);
}

TEST_CASE("vanishing properties hold through s = 12") {
    bell_table t = build_bell_table(12);
    CHECK(check_vanishing(t).ok());
    // the s = 0 entry is the constant 1, exempt by construction
    CHECK(t.entry(0, 0).evaluate({}) == cd(1, 0));
}

TEST_CASE("hand-corrupted table is flagged") {
    bell_table t = build_bell_table(4);
    t.entries[2][1].add_term({}, 1);  // constant term breaks A_{2,1}(0) = 0
    vanishing_report rep = check_vanishing(t);
    REQUIRE(rep.violations.size() == 1);
    CHECK(rep.violations[0] == std::pair<int, int>(2, 1));
}

TEST_CASE("composition-derivative identity against jet composition") {
    bell_table t = build_bell_table(8);
    rng64 rng(90210);
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
        jet h = random_jet(rng, cd(0.1, -0.2), 8);
        jet G = random_jet(rng, h.value(), 9);
        worst = std::max(worst, faa_di_bruno_check(t, G, h));
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("identity germ: only the u = 1 term survives") {
    bell_table t = build_bell_table(6);
    rng64 rng(4);
    jet h = random_jet(rng, cd(0.2, 0.1), 6);
    jet G = jet(h.value(), 7);
    G.coeff(0) = h.value();
    G.coeff(1) = cd(1, 0);  // G = identity germ at h's value
    CHECK(faa_di_bruno_check(t, G, h) <= 1e-12);
    // A_{s,1} = X_{s-1}: the reduced right side is literally h^(s)
    std::vector<cd> args(6);
    for (int q = 0; q < 6; ++q) args[std::size_t(q)] = h.deriv(q + 1);
    for (int s = 1; s <= 6; ++s)
        CHECK(std::abs(t.entry(s, 1).evaluate(args) - h.deriv(s)) < 1e-12);
}

TEST_CASE("linear germ: only A_{s,s} = X0^s contributes") {
    bell_table t = build_bell_table(6);
    rng64 rng(8);
    jet h(cd(0.3, 0), 6);
    h.coeff(0) = cd(-0.4, 0.2);
    h.coeff(1) = cd(0.9, -0.3);  // linear: all higher derivatives vanish
    jet G = random_jet(rng, h.value(), 7);
    CHECK(faa_di_bruno_check(t, G, h) <= 1e-11);
    jet gh = compose(G, h);
    for (int s = 1; s <= 6; ++s) {
        cd expect = G.deriv(s) * std::pow(h.coeff(1), s);
        CHECK(std::abs(gh.deriv(s) - expect) <= 1e-10 * (1.0 + std::abs(expect)));
    }
}
