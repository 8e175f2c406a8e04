#ifndef POLYDYN_BELL_HPP
#define POLYDYN_BELL_HPP

#include <map>
#include <utility>
#include <vector>

#include "exact_int.hpp"
#include "jet.hpp"
#include "util.hpp"

namespace polydyn {

// Sparse multivariate polynomial over the integers in variables X_0, X_1, ...
// Keys are exponent vectors with trailing zeros trimmed; no zero coefficients
// are stored. Coefficients grow combinatorially, hence the checked arithmetic.
struct multi_int_poly {
    using exponents = std::vector<int>;
    std::map<exponents, long long> terms;

    static multi_int_poly zero() { return {}; }
    static multi_int_poly one() {
        multi_int_poly p;
        p.terms[{}] = 1;
        return p;
    }
    static multi_int_poly variable(int q) {
        multi_int_poly p;
        exponents e(std::size_t(q) + 1, 0);
        e[std::size_t(q)] = 1;
        p.terms[std::move(e)] = 1;
        return p;
    }

    bool is_zero() const { return terms.empty(); }

    void add_term(exponents e, long long coeff) {
        if (coeff == 0) return;
        while (!e.empty() && e.back() == 0) e.pop_back();
        auto it = terms.find(e);
        if (it == terms.end()) {
            terms.emplace(std::move(e), coeff);
        } else {
            it->second = checked_add(it->second, coeff);
            if (it->second == 0) terms.erase(it);
        }
    }

    friend multi_int_poly operator+(const multi_int_poly& a, const multi_int_poly& b) {
        multi_int_poly r = a;
        for (const auto& [e, c] : b.terms) r.add_term(e, c);
        return r;
    }

    friend multi_int_poly operator*(const multi_int_poly& a, const multi_int_poly& b) {
        multi_int_poly r;
        for (const auto& [ea, ca] : a.terms)
            for (const auto& [eb, cb] : b.terms) {
                exponents e(std::max(ea.size(), eb.size()), 0);
                for (std::size_t q = 0; q < e.size(); ++q) {
                    int va = q < ea.size() ? ea[q] : 0;
                    int vb = q < eb.size() ? eb[q] : 0;
                    e[q] = va + vb;
                }
                r.add_term(std::move(e), checked_mul(ca, cb));
            }
        return r;
    }

    multi_int_poly partial_derivative(int q) const {
        multi_int_poly r;
        for (const auto& [e, c] : terms) {
            if (std::size_t(q) >= e.size() || e[std::size_t(q)] == 0) continue;
            exponents ne = e;
            long long k = ne[std::size_t(q)];
            ne[std::size_t(q)] -= 1;
            r.add_term(std::move(ne), checked_mul(c, k));
        }
        return r;
    }

    multi_int_poly times_variable(int q) const {
        multi_int_poly r;
        for (const auto& [e, c] : terms) {
            exponents ne = e;
            if (ne.size() <= std::size_t(q)) ne.resize(std::size_t(q) + 1, 0);
            ne[std::size_t(q)] += 1;
            r.add_term(std::move(ne), c);
        }
        return r;
    }

    cd evaluate(const std::vector<cd>& x) const {
        cd s(0, 0);
        for (const auto& [e, c] : terms) {
            cd t(double(c), 0);
            for (std::size_t q = 0; q < e.size(); ++q)
                for (int rep = 0; rep < e[q]; ++rep) t *= (q < x.size() ? x[q] : cd(0, 0));
            s += t;
        }
        return s;
    }

    // largest variable index actually used, -1 when constant / zero
    int max_variable() const {
        int mv = -1;
        for (const auto& [e, c] : terms) {
            (void)c;
            for (std::size_t q = 0; q < e.size(); ++q)
                if (e[q] > 0) mv = std::max(mv, int(q));
        }
        return mv;
    }

    friend bool operator==(const multi_int_poly& a, const multi_int_poly& b) {
        return a.terms == b.terms;
    }
};

// Table of the recursion polynomials A_{s,u}, 0 <= u <= s <= s_max:
//   A_{0,0} = 1,
//   A_{s,u} = A_{s-1,u-1} * X_0 + sum_q d/dX_q(A_{s-1,u}) * X_{q+1},
// with A_{s,-1} = 0 and A_{s-1,s} = 0.
struct bell_table {
    int s_max = 0;
    std::vector<std::vector<multi_int_poly>> entries;  // entries[s][u]

    const multi_int_poly& entry(int s, int u) const {
        return entries[std::size_t(s)][std::size_t(u)];
    }
};

inline bell_table build_bell_table(int s_max) {
    if (s_max < 1) throw std::invalid_argument("build_bell_table: s_max must be >= 1");
    bell_table t;
    t.s_max = s_max;
    t.entries.resize(std::size_t(s_max) + 1);
    t.entries[0] = {multi_int_poly::one()};
    for (int s = 1; s <= s_max; ++s) {
        auto& row = t.entries[std::size_t(s)];
        row.resize(std::size_t(s) + 1);
        const auto& prev = t.entries[std::size_t(s - 1)];
        auto prev_at = [&](int u) -> multi_int_poly {
            if (u < 0 || u >= int(prev.size())) return multi_int_poly::zero();
            return prev[std::size_t(u)];
        };
        for (int u = 0; u <= s; ++u) {
            multi_int_poly acc = prev_at(u - 1).times_variable(0);
            multi_int_poly p = prev_at(u);
            for (int q = 0; q <= s - 1; ++q)
                acc = acc + p.partial_derivative(q).times_variable(q + 1);
            row[std::size_t(u)] = std::move(acc);
        }
    }
    return t;
}

struct vanishing_report {
    // (s, u) pairs violating either A_{s,0} == 0 or A_{s,u}(0,...,0) == 0
    std::vector<std::pair<int, int>> violations;
    bool ok() const { return violations.empty(); }
};

inline vanishing_report check_vanishing(const bell_table& t) {
    vanishing_report rep;
    for (int s = 1; s <= t.s_max; ++s) {
        for (int u = 0; u <= s; ++u) {
            const auto& p = t.entry(s, u);
            if (u == 0 && !p.is_zero()) {
                rep.violations.emplace_back(s, u);
                continue;
            }
            auto it = p.terms.find({});  // constant term = value at the origin
            if (it != p.terms.end() && it->second != 0) rep.violations.emplace_back(s, u);
        }
    }
    return rep;
}

// Faa di Bruno consistency: for each s <= s_max,
//   (G o h)^(s) = sum_u G^(u)(h) * A_{s,u}(h', ..., h^(s)),
// with jet composition supplying the left side. Returns the maximum error
// relative to max(|lhs|, |rhs|, 1).
inline double faa_di_bruno_check(const bell_table& table, const jet& G, const jet& h) {
    const int smax = std::min(table.s_max, std::min(G.order() - 1, h.order()));
    if (smax < 0) throw std::invalid_argument("faa_di_bruno_check: jet orders too small");
    jet gh = compose(G, h);
    std::vector<cd> args(std::size_t(smax), cd(0, 0));
    for (int q = 0; q < smax; ++q) args[std::size_t(q)] = h.deriv(q + 1);
    double worst = 0;
    for (int s = 0; s <= smax; ++s) {
        cd lhs = gh.deriv(s);
        cd rhs(0, 0);
        for (int u = 0; u <= s; ++u) rhs += G.deriv(u) * table.entry(s, u).evaluate(args);
        double denom = std::max({std::abs(lhs), std::abs(rhs), 1.0});
        worst = std::max(worst, std::abs(lhs - rhs) / denom);
    }
    return worst;
}

// Independent route: classical partial Bell polynomials by explicit
// enumeration of the partitions of s into u parts, with X_q standing for the
// (q+1)-st derivative slot. Coefficient of a partition with multiplicities
// m_j is s! / (prod_j (j!)^{m_j} m_j!).
inline multi_int_poly partial_bell_oracle(int s, int u) {
    if (u < 1 || u > s) throw std::invalid_argument("partial_bell_oracle: need 1 <= u <= s");
    std::vector<long long> fact(std::size_t(s) + 1, 1);
    for (int k = 1; k <= s; ++k) fact[std::size_t(k)] = checked_mul(fact[std::size_t(k - 1)], k);

    multi_int_poly out;
    std::vector<int> parts;
    auto emit = [&]() {
        std::map<int, int> mult;
        for (int p : parts) mult[p]++;
        long long denom = 1;
        for (const auto& [part, mj] : mult) {
            for (int rep = 0; rep < mj; ++rep) denom = checked_mul(denom, fact[std::size_t(part)]);
            denom = checked_mul(denom, fact[std::size_t(mj)]);
        }
        long long coeff = fact[std::size_t(s)] / denom;
        multi_int_poly::exponents e;
        for (const auto& [part, mj] : mult) {
            if (std::size_t(part) > e.size()) e.resize(std::size_t(part), 0);
            e[std::size_t(part - 1)] = mj;
        }
        out.add_term(std::move(e), coeff);
    };
    // partitions of `remaining` into `slots` parts, each <= `max_part`
    auto rec = [&](auto&& self, int remaining, int slots, int max_part) -> void {
        if (slots == 0) {
            if (remaining == 0) emit();
            return;
        }
        for (int p = std::min(remaining - (slots - 1), max_part); p >= 1; --p) {
            parts.push_back(p);
            self(self, remaining - p, slots - 1, p);
            parts.pop_back();
        }
    };
    rec(rec, s, u, s);
    return out;
}

}  // namespace polydyn

#endif
