#ifndef POLYDYN_EQUIDIST_HPP
#define POLYDYN_EQUIDIST_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "complex_poly.hpp"
#include "linearize.hpp"
#include "potential.hpp"
#include "rootfinder.hpp"
#include "util.hpp"

namespace polydyn {

// Deterministic lower estimate of the bounded-Lipschitz distance: maximize
// the integral gap over a fixed family of tent functions on a dyadic cell
// hierarchy (levels 0..3, 85 tents). Each tent has sup <= 1 and Lipschitz
// constant <= 1; points outside the rectangle contribute zero.
inline double bl_distance(const empirical_measure& mu, const empirical_measure& nu, rect_t rect) {
    double best = 0;
    for (int level = 0; level <= 3; ++level) {
        int cells = 1 << level;
        double rx = 0.5 * rect.width() / cells;
        double ry = 0.5 * rect.height() / cells;
        double h = std::min({1.0, rx, ry});
        for (int cy = 0; cy < cells; ++cy) {
            for (int cx = 0; cx < cells; ++cx) {
                double ccx = rect.x_min + (2 * cx + 1) * rx;
                double ccy = rect.y_min + (2 * cy + 1) * ry;
                auto tent = [&](cd p) {
                    double u = std::abs(p.real() - ccx) / rx;
                    double v = std::abs(p.imag() - ccy) / ry;
                    return h * std::max(0.0, 1.0 - std::max(u, v));
                };
                double s = 0;
                for (std::size_t i = 0; i < mu.points.size(); ++i)
                    s += mu.weights[i] * tent(mu.points[i]);
                for (std::size_t i = 0; i < nu.points.size(); ++i)
                    s -= nu.weights[i] * tent(nu.points[i]);
                best = std::max(best, std::abs(s));
            }
        }
    }
    return best;
}

enum class verdict_t { converging, not_converging, counterexample_expected };

inline const char* verdict_name(verdict_t v) {
    switch (v) {
        case verdict_t::converging: return "converging";
        case verdict_t::not_converging: return "not_converging";
        default: return "counterexample_expected";
    }
}

struct convergence_report {
    std::string f_descriptor;
    int m = 1;
    std::vector<int> n_list;
    std::vector<double> l1_norms;
    std::vector<double> bl_distances;
    exceptional_report exceptional;
    verdict_t verdict = verdict_t::not_converging;
};

struct equidist_options {
    int n_esc = 30;
    double root_tol = 1e-10;
    int root_max_iter = 400;
    double jitter = 1.10;
};

inline std::string describe_poly(const cpoly& f) {
    std::string s = "[";
    char buf[64];
    for (std::size_t k = 0; k < f.coeffs().size(); ++k) {
        const cd& c = f.coeffs()[k];
        std::snprintf(buf, sizeof buf, "%g%+gi", c.real(), c.imag());
        s += buf;
        if (k + 1 < f.coeffs().size()) s += ", ";
    }
    return s + "]";
}

inline empirical_measure zero_cloud_measure(const root_cloud& cloud) {
    return empirical_measure::uniform(cloud.points);
}

// End-to-end check for one (f, m): per n, the zero cloud of (f^n)^(m) against
// the reference measure (bounded-Lipschitz) and the normalized log-modulus
// grid against the Green function (L1). Maps with a finite exceptional point
// run too; their verdict is counterexample_expected.
inline convergence_report equidistribution_run(const cpoly& f, int m,
                                               const std::vector<int>& n_list,
                                               const empirical_measure& mu_ref, rect_t rect,
                                               int nx, int ny, double tol,
                                               const equidist_options& opts = {}) {
    if (n_list.empty()) throw std::invalid_argument("equidistribution_run: empty n list");
    convergence_report rep;
    rep.f_descriptor = describe_poly(f);
    rep.m = m;
    rep.n_list = n_list;
    rep.exceptional = detect_exceptional(f);

    grid_field green = green_grid(f, rect, nx, ny, opts.n_esc);
    long long d = f.degree();
    for (int n : n_list) {
        root_cloud cloud = roots_of_iterated_derivative(f, n, m, opts.root_tol, opts.root_max_iter);
        double dn = std::pow(double(d), double(n));
        if ((long long)cloud.points.size() != (long long)std::llround(dn) - m)
            throw std::runtime_error("equidistribution_run: zero count mismatch");
        rep.bl_distances.push_back(bl_distance(zero_cloud_measure(cloud), mu_ref, rect));
        grid_field u = normalized_logmod_grid(f, n, m, rect, nx, ny);
        rep.l1_norms.push_back(l1_distance(u, green));
    }

    if (rep.exceptional.has_finite_exceptional) {
        rep.verdict = verdict_t::counterexample_expected;
    } else {
        double l1_tol = tol * rect.area();
        bool ok = decreasing_with_jitter(rep.l1_norms, opts.jitter, l1_tol) &&
                  decreasing_with_jitter(rep.bl_distances, opts.jitter, tol) &&
                  rep.l1_norms.back() <= l1_tol && rep.bl_distances.back() <= tol;
        rep.verdict = ok ? verdict_t::converging : verdict_t::not_converging;
    }
    return rep;
}

struct multiset_match_report {
    int n = 0;
    long long expected_count = 0;  // d^n - 1, also (d-1) * sum d^j
    long long lhs_count = 0;
    bool count_identity_ok = false;
    double max_match_distance = 0.0;
    bool pass = false;
};

// Zeros of (f^n)' versus the union over j < n of f^{-j}(critical points).
// Backward images go through chained degree-d solves, which keeps every level
// as well-conditioned as the base map. Greedy nearest matching bounds the
// multiset Hausdorff distance.
inline multiset_match_report first_derivative_multiset_check(const cpoly& f, int n,
                                                             double tol = 1e-6) {
    const int d = f.degree();
    if (d < 2 || n < 1) throw std::invalid_argument("multiset check: need degree >= 2, n >= 1");
    multiset_match_report rep;
    rep.n = n;

    root_cloud lhs = roots_of_iterated_derivative(f, n, 1, 1e-11, 500);
    rep.lhs_count = (long long)lhs.points.size();

    root_cloud crit = find_roots(derivative(f), 1e-12, 300);
    std::vector<cd> level = crit.points;
    std::vector<cd> rhs = level;
    for (int j = 1; j < n; ++j) {
        std::vector<cd> next;
        next.reserve(level.size() * std::size_t(d));
        for (cd w : level) {
            cpoly shifted = f - cpoly({w});
            root_cloud pre = find_roots(shifted, 1e-12, 300);
            next.insert(next.end(), pre.points.begin(), pre.points.end());
        }
        level = std::move(next);
        rhs.insert(rhs.end(), level.begin(), level.end());
    }

    long long dn = 1;
    for (int j = 0; j < n; ++j) dn *= d;
    long long geom = 0, dj = 1;
    for (int j = 0; j < n; ++j) {
        geom += dj;
        dj *= d;
    }
    rep.expected_count = dn - 1;
    rep.count_identity_ok = (long long)(d - 1) * geom == dn - 1 &&
                            rep.lhs_count == rep.expected_count &&
                            (long long)rhs.size() == rep.expected_count;

    // greedy nearest-unused matching
    std::vector<bool> used(rhs.size(), false);
    double worst = 0;
    for (cd p : lhs.points) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t arg = rhs.size();
        for (std::size_t i = 0; i < rhs.size(); ++i) {
            if (used[i]) continue;
            double dist = std::abs(p - rhs[i]);
            if (dist < best) {
                best = dist;
                arg = i;
            }
        }
        if (arg == rhs.size()) {
            worst = std::numeric_limits<double>::infinity();
            break;
        }
        used[arg] = true;
        worst = std::max(worst, best);
    }
    rep.max_match_distance = worst;
    rep.pass = rep.count_identity_ok && worst <= tol;
    return rep;
}

struct cascade_report {
    std::vector<int> n_list;
    std::vector<double> log_sup_lower;  // log sup over the circle of |(f^n)^(m-1)|
    std::vector<double> log_sup_upper;  // log sup over the circle of |(f^n)^(m)|
    std::vector<bool> base_zero;        // (f^n)^(m-1)(z0) = 0 within tolerance
    std::vector<bool> inequality_ok;    // log_sup_lower <= log r + log_sup_upper
    double radius = 0.0;
    cd z0{0, 0};
    bool pass = false;
};

// Superattracting branch: once (f^n)^(m-1) vanishes at z0, its sup on a small
// circle is bounded by r times the sup of (f^n)^(m). Sups are taken over
// sampled circle points with log-scaled jets, so deep-underflow values (the
// expected regime near a superattracting point) still compare cleanly.
inline cascade_report superattracting_cascade_check(const cpoly& f, const cycle_data& cycle,
                                                    int m, const std::vector<int>& n_list,
                                                    double radius = -1.0,
                                                    std::optional<cd> z0_opt = {}) {
    if (cycle.kind != cycle_kind::superattracting)
        throw std::invalid_argument("cascade check: cycle must be superattracting");
    if (m < 1) throw std::invalid_argument("cascade check: m >= 1");
    cascade_report rep;
    rep.n_list = n_list;
    rep.z0 = z0_opt.value_or(cycle.point);
    rep.radius = radius > 0 ? radius : 0.05 * (1.0 + std::abs(cycle.point));

    const int samples = 64;
    bool all_ok = true;
    for (int n : n_list) {
        double lo = -std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (int s = 0; s < samples; ++s) {
            double th = 2.0 * kPi * double(s) / samples;
            cd z = rep.z0 + rep.radius * cd(std::cos(th), std::sin(th));
            scaled_jet j = scaled_iterate(f, z, n, m);
            lo = std::max(lo, log_abs_derivative(j, m - 1));
            hi = std::max(hi, log_abs_derivative(j, m));
        }
        scaled_jet at0 = scaled_iterate(f, rep.z0, n, m);
        double base = log_abs_derivative(at0, m - 1);
        double scale_log = std::max(0.0, hi);
        bool zero_ok = !(base > std::log(1e-8) + scale_log);
        bool ineq = !(lo > std::log(rep.radius) + hi + 1e-9);
        rep.log_sup_lower.push_back(lo);
        rep.log_sup_upper.push_back(hi);
        rep.base_zero.push_back(zero_ok);
        rep.inequality_ok.push_back(ineq);
        if (zero_ok && !ineq) all_ok = false;
        if (!zero_ok) all_ok = false;
    }
    rep.pass = all_ok;
    return rep;
}

}  // namespace polydyn

#endif
