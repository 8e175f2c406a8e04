#ifndef POLYDYN_ROOTFINDER_HPP
#define POLYDYN_ROOTFINDER_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <vector>

#include "complex_poly.hpp"
#include "jet.hpp"
#include "util.hpp"

namespace polydyn {

struct root_cloud {
    std::vector<cd> points;         // one per zero, with multiplicity, (re, im)-sorted
    std::vector<double> residuals;  // |p(r)| / (max(1,|r|) |p'(r)| + floor)
    // true when every point certifies: either the first-order residual is
    // below tol * degree, or (clusters at multiple roots, where |p/p'| cannot
    // go below the pseudozero scale) a higher-order cluster radius
    // |k! p / p^(k)|^(1/k) is below the k-th root of machine noise.
    bool converged = false;
};

struct aberth_options {
    double tol = 1e-10;
    int max_iter = 260;
};

namespace detail {

struct point_eval {
    cd newton;      // p/p'
    double log_p;   // log |p|
    double log_dp;  // log |p'|
};

inline double eval_residual(const point_eval& e, cd z) {
    if (!std::isfinite(e.log_p)) {
        if (e.log_p == -std::numeric_limits<double>::infinity()) return 0.0;  // exact zero
        return std::numeric_limits<double>::infinity();
    }
    double lscale = std::log(std::max(1.0, std::abs(z)));
    if (e.log_dp == -std::numeric_limits<double>::infinity())
        return std::numeric_limits<double>::infinity();
    double le = e.log_p - (e.log_dp + lscale);
    return std::exp(std::min(700.0, le));
}

// Aberth sweeps, Jacobi-style first (all updates read the previous snapshot,
// so the result does not depend on thread count), then serial Gauss-Seidel
// once the parallel phase stalls -- simultaneous updates can cycle when two
// estimates chase the same root, and in-place sweeps break that symmetry.
// Both phases are deterministic.
template <class Eval>
root_cloud aberth_core(std::vector<cd> z, Eval&& eval, const aberth_options& opt,
                       int cert_degree) {
    const int n = int(z.size());
    root_cloud out;
    if (n == 0) {
        out.converged = true;
        return out;
    }
    std::vector<cd> zn(z.size());
    std::vector<point_eval> ev(z.size());
    std::vector<double> rel(z.size(), 0.0);
    bool step_ok = false;
    const int jacobi_phase = std::min(150, opt.max_iter / 2);

    auto aberth_step = [&](std::size_t i, const std::vector<cd>& snapshot, cd* dest) {
        cd N = ev[i].newton;
        if (!std::isfinite(N.real()) || !std::isfinite(N.imag())) {
            double th = 2.0 * kPi * double(i % 37) / 37.0;
            N = 0.25 * (1.0 + std::abs(snapshot[i])) * cd(std::cos(th), std::sin(th));
        }
        cd S(0, 0);
        for (std::size_t j = 0; j < snapshot.size(); ++j) {
            if (j == i) continue;
            cd dz = snapshot[i] - snapshot[j];
            double nr = std::norm(dz);
            if (nr < 1e-300) continue;  // coincident estimate, drop the term
            S += cd(1, 0) / dz;
        }
        cd denom = cd(1, 0) - N * S;
        cd step = (std::abs(denom) > 1e-14) ? N / denom : N;
        double cap = 0.5 * (1.0 + std::abs(snapshot[i]));
        double as = std::abs(step);
        if (!std::isfinite(as)) {
            step = cd(0, 0);
            as = 0;
        }
        if (as > cap) step *= cap / as;
        *dest = snapshot[i] - step;
        rel[i] = std::abs(step) / (1.0 + std::abs(*dest));
    };

    for (int it = 0; it < opt.max_iter; ++it) {
        if (it < jacobi_phase) {
            parallel_for(z.size(), [&](std::size_t i) { ev[i] = eval(z[i]); });
            parallel_for(z.size(), [&](std::size_t i) { aberth_step(i, z, &zn[i]); });
            z.swap(zn);
        } else {
            for (std::size_t i = 0; i < z.size(); ++i) {
                ev[i] = eval(z[i]);
                aberth_step(i, z, &z[i]);
            }
        }
        double max_rel = 0;
        for (double r : rel) max_rel = std::max(max_rel, r);
        if (max_rel <= opt.tol) {
            step_ok = true;
            break;
        }
    }

    // residuals at the final points
    std::vector<double> res(z.size());
    parallel_for(z.size(), [&](std::size_t i) {
        ev[i] = eval(z[i]);
        res[i] = eval_residual(ev[i], z[i]);
    });

    // Certification. Simple roots pass the first-order bound. Near a
    // multiplicity-k root the Newton ratio stalls at the pseudozero scale, so
    // a point there certifies instead through the k-th order cluster radius
    // |k! p / p^(k)|^(1/k), which must reach the k-th root of machine noise.
    const double bound = opt.tol * std::max(1.0, double(cert_degree));
    const double eps_mach = 2.3e-16;
    auto cluster_certified = [&](cd zi) {
        int kmax = std::min(8, cert_degree);
        for (int k = 2; k <= kmax; ++k) {
            double bk = std::min(1e-4, std::max(1e3 * opt.tol, std::pow(eps_mach, 1.0 / (k + 1)))) *
                        (1.0 + std::abs(zi));
            if (eval.cluster_radius(zi, k) <= bk) return true;
        }
        return false;
    };

    // An estimate can strand inside the pseudozero plateau where the Newton
    // direction is pure noise. Restart such points from the typical root
    // radius with every other estimate frozen: the Aberth sum deflates the
    // claimed roots, leaving only the missing one attracting.
    double rtyp;
    {
        std::vector<double> mags(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) mags[i] = std::abs(z[i]);
        std::nth_element(mags.begin(), mags.begin() + long(mags.size() / 2), mags.end());
        rtyp = std::max(1e-3, mags[mags.size() / 2]);
    }
    auto solo_polish = [&](std::size_t i, cd w, int iters) {
        for (int it2 = 0; it2 < iters; ++it2) {
            point_eval e = eval(w);
            cd N = e.newton;
            if (!std::isfinite(N.real()) || !std::isfinite(N.imag())) break;
            cd S(0, 0);
            for (std::size_t j = 0; j < z.size(); ++j) {
                if (j == i) continue;
                cd dz = w - z[j];
                if (std::norm(dz) < 1e-300) continue;
                S += cd(1, 0) / dz;
            }
            cd denom = cd(1, 0) - N * S;
            cd step = (std::abs(denom) > 1e-14) ? N / denom : N;
            double cap = 0.5 * (1.0 + std::abs(w));
            double as = std::abs(step);
            if (!std::isfinite(as)) break;
            if (as > cap) step *= cap / as;
            w -= step;
            if (std::abs(step) <= opt.tol * (1.0 + std::abs(w))) break;
        }
        return w;
    };

    bool certified = true;
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (res[i] <= bound) continue;
        if (cluster_certified(z[i])) continue;
        double best_res = res[i];
        cd best_z = z[i];
        const double golden = 0.6180339887498949;
        std::vector<cd> starts;
        if (eval.root_sum_available()) {
            // first-moment deficit: where the missing root must sit if all
            // other estimates are right
            cd deficit = eval.root_sum();
            for (std::size_t j = 0; j < z.size(); ++j)
                if (j != i) deficit -= z[j];
            starts.push_back(deficit);
        }
        for (int attempt = 0; attempt < 8; ++attempt) {
            double th = 2.0 * kPi * ((attempt + 0.5) / 8.0 + golden * double(i + 1));
            double rr = rtyp * (attempt % 2 == 0 ? 1.0 : 1.3);
            starts.push_back(rr * cd(std::cos(th), std::sin(th)));
        }
        for (cd start : starts) {
            cd w = solo_polish(i, start, 160);
            point_eval e = eval(w);
            double r2 = eval_residual(e, w);
            if (r2 < best_res) {
                best_res = r2;
                best_z = w;
            }
        }
        {
            cd w = solo_polish(i, best_z, 80);
            point_eval e = eval(w);
            double r2 = eval_residual(e, w);
            if (r2 < best_res) {
                best_res = r2;
                best_z = w;
            }
        }
        z[i] = best_z;
        res[i] = best_res;
        if (res[i] <= bound) continue;
        if (cluster_certified(z[i])) continue;
        certified = false;
    }

    std::vector<std::size_t> order(z.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return lex_less(z[a], z[b]); });
    out.points.reserve(z.size());
    out.residuals.reserve(z.size());
    for (std::size_t i : order) {
        out.points.push_back(z[i]);
        out.residuals.push_back(res[i]);
    }
    (void)step_ok;  // stopping detail; the certification above decides the flag
    out.converged = certified;
    return out;
}

// Bini-style initial guesses from the upper convex hull of (k, log|c_k|).
inline std::vector<cd> bini_initial_points(const std::vector<cd>& c) {
    const int d = int(c.size()) - 1;
    std::vector<std::pair<int, double>> pts;
    for (int k = 0; k <= d; ++k) {
        double a = std::abs(c[std::size_t(k)]);
        if (a > 0) pts.emplace_back(k, std::log(a));
    }
    // upper hull, left to right
    std::vector<std::pair<int, double>> hull;
    for (const auto& p : pts) {
        while (hull.size() >= 2) {
            auto& q1 = hull[hull.size() - 2];
            auto& q2 = hull[hull.size() - 1];
            double cross = (double(q2.first - q1.first)) * (p.second - q1.second) -
                           (double(p.first - q1.first)) * (q2.second - q1.second);
            if (cross >= 0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(p);
    }
    std::vector<cd> z;
    z.reserve(std::size_t(d));
    const double golden = 0.6180339887498949;
    for (std::size_t e = 0; e + 1 < hull.size(); ++e) {
        int k1 = hull[e].first, k2 = hull[e + 1].first;
        double r = std::exp((hull[e].second - hull[e + 1].second) / double(k2 - k1));
        r = std::clamp(r, 1e-9, 1e9);
        int m = k2 - k1;
        for (int j = 0; j < m; ++j) {
            double th = 2.0 * kPi * (double(j) + 0.5) / double(m) + 2.0 * kPi * golden * double(e + 1);
            z.push_back(r * cd(std::cos(th), std::sin(th)));
        }
    }
    while (int(z.size()) < d) z.push_back(cd(0.5, 0.5) * double(z.size() + 1));
    return z;
}

struct coeff_evaluator {
    const std::vector<cd>* c;
    int d;

    // Inside the unit disk plain Horner; outside, p(z) = z^d rev(p)(1/z), so
    // the Horner runs on the reversed coefficients at 1/z and the z^d factor
    // stays in log form. High degrees put |z|^d past double range while the
    // roots out there are perfectly well conditioned.
    point_eval operator()(cd z) const {
        const auto& cc = *c;
        point_eval e;
        if (std::abs(z) <= 1.0) {
            cd p = cc[std::size_t(d)], dp(0, 0);
            for (int k = d - 1; k >= 0; --k) {
                dp = dp * z + p;
                p = p * z + cc[std::size_t(k)];
            }
            e.log_p = std::log(std::abs(p));
            e.log_dp = std::log(std::abs(dp));
            e.newton = (std::abs(dp) > 0) ? p / dp : cd(std::numeric_limits<double>::infinity(), 0);
        } else {
            cd u = cd(1, 0) / z;
            cd q = cc[0], dq(0, 0);
            for (int k = 1; k <= d; ++k) {
                dq = dq * u + q;
                q = q * u + cc[std::size_t(k)];
            }
            // p'(z) = z^{d-1} (d q(u) - u q'(u))
            cd dnum = double(d) * q - u * dq;
            double lz = std::log(std::abs(z));
            e.log_p = double(d) * lz + std::log(std::abs(q));
            e.log_dp = double(d - 1) * lz + std::log(std::abs(dnum));
            e.newton = (std::abs(dnum) > 0) ? z * q / dnum
                                            : cd(std::numeric_limits<double>::infinity(), 0);
        }
        if (!std::isfinite(e.log_p) && e.log_p > 0) {  // non-finite garbage input
            e.log_p = 710.0;
            e.log_dp = 700.0;
            e.newton = z / double(std::max(1, d));
        }
        return e;
    }

    bool root_sum_available() const { return d >= 1; }
    cd root_sum() const { return -(*c)[std::size_t(d - 1)] / (*c)[std::size_t(d)]; }

    // |k! p(z) / p^(k)(z)|^(1/k) via Horner with k derivative accumulators
    // (Taylor coefficients, so the factorials cancel). Outside the unit disk
    // the same is run on the reversed polynomial at 1/z; a k-cluster of p at
    // z maps to one of rev(p) at 1/z with radii scaled by |z|^2.
    double cluster_radius(cd z, int k) const {
        const auto& cc = *c;
        std::vector<cd> t(std::size_t(k) + 1, cd{});
        bool rev = std::abs(z) > 1.0;
        cd x = rev ? cd(1, 0) / z : z;
        t[0] = rev ? cc[0] : cc[std::size_t(d)];
        for (int i = 1; i <= d; ++i) {
            for (int j = k; j >= 1; --j) t[std::size_t(j)] = t[std::size_t(j)] * x + t[std::size_t(j - 1)];
            t[0] = t[0] * x + cc[std::size_t(rev ? i : d - i)];
        }
        double num = std::abs(t[0]), den = std::abs(t[std::size_t(k)]);
        if (!std::isfinite(num) || !std::isfinite(den) || den == 0.0)
            return std::numeric_limits<double>::infinity();
        double eta = std::exp((std::log(num) - std::log(den)) / double(k));
        return rev ? std::norm(z) * eta : eta;
    }
};

}  // namespace detail

// All zeros (with multiplicity) of a dense-coefficient polynomial by
// Aberth-Ehrlich. Exact trailing-zero coefficients deflate to exact roots at
// the origin first.
inline root_cloud find_roots(const cpoly& p, double tol = 1e-10, int max_iter = 260) {
    if (p.is_zero()) throw zero_polynomial_error("find_roots: zero polynomial");
    if (p.degree() < 1) throw std::invalid_argument("find_roots: degree must be >= 1");

    std::vector<cd> c = p.coeffs();
    std::size_t v = 0;
    while (v < c.size() && c[v] == cd{}) ++v;
    std::vector<cd> zero_part(v, cd(0, 0));
    c.erase(c.begin(), c.begin() + long(v));

    root_cloud cloud;
    if (c.size() <= 1) {
        cloud.points = zero_part;
        cloud.residuals.assign(zero_part.size(), 0.0);
        cloud.converged = true;
        return cloud;
    }
    double m = 0;
    for (const auto& x : c) m = std::max(m, std::abs(x));
    for (auto& x : c) x /= m;

    detail::coeff_evaluator ev{&c, int(c.size()) - 1};
    aberth_options opt;
    opt.tol = tol;
    opt.max_iter = max_iter;
    cloud = detail::aberth_core(detail::bini_initial_points(c), ev, opt, p.degree());

    if (!zero_part.empty()) {
        cloud.points.insert(cloud.points.end(), zero_part.begin(), zero_part.end());
        cloud.residuals.insert(cloud.residuals.end(), zero_part.size(), 0.0);
        std::vector<std::size_t> order(cloud.points.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return lex_less(cloud.points[a], cloud.points[b]);
        });
        root_cloud sorted;
        sorted.converged = cloud.converged;
        for (std::size_t i : order) {
            sorted.points.push_back(cloud.points[i]);
            sorted.residuals.push_back(cloud.residuals[i]);
        }
        cloud = std::move(sorted);
    }
    return cloud;
}

// |z| > escape_radius(f) implies |f(z)| >= 2|z|.
inline double escape_radius(const cpoly& f) {
    int d = f.degree();
    double s = 0;
    for (int k = 0; k < d; ++k) s += std::abs(f[std::size_t(k)]);
    return std::max(2.0, (2.0 + s) / std::abs(f.leading()));
}

// Zeros of (f^n)^(m). The polynomial is never expanded: p/p' at each estimate
// comes from a log-scaled order-(m+1) jet of f^n, which stays accurate at
// degrees where the coefficient vector of f^n has long since left double
// range. Maps with a finite exceptional point b are exact powers of (z-b) up
// to an affine shift, so their zero multiset is written down directly.
// `warm_start` (optional) seeds the iteration, e.g. with the zero cloud of the
// previous n for continuation runs; points are recycled with a deterministic
// split when fewer seeds than roots are supplied.
inline root_cloud roots_of_iterated_derivative(const cpoly& f, int n, int m, double tol = 1e-10,
                                               int max_iter = 400,
                                               std::size_t degree_cap = kDefaultDegreeCap,
                                               const std::vector<cd>* warm_start = nullptr) {
    int d = f.degree();
    if (d < 2) throw std::invalid_argument("roots_of_iterated_derivative: degree must be >= 2");
    if (n < 1 || m < 1) throw std::invalid_argument("roots_of_iterated_derivative: n, m >= 1");
    double dn = std::pow(double(d), double(n));
    if (dn > double(degree_cap))
        throw degree_cap_error("roots_of_iterated_derivative: d^n exceeds cap");
    long long nroots = (long long)std::llround(dn) - m;
    if (nroots < 1) throw std::invalid_argument("roots_of_iterated_derivative: need m < d^n");

    root_cloud cloud;
    exceptional_report exc = detect_exceptional(f);
    if (exc.has_finite_exceptional) {
        cloud.points.assign(std::size_t(nroots), exc.b);
        cloud.residuals.assign(std::size_t(nroots), 0.0);
        cloud.converged = true;
        return cloud;
    }

    struct dynamic_evaluator {
        const cpoly* f;
        int n, m;
        detail::point_eval operator()(cd z) const {
            scaled_jet s = scaled_iterate(*f, z, n, m + 1);
            detail::point_eval e;
            e.log_p = log_abs_derivative(s, m);
            e.log_dp = log_abs_derivative(s, m + 1);
            cd cm = s.c[std::size_t(m)], cm1 = s.c[std::size_t(m + 1)];
            if (std::abs(cm1) > 0)
                e.newton = cm / (double(m + 1) * cm1);
            else
                e.newton = cd(std::numeric_limits<double>::infinity(), 0);
            return e;
        }
        double cluster_radius(cd z, int k) const {
            scaled_jet s = scaled_iterate(*f, z, n, m + k);
            double le = (log_factorial(k) + log_abs_derivative(s, m) -
                         log_abs_derivative(s, m + k)) /
                        double(k);
            return std::isfinite(le) ? std::exp(std::min(700.0, le))
                                     : (le < 0 ? 0.0 : std::numeric_limits<double>::infinity());
        }
        bool root_sum_available() const { return true; }
        // The top two coefficients of f^n obey A <- c_d A^d, B <- d c_d A^(d-1) B,
        // so the second-to-leading ratio multiplies by d each iterate; taking m
        // derivatives rescales the root sum by (d^n - m)/d^n.
        cd root_sum() const {
            int d = f->degree();
            cd beta = (*f)[std::size_t(d - 1)] / f->leading();
            double dn = std::pow(double(d), double(n));
            beta *= dn / double(d);  // d^{n-1} growth
            return -beta * (dn - double(m)) / dn;
        }
    };
    dynamic_evaluator eval{&f, n, m};

    // all zeros lie inside the escape radius (preimages of 0 stay inside, and
    // zeros of the derivatives stay in their convex hull)
    double R = escape_radius(f);
    std::vector<cd> init;
    init.reserve(std::size_t(nroots));
    const double golden = 0.6180339887498949;
    if (warm_start && !warm_start->empty()) {
        const auto& w = *warm_start;
        for (long long k = 0; k < nroots; ++k) {
            cd base = w[std::size_t(k) % w.size()];
            double th = 2.0 * kPi * golden * double(k);
            init.push_back(base + 2e-4 * (1.0 + std::abs(base)) * cd(std::cos(th), std::sin(th)));
        }
    } else {
        for (long long k = 0; k < nroots; ++k) {
            double r = R * (0.55 + 0.22 * double(k % 3));
            double th =
                2.0 * kPi * (double(k) + 0.5) / double(nroots) + 2.0 * kPi * golden * double(k % 3);
            init.push_back(r * cd(std::cos(th), std::sin(th)));
        }
    }
    aberth_options opt;
    opt.tol = tol;
    opt.max_iter = max_iter;
    return detail::aberth_core(std::move(init), eval, opt, int(nroots));
}

}  // namespace polydyn

#endif
