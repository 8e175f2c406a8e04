#ifndef POLYDYN_LINEARIZE_HPP
#define POLYDYN_LINEARIZE_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "bell.hpp"
#include "complex_poly.hpp"
#include "jet.hpp"
#include "rootfinder.hpp"
#include "util.hpp"

namespace polydyn {

enum class cycle_kind { attracting, superattracting, parabolic, unusable };

struct cycle_data {
    cd point{0, 0};           // periodic point a
    int period = 1;           // minimal period p
    cd multiplier{0, 0};      // (f^p)'(a)
    cycle_kind kind = cycle_kind::unusable;
    cd multiplier_root{1, 0};  // fixed p-th root of the multiplier, 1 when parabolic
    bool usable() const { return kind != cycle_kind::unusable; }
};

// All fixed points of f^p with multipliers and classification. Multiplier on
// the unit circle away from 1 is flagged unusable.
inline std::vector<cycle_data> find_cycle(const cpoly& f, int p,
                                          std::optional<rect_t> seed_box = {},
                                          double tol_fix = 1e-9) {
    if (p < 1) throw std::invalid_argument("find_cycle: period must be >= 1");
    if (f.degree() < 1) throw std::invalid_argument("find_cycle: degree must be >= 1");
    cpoly g = iterate(f, p) - cpoly::monomial(cd(1, 0), 1);
    if (g.is_zero()) throw std::invalid_argument("find_cycle: f^p is the identity");
    root_cloud fixed = find_roots(g, 1e-12, 400);

    // merge root clusters (multiple fixed points, e.g. parabolic ones, come
    // out as tight clusters whose mean is the accurate point)
    std::vector<cd> reps;
    std::vector<int> mult;
    for (cd z : fixed.points) {
        bool merged = false;
        for (std::size_t i = 0; i < reps.size(); ++i) {
            double cr = 1e-6 * (1.0 + std::abs(reps[i]));
            if (std::abs(z - reps[i]) <= cr) {
                reps[i] = (reps[i] * double(mult[i]) + z) / double(mult[i] + 1);
                mult[i] += 1;
                merged = true;
                break;
            }
        }
        if (!merged) {
            reps.push_back(z);
            mult.push_back(1);
        }
    }

    std::vector<cycle_data> out;
    for (cd a : reps) {
        if (seed_box && !seed_box->contains(a)) continue;
        int q = p;
        for (int cand = 1; cand < p; ++cand) {
            if (p % cand != 0) continue;
            cd fa = a;
            for (int k = 0; k < cand; ++k) fa = f(fa);
            if (std::abs(fa - a) <= tol_fix * (1.0 + std::abs(a))) {
                q = cand;
                break;
            }
        }
        // Newton polish on f^q(z) - z when the fixed point is simple
        cd z = a;
        for (int pass = 0; pass < 3; ++pass) {
            jet j = iterate_jet(f, z, q, 1);
            cd denom = j.coeff(1) - cd(1, 0);
            if (std::abs(denom) < 1e-8) break;
            z -= (j.value() - z) / denom;
        }
        a = z;
        cd lambda = iterate_jet(f, a, q, 1).coeff(1);

        cycle_data c;
        c.point = a;
        c.period = q;
        c.multiplier = lambda;
        if (std::abs(lambda - cd(1, 0)) <= 1e-8) {
            c.kind = cycle_kind::parabolic;
            c.multiplier_root = cd(1, 0);
        } else if (std::abs(lambda) <= 1e-8) {
            c.kind = cycle_kind::superattracting;
            c.multiplier_root = cd(0, 0);
        } else if (std::abs(lambda) < 1.0) {
            c.kind = cycle_kind::attracting;
            c.multiplier_root = std::exp(std::log(lambda) / double(q));
        } else {
            c.kind = cycle_kind::unusable;
            c.multiplier_root = std::exp(std::log(lambda) / double(q));
        }
        out.push_back(c);
    }
    std::sort(out.begin(), out.end(),
              [](const cycle_data& x, const cycle_data& y) { return lex_less(x.point, y.point); });
    return out;
}

enum class linearizer_mode { schroeder, abel };

struct petal_t {
    cd direction{-1, 0};  // unit attracting direction
    double radius = 0.0;  // tangent disk of this radius, centered at a + radius*direction
    bool contains(cd z, cd a) const { return std::abs(z - (a + radius * direction)) <= radius; }
};

// Evaluator for the linearizing coordinate at an attracting (Koenigs) or
// parabolic (Fatou) cycle, with derivatives through jets.
class linearizer {
  public:
    static linearizer make_schroeder(const cpoly& f, const cycle_data& cycle, int n_max = 250) {
        if (cycle.kind == cycle_kind::superattracting)
            throw superattracting_unsupported("schroeder: no Koenigs map at multiplier 0");
        if (cycle.kind != cycle_kind::attracting)
            throw std::invalid_argument("schroeder: cycle must be attracting");
        linearizer lin;
        lin.f_ = f;
        lin.cycle_ = cycle;
        lin.mode_ = linearizer_mode::schroeder;
        lin.truncation_ = n_max;
        lin.capture_delta_ = 1e-8 * (1.0 + std::abs(cycle.point));
        // Depth balances the (extrapolated) truncation term |lambda|^2k
        // against the per-step rounding amplified by lambda^{-k}; going much
        // deeper loses accuracy again.
        double lr = std::abs(cycle.multiplier_root);
        lin.k_min_ = int(std::ceil(std::log(1e-6) / std::log(lr)));
        lin.k_min_ = std::clamp(lin.k_min_, cycle.period, n_max * cycle.period);
        return lin;
    }

    static linearizer make_abel(const cpoly& f, const cycle_data& cycle, long truncation = 10000) {
        if (cycle.kind != cycle_kind::parabolic)
            throw std::invalid_argument("abel: cycle must be parabolic");
        linearizer lin;
        lin.f_ = f;
        lin.cycle_ = cycle;
        lin.mode_ = linearizer_mode::abel;
        lin.truncation_ = truncation;
        lin.fp_ = iterate(f, cycle.period);
        jet loc = iterate_jet(f, cycle.point, cycle.period, 2);
        lin.c2_ = loc.coeff(2);
        if (std::abs(lin.c2_) < 1e-10)
            throw degenerate_parabolic("abel: vanishing quadratic term (higher multiplicity)");
        lin.petal_ = lin.fit_petal();
        // the iterative residue is a constant of the chart: fit it once from a
        // reference orbit so every phi evaluation shares the same gauge
        cd z_ref = cycle.point + 0.7 * lin.petal_.radius * lin.petal_.direction;
        lin.beta_ = lin.fit_beta(z_ref);
        return lin;
    }

    const cycle_data& cycle() const { return cycle_; }
    linearizer_mode mode() const { return mode_; }
    const petal_t& petal() const { return petal_; }
    cd lambda_root() const { return cycle_.multiplier_root; }
    long truncation() const { return truncation_; }
    cd parabolic_c2() const { return c2_; }

    jet phi(cd z, int t) const {
        return mode_ == linearizer_mode::schroeder ? schroeder_phi(z, t) : abel_phi(z, t);
    }

    // Koenigs limit (f^k(z) - a) / lambda_root^k, stopped once the orbit is
    // captured near a and enough steps have run for the jet coefficients to
    // settle. The truncation error is G(z) lambda_root^k + O(lambda_root^2k),
    // so one Richardson step against depth k+1 removes the leading term. The
    // reported map satisfies phi(f(z)) = lambda_root * phi(z) across the
    // whole cycle.
    jet schroeder_phi(cd z, int t) const {
        const cd a = cycle_.point;
        const cd lr = cycle_.multiplier_root;
        const int max_steps = int(truncation_) * cycle_.period;
        jet j = jet::identity(z, t);
        int k = 0;
        const double far = 4.0 * escape_radius(f_);
        while (true) {
            bool near = std::abs(j.value() - a) <= capture_delta_;
            if (near && k >= k_min_) break;
            if (k >= max_steps) {
                if (near) break;
                throw not_in_basin("schroeder: orbit not captured after " +
                                   std::to_string(max_steps) + " steps");
            }
            if (std::abs(j.value()) > far)
                throw not_in_basin("schroeder: orbit escapes");
            j = jet_eval_poly(f_, j);
            if (!j.all_finite()) throw not_in_basin("schroeder: orbit not finite");
            ++k;
        }
        cd inv_lrk = cd(1, 0) / pow_int(lr, k);
        jet phi_k = (j - a) * inv_lrk;
        const cd lam = cycle_.multiplier;
        if (std::abs(cd(1, 0) - lam) < 0.05) return phi_k;  // extrapolation gains nothing near 1
        // one more full period: consecutive capture depths differ by the
        // multiplier, never by its root (between them the orbit visits the
        // other cycle points)
        jet j2 = j;
        for (int s = 0; s < cycle_.period; ++s) j2 = jet_eval_poly(f_, j2);
        jet phi_k1 = (j2 - a) * (inv_lrk / lam);
        return phi_k + (phi_k1 - phi_k) * (cd(1, 0) / (cd(1, 0) - lam));
    }

    // Fatou coordinate through the local chart w = -1/(c2 (z - a)):
    //   phi_N = (w o f^{pN} - N - beta log(w o f^{pN})) / p,
    // N fixed by `truncation`; beta is fitted from w_j - j against log w_j
    // along the orbit. Additive gauge is arbitrary; derivatives are
    // insensitive to the beta fit.
    jet abel_phi(cd z, int t) const {
        const cd a = cycle_.point;
        if (!petal_.contains(z, a))
            throw not_in_petal("abel: point outside the fixed attracting petal");
        const long N = truncation_;
        jet j = jet::identity(z, t);
        for (long k = 1; k <= N; ++k) {
            j = jet_eval_poly(fp_, j);
            if (!j.all_finite()) throw not_in_petal("abel: orbit left the petal (non-finite)");
        }
        jet u = j - a;
        jet w = reciprocal(u) * (cd(-1, 0) / c2_);
        jet out = w - cd(double(N), 0) - beta_ * jet_log(w);
        return out * (cd(1, 0) / double(cycle_.period));
    }

    cd w_chart(cd z) const { return cd(-1, 0) / (c2_ * (z - cycle_.point)); }
    cd beta() const { return beta_; }

    // fitted iterative residue of the parabolic chart: slope of w_j - j
    // against log w_j along an orbit
    cd fit_beta(cd z) const {
        const long N = truncation_;
        cd cur = z;
        std::vector<cd> xs, ys;
        long next_sample = 64;
        for (long k = 1; k <= N; ++k) {
            cur = fp_(cur);
            if (k == next_sample || k == N) {
                cd w = w_chart(cur);
                xs.push_back(std::log(w));
                ys.push_back(w - cd(double(k), 0));
                next_sample *= 2;
            }
        }
        return fit_complex_slope(xs, ys);
    }

    static cd pow_int(cd base, int k) {
        cd r(1, 0);
        cd b = base;
        int e = k;
        while (e > 0) {
            if (e & 1) r *= b;
            b *= b;
            e >>= 1;
        }
        return r;
    }

  private:
    cpoly f_;
    cpoly fp_;  // f^p (abel mode)
    cycle_data cycle_;
    linearizer_mode mode_ = linearizer_mode::schroeder;
    long truncation_ = 250;
    double capture_delta_ = 1e-8;
    int k_min_ = 1;
    cd c2_{0, 0};
    cd beta_{0, 0};
    petal_t petal_;

    // Attracting direction for a simple parabolic point: the ray along
    // -1/c2. The petal is the largest tangent disk (bisected, with margin)
    // whose sampled orbits stay inside and contract to a.
    petal_t fit_petal() const {
        petal_t p;
        cd v = cd(-1, 0) / c2_;
        p.direction = v / std::abs(v);
        double r_lo = 0.0, r_hi = 0.9 / std::abs(c2_);
        auto invariant = [&](double r) {
            const cd center = cycle_.point + r * p.direction;
            for (int s = 0; s < 24; ++s) {
                double rho = (s % 3 == 0) ? 0.95 : (s % 3 == 1 ? 0.6 : 0.3);
                double th = 2.0 * kPi * double(s) / 24.0;
                cd z = center + rho * r * cd(std::cos(th), std::sin(th));
                cd cur = z;
                for (int k = 0; k < 10000; ++k) {
                    cur = fp_(cur);
                    if (std::abs(cur - center) > r * (1.0 + 1e-9)) return false;
                    if (std::abs(cur - cycle_.point) < 1e-3 * r) break;
                }
                if (std::abs(cur - cycle_.point) > 0.2 * r) return false;
            }
            return true;
        };
        for (int it = 0; it < 18; ++it) {
            double mid = 0.5 * (r_lo + r_hi);
            if (invariant(mid))
                r_lo = mid;
            else
                r_hi = mid;
        }
        if (r_lo == 0.0) throw degenerate_parabolic("abel: no invariant petal found");
        p.radius = 0.95 * r_lo;
        return p;
    }
};

// (f^n)^(t)(z) / (f^n)'(z) through an order-t jet.
inline cd derivative_ratio_iterate(const cpoly& f, int n, int t, cd z) {
    if (t < 2) throw std::invalid_argument("derivative_ratio_iterate: t must be >= 2");
    jet j = iterate_jet(f, z, n, t);
    cd c1 = j.coeff(1);
    if (!(std::abs(c1) > 1e-300))
        throw derivative_vanishes("derivative_ratio_iterate: (f^n)' vanishes at the point");
    return j.deriv(t) / c1;
}

struct rate_report {
    int t = 2;
    std::vector<std::pair<int, double>> errors;  // (n, e_n)
    double fitted_slope = 0.0;
    double expected_slope = 0.0;
    int fit_points = 0;
    double residual_floor = 0.0;  // e_n below this were excluded from the fit
};

// Error sequence e_n = max over points of |(f^n)^(t)/(f^n)' - phi^(t)/phi'|
// and a straight-line rate fit: against n for attracting cycles (expected
// slope log|lambda|/p), against log n for parabolic ones (expected slope -1).
inline rate_report derivative_ratio_rates(const cpoly& f, const cycle_data& cycle, int t,
                                          const std::vector<cd>& test_points,
                                          const std::vector<int>& n_list,
                                          long parabolic_truncation = 1000000) {
    if (t < 2) throw std::invalid_argument("derivative_ratio_rates: t must be >= 2");
    if (test_points.empty()) throw std::invalid_argument("derivative_ratio_rates: no test points");
    const bool parabolic = cycle.kind == cycle_kind::parabolic;
    linearizer lin = parabolic ? linearizer::make_abel(f, cycle, parabolic_truncation)
                               : linearizer::make_schroeder(f, cycle);

    std::vector<cd> ref(test_points.size());
    for (std::size_t i = 0; i < test_points.size(); ++i) {
        jet ph = lin.phi(test_points[i], t);
        cd p1 = ph.deriv(1);
        if (!(std::abs(p1) > 1e-10))
            throw derivative_vanishes("derivative_ratio_rates: phi' vanishes at a test point");
        ref[i] = ph.deriv(t) / p1;
    }

    rate_report rep;
    rep.t = t;
    rep.expected_slope =
        parabolic ? -1.0 : std::log(std::abs(cycle.multiplier)) / double(cycle.period);
    for (int n : n_list) {
        double e = 0;
        for (std::size_t i = 0; i < test_points.size(); ++i)
            e = std::max(e, std::abs(derivative_ratio_iterate(f, n, t, test_points[i]) - ref[i]));
        rep.errors.emplace_back(n, e);
    }

    double e_max = 0;
    for (const auto& [n, e] : rep.errors) e_max = std::max(e_max, e);
    rep.residual_floor = std::max(1e-13, 1e-8 * e_max);
    std::vector<double> xs, ys;
    for (const auto& [n, e] : rep.errors) {
        if (e < rep.residual_floor) continue;
        xs.push_back(parabolic ? std::log(double(n)) : double(n));
        ys.push_back(std::log(e));
    }
    if (xs.size() < 5) {
        xs.clear();
        ys.clear();
        for (const auto& [n, e] : rep.errors) {
            if (e <= 0) continue;
            xs.push_back(parabolic ? std::log(double(n)) : double(n));
            ys.push_back(std::log(e));
        }
    }
    line_fit fit = fit_line(xs, ys);
    rep.fitted_slope = fit.slope;
    rep.fit_points = fit.points;
    return rep;
}

// Residual of the full higher-derivative ratio expansion
//   (f^n)^(t)/(f^n)' = phi^(t)/phi'
//     + sum_{s=1}^{t-1} C(t-1,s) [ sum_{u=1}^{s} (phiInv^(u+1)/phiInv')(phi(f^n z))
//         * A_{s,u}(lr^n phi', ..., lr^n phi^(s)) ] * phi^(t-s)/phi',
// with the inverse-map derivatives obtained by jet inversion of phi near a.
inline double derivative_ratio_expansion_residual(const cpoly& f, const cycle_data& cycle,
                                                  const bell_table& table, int t, cd z, int n) {
    if (cycle.kind != cycle_kind::attracting)
        throw std::invalid_argument("expansion residual: attracting cycles only");
    if (t < 2 || t > table.s_max + 1)
        throw std::invalid_argument("expansion residual: need 2 <= t <= s_max + 1");
    linearizer lin = linearizer::make_schroeder(f, cycle);

    jet ph = lin.phi(z, t);
    cd p1 = ph.deriv(1);
    if (!(std::abs(p1) > 1e-12))
        throw derivative_vanishes("expansion residual: phi' vanishes at z");

    cd v = z;
    for (int k = 0; k < n; ++k) v = f(v);
    jet ph_v = lin.phi(v, t);
    jet inv = invert(ph_v);  // jet of phi^{-1} at phi(v)
    cd inv1 = inv.deriv(1);

    cd lrn = linearizer::pow_int(lin.lambda_root(), n);
    std::vector<cd> args(std::size_t(t - 1));
    for (int q = 0; q < t - 1; ++q) args[std::size_t(q)] = lrn * ph.deriv(q + 1);

    cd lhs = derivative_ratio_iterate(f, n, t, z);
    cd rhs = ph.deriv(t) / p1;
    for (int s = 1; s <= t - 1; ++s) {
        cd inner(0, 0);
        for (int u = 1; u <= s; ++u)
            inner += inv.deriv(u + 1) / inv1 * table.entry(s, u).evaluate(args);
        rhs += double(binomial_ll(t - 1, s)) * inner * (ph.deriv(t - s) / p1);
    }
    return std::abs(lhs - rhs) / (std::abs(lhs) + 1e-12);
}

}  // namespace polydyn

#endif
