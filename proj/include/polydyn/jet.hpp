#ifndef POLYDYN_JET_HPP
#define POLYDYN_JET_HPP

#include <cmath>
#include <complex>
#include <vector>

#include "complex_poly.hpp"
#include "errors.hpp"
#include "util.hpp"

namespace polydyn {

// Truncated Taylor expansion of order t at a point. Coefficients are stored
// normalized (k-th derivative / k!) so high orders stay in range.
class jet {
  public:
    jet() : base_(0.0, 0.0), c_(1, cd{}) {}
    jet(cd base, int order) : base_(base), c_(check_order(order) + 1, cd{}) {}

    static jet identity(cd z, int order) {
        jet j(z, order);
        j.c_[0] = z;
        if (order >= 1) j.c_[1] = cd(1, 0);
        return j;
    }
    static jet constant(cd v, cd base, int order) {
        jet j(base, order);
        j.c_[0] = v;
        return j;
    }

    int order() const { return int(c_.size()) - 1; }
    cd base() const { return base_; }
    cd value() const { return c_[0]; }
    cd coeff(int k) const { return c_[std::size_t(k)]; }
    cd& coeff(int k) { return c_[std::size_t(k)]; }
    const std::vector<cd>& coeffs() const { return c_; }

    // k-th derivative value: k! * c_k
    cd deriv(int k) const { return c_[std::size_t(k)] * std::exp(log_factorial(k)); }

    bool all_finite() const {
        for (const auto& v : c_)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
        return true;
    }

    jet& operator+=(const jet& o) {
        require_same_order(o);
        for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
        return *this;
    }
    jet& operator-=(const jet& o) {
        require_same_order(o);
        for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
        return *this;
    }
    jet& operator+=(cd s) {
        c_[0] += s;
        return *this;
    }
    jet& operator-=(cd s) {
        c_[0] -= s;
        return *this;
    }
    jet& operator*=(cd s) {
        for (auto& v : c_) v *= s;
        return *this;
    }

    friend jet operator+(jet a, const jet& b) { return a += b; }
    friend jet operator-(jet a, const jet& b) { return a -= b; }
    friend jet operator+(jet a, cd s) { return a += s; }
    friend jet operator-(jet a, cd s) { return a -= s; }
    friend jet operator*(cd s, jet a) { return a *= s; }
    friend jet operator*(jet a, cd s) { return a *= s; }

    // Cauchy product truncated at the common order.
    friend jet operator*(const jet& a, const jet& b) {
        a.require_same_order(b);
        jet r(a.base_, a.order());
        const int t = a.order();
        for (int i = 0; i <= t; ++i) {
            if (a.c_[std::size_t(i)] == cd{}) continue;
            for (int j = 0; i + j <= t; ++j)
                r.c_[std::size_t(i + j)] += a.c_[std::size_t(i)] * b.c_[std::size_t(j)];
        }
        return r;
    }

    void require_same_order(const jet& o) const {
        if (order() != o.order())
            throw order_mismatch("jet order mismatch: " + std::to_string(order()) + " vs " +
                                 std::to_string(o.order()));
    }

  private:
    cd base_;
    std::vector<cd> c_;

    static int check_order(int order) {
        if (order < 0) throw std::invalid_argument("jet order must be >= 0");
        return order;
    }
};

// Horner over the jet ring: the jet of f at x.base pushed through f.
inline jet jet_eval_poly(const cpoly& f, const jet& x) {
    if (f.is_zero()) return jet::constant(cd{}, x.base(), x.order());
    const auto& c = f.coeffs();
    jet r = jet::constant(c.back(), x.base(), x.order());
    for (std::size_t k = c.size() - 1; k-- > 0;) {
        r = r * x;
        r += c[k];
    }
    return r;
}

// Order-t jet of f^n at z through n jet Horner steps; cost O(n d t^2),
// independent of the degree d^n of the iterate.
inline jet iterate_jet(const cpoly& f, cd z, int n, int t) {
    if (n < 1) throw std::invalid_argument("iterate_jet: n must be >= 1");
    if (t < 0) throw std::invalid_argument("iterate_jet: order must be >= 0");
    jet j = jet::identity(z, t);
    for (int k = 0; k < n; ++k) {
        j = jet_eval_poly(f, j);
        if (!j.all_finite())
            throw nonfinite_error("iterate_jet: non-finite value after step " + std::to_string(k + 1),
                                  k + 1);
    }
    return j;
}

// G composed with h, where G is expanded at h's value. Truncates to the
// smaller of the two orders.
inline jet compose(const jet& G, const jet& h) {
    double sc = 1.0 + std::abs(h.value());
    if (std::abs(G.base() - h.value()) > 1e-8 * sc)
        throw std::invalid_argument("jet compose: G must be based at h's value");
    const int t = std::min(G.order(), h.order());
    jet ht(h.base(), t);
    for (int k = 1; k <= t; ++k) ht.coeff(k) = h.coeff(k);
    jet r = jet::constant(G.coeff(std::min(G.order(), t)), h.base(), t);
    for (int k = std::min(G.order(), t) - 1; k >= 0; --k) {
        r = r * ht;
        r += G.coeff(k);
    }
    return r;
}

// Compositional inverse: the jet of h^{-1} at h's value. Triangular solve
// against the powers of h - h(0); requires h'(base) != 0.
inline jet invert(const jet& h) {
    const int t = h.order();
    if (t < 1 || std::abs(h.coeff(1)) == 0.0)
        throw std::invalid_argument("jet invert: first coefficient vanishes");
    jet ht(h.base(), t);
    for (int k = 1; k <= t; ++k) ht.coeff(k) = h.coeff(k);

    std::vector<jet> powers;
    powers.reserve(std::size_t(t) + 1);
    powers.push_back(ht);
    for (int k = 2; k <= t; ++k) powers.push_back(powers.back() * ht);

    jet g(h.value(), t);
    g.coeff(0) = h.base();
    for (int n = 1; n <= t; ++n) {
        cd rhs = (n == 1) ? cd(1, 0) : cd(0, 0);
        for (int k = 1; k < n; ++k) rhs -= g.coeff(k) * powers[std::size_t(k - 1)].coeff(n);
        g.coeff(n) = rhs / powers[std::size_t(n - 1)].coeff(n);
    }
    return g;
}

inline jet reciprocal(const jet& h) {
    if (std::abs(h.value()) == 0.0) throw std::invalid_argument("jet reciprocal: value is zero");
    const int t = h.order();
    jet r(h.base(), t);
    cd inv0 = cd(1, 0) / h.coeff(0);
    r.coeff(0) = inv0;
    for (int k = 1; k <= t; ++k) {
        cd acc(0, 0);
        for (int j = 1; j <= k; ++j) acc += h.coeff(j) * r.coeff(k - j);
        r.coeff(k) = -acc * inv0;
    }
    return r;
}

// Principal-branch log of a jet with nonzero value.
inline jet jet_log(const jet& h) {
    if (std::abs(h.value()) == 0.0) throw std::invalid_argument("jet log: value is zero");
    const int t = h.order();
    jet r(h.base(), t);
    r.coeff(0) = std::log(h.value());
    if (t == 0) return r;
    jet rec = reciprocal(h);
    // (log h)' = h'/h, integrated coefficientwise
    std::vector<cd> q(std::size_t(t), cd{});
    for (int k = 0; k < t; ++k) {
        cd acc(0, 0);
        for (int j = 0; j <= k; ++j) acc += double(j + 1) * h.coeff(j + 1) * rec.coeff(k - j);
        q[std::size_t(k)] = acc;
    }
    for (int k = 1; k <= t; ++k) r.coeff(k) = q[std::size_t(k - 1)] / double(k);
    return r;
}

// ---------------------------------------------------------------------------
// Log-scaled jets. Iterated polynomials reach values like exp(g * d^n) which
// overflow doubles long before the quantities of interest (log-moduli of
// derivatives) become large. A scaled jet keeps coefficients normalized to
// max modulus 1 and carries the common log-magnitude separately.

struct scaled_jet {
    std::vector<cd> c;       // normalized coefficients, max |c_k| == 1 (or all zero)
    double log_scale = 0.0;  // true coefficient k = c[k] * exp(log_scale)

    int order() const { return int(c.size()) - 1; }
};

namespace detail {

inline void mul_trunc(const std::vector<cd>& a, const std::vector<cd>& b, std::vector<cd>& out) {
    const int t = int(a.size()) - 1;
    out.assign(a.size(), cd{});
    for (int i = 0; i <= t; ++i) {
        if (a[std::size_t(i)] == cd{}) continue;
        for (int j = 0; i + j <= t; ++j)
            out[std::size_t(i + j)] += a[std::size_t(i)] * b[std::size_t(j)];
    }
}

inline double renormalize(std::vector<cd>& c) {
    double m = 0;
    for (const auto& v : c) m = std::max(m, std::abs(v));
    if (m > 0 && std::isfinite(m)) {
        double inv = 1.0 / m;
        for (auto& v : c) v *= inv;
        return std::log(m);
    }
    return 0.0;  // all-zero jet keeps scale as-is; log-moduli read -inf from log(0)
}

}  // namespace detail

inline scaled_jet scaled_identity(cd z, int order) {
    scaled_jet s;
    s.c.assign(std::size_t(order) + 1, cd{});
    s.c[0] = z;
    if (order >= 1) s.c[1] = cd(1, 0);
    s.log_scale = detail::renormalize(s.c);
    return s;
}

// One dynamical step x <- f(x) in scaled form. Horner with per-step rescaling:
// the accumulator (r, rho) represents exp(rho) * r, and each multiply-add picks
// the new scale max(rho + sigma, 0) so both contributions enter with factors
// <= 1. Terms more than ~700 e-folds below the leading one underflow to zero,
// which is far under double rounding anyway.
inline void scaled_apply_poly(scaled_jet& x, const cpoly& f, std::vector<cd>& r,
                              std::vector<cd>& tmp) {
    const auto& c = f.coeffs();
    if (c.empty()) {
        x.c.assign(x.c.size(), cd{});
        x.log_scale = 0.0;
        return;
    }
    const double sigma = x.log_scale;
    r.assign(x.c.size(), cd{});
    r[0] = c.back();
    double rho = 0.0;
    for (std::size_t k = c.size() - 1; k-- > 0;) {
        detail::mul_trunc(r, x.c, tmp);
        double rho_mul = rho + sigma;
        double rho_new = std::max(rho_mul, 0.0);
        double f_mul = std::exp(rho_mul - rho_new);
        double f_add = std::exp(-rho_new);
        for (std::size_t j = 0; j < r.size(); ++j) r[j] = tmp[j] * f_mul;
        r[0] += c[k] * f_add;
        rho = rho_new + detail::renormalize(r);
    }
    x.c = r;
    x.log_scale = rho;
}

inline scaled_jet scaled_iterate(const cpoly& f, cd z, int n, int t) {
    if (n < 1) throw std::invalid_argument("scaled_iterate: n must be >= 1");
    scaled_jet s = scaled_identity(z, t);
    std::vector<cd> r, tmp;
    for (int k = 0; k < n; ++k) scaled_apply_poly(s, f, r, tmp);
    return s;
}

// log |k-th derivative| of the germ the scaled jet represents; -inf when the
// coefficient is exactly zero.
inline double log_abs_derivative(const scaled_jet& s, int k) {
    return s.log_scale + std::log(std::abs(s.c[std::size_t(k)])) + log_factorial(k);
}

// Ratio of derivatives k1/k2 with the common scale cancelled.
inline cd scaled_derivative_ratio(const scaled_jet& s, int k1, int k2) {
    cd a = s.c[std::size_t(k1)], b = s.c[std::size_t(k2)];
    double f = std::exp(log_factorial(k1) - log_factorial(k2));
    return a / b * f;
}

}  // namespace polydyn

#endif
