#ifndef POLYDYN_COMPLEX_POLY_HPP
#define POLYDYN_COMPLEX_POLY_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "exact_int.hpp"
#include "util.hpp"

namespace polydyn {

inline constexpr std::size_t kDefaultDegreeCap = std::size_t(1) << 16;

template <class T>
struct coeff_traits {
    static bool is_zero(const T& v) { return v == T{}; }
    static T mul_int(const T& v, long long k) { return v * double(k); }
};

template <>
struct coeff_traits<gauss_int> {
    static bool is_zero(const gauss_int& v) { return v == gauss_int{}; }
    static gauss_int mul_int(const gauss_int& v, long long k) { return v * gauss_int{k, 0}; }
};

// Dense univariate polynomial, ascending powers. Trailing exact zeros are
// trimmed so the leading coefficient is nonzero unless the polynomial is
// identically zero (degree() == -1 in that case).
template <class T>
class basic_poly {
  public:
    basic_poly() = default;
    explicit basic_poly(std::vector<T> coeffs) : c_(std::move(coeffs)) { trim(); }
    basic_poly(std::initializer_list<T> coeffs) : c_(coeffs) { trim(); }

    static basic_poly monomial(T coeff, int power) {
        std::vector<T> v(std::size_t(power) + 1, T{});
        v[std::size_t(power)] = coeff;
        return basic_poly(std::move(v));
    }

    int degree() const { return int(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    const std::vector<T>& coeffs() const { return c_; }

    T operator[](std::size_t k) const { return k < c_.size() ? c_[k] : T{}; }
    T leading() const { return c_.empty() ? T{} : c_.back(); }

    void set_coeff(std::size_t k, const T& v) {
        if (k >= c_.size()) c_.resize(k + 1, T{});
        c_[k] = v;
        trim();
    }

    // Horner evaluation; for floating coefficients non-finite results propagate.
    T operator()(const T& z) const {
        if (c_.empty()) return T{};
        T r = c_.back();
        for (std::size_t k = c_.size() - 1; k-- > 0;) r = r * z + c_[k];
        return r;
    }

    friend basic_poly operator+(const basic_poly& a, const basic_poly& b) {
        std::vector<T> v(std::max(a.c_.size(), b.c_.size()), T{});
        for (std::size_t k = 0; k < v.size(); ++k) v[k] = a[k] + b[k];
        return basic_poly(std::move(v));
    }
    friend basic_poly operator-(const basic_poly& a, const basic_poly& b) {
        std::vector<T> v(std::max(a.c_.size(), b.c_.size()), T{});
        for (std::size_t k = 0; k < v.size(); ++k) v[k] = a[k] - b[k];
        return basic_poly(std::move(v));
    }

    friend basic_poly operator*(const basic_poly& a, const basic_poly& b) {
        if (a.is_zero() || b.is_zero()) return basic_poly();
        std::vector<T> v(a.c_.size() + b.c_.size() - 1, T{});
        // sparse factors (monomials from pure powers) are common under iteration
        std::size_t nnz_a = a.nonzero_count(), nnz_b = b.nonzero_count();
        if (std::min(nnz_a, nnz_b) <= 2) {
            const basic_poly& s = nnz_a <= nnz_b ? a : b;
            const basic_poly& t = nnz_a <= nnz_b ? b : a;
            for (std::size_t i = 0; i < s.c_.size(); ++i) {
                if (coeff_traits<T>::is_zero(s.c_[i])) continue;
                for (std::size_t j = 0; j < t.c_.size(); ++j) v[i + j] += s.c_[i] * t.c_[j];
            }
        } else {
            for (std::size_t i = 0; i < a.c_.size(); ++i) {
                if (coeff_traits<T>::is_zero(a.c_[i])) continue;
                for (std::size_t j = 0; j < b.c_.size(); ++j) v[i + j] += a.c_[i] * b.c_[j];
            }
        }
        return basic_poly(std::move(v));
    }

    friend basic_poly operator*(const T& s, const basic_poly& a) {
        std::vector<T> v = a.c_;
        for (auto& x : v) x = s * x;
        return basic_poly(std::move(v));
    }

    friend bool operator==(const basic_poly& a, const basic_poly& b) { return a.c_ == b.c_; }

  private:
    std::vector<T> c_;

    std::size_t nonzero_count() const {
        std::size_t n = 0;
        for (const auto& x : c_)
            if (!coeff_traits<T>::is_zero(x)) ++n;
        return n;
    }

    void trim() {
        while (!c_.empty() && coeff_traits<T>::is_zero(c_.back())) c_.pop_back();
    }
};

using cpoly = basic_poly<cd>;
using gpoly = basic_poly<gauss_int>;  // exact Gaussian-integer mode

// m-th formal derivative; returns the zero polynomial when m exceeds the degree.
template <class T>
basic_poly<T> derivative(const basic_poly<T>& p, int m = 1) {
    if (m < 1) throw std::invalid_argument("derivative: m must be >= 1");
    std::vector<T> cur(p.coeffs());
    for (int pass = 0; pass < m; ++pass) {
        if (cur.size() <= 1) return basic_poly<T>();
        std::vector<T> next(cur.size() - 1);
        for (std::size_t k = 1; k < cur.size(); ++k)
            next[k - 1] = coeff_traits<T>::mul_int(cur[k], (long long)k);
        cur = std::move(next);
    }
    return basic_poly<T>(std::move(cur));
}

template <class T>
basic_poly<T> compose(const basic_poly<T>& p, const basic_poly<T>& q,
                      std::size_t degree_cap = kDefaultDegreeCap) {
    if (p.is_zero()) return basic_poly<T>();
    if (p.degree() == 0) return p;
    if (p.degree() >= 1 && q.degree() >= 1) {
        if (std::size_t(p.degree()) * std::size_t(q.degree()) > degree_cap)
            throw degree_cap_error("compose: degree " + std::to_string(p.degree()) + "*" +
                                   std::to_string(q.degree()) + " exceeds cap " +
                                   std::to_string(degree_cap));
    }
    const auto& c = p.coeffs();
    basic_poly<T> r({c.back()});
    for (std::size_t k = c.size() - 1; k-- > 0;) {
        r = r * q;
        r = r + basic_poly<T>({c[k]});
    }
    return r;
}

template <class T>
basic_poly<T> iterate(const basic_poly<T>& f, int n, std::size_t degree_cap = kDefaultDegreeCap) {
    if (n < 1) throw std::invalid_argument("iterate: n must be >= 1");
    if (f.degree() >= 2) {
        double dn = std::pow(double(f.degree()), double(n));
        if (dn > double(degree_cap))
            throw degree_cap_error("iterate: degree d^n = " + std::to_string(dn) +
                                   " exceeds cap " + std::to_string(degree_cap));
    }
    basic_poly<T> g = f;
    for (int k = 1; k < n; ++k) g = compose(f, g, degree_cap);
    return g;
}

struct exceptional_report {
    bool has_finite_exceptional = false;
    cd b{0.0, 0.0};
    cd A{0.0, 0.0};
};

// log |p(z)| without overflow: outside the unit disk evaluate the reversed
// polynomial at 1/z, since p(z) = z^d * rev(p)(1/z).
inline double log_abs_eval(const cpoly& p, cd z) {
    if (p.is_zero()) return -std::numeric_limits<double>::infinity();
    const auto& c = p.coeffs();
    if (std::abs(z) <= 1.0) return std::log(std::abs(p(z)));
    cd u = cd(1, 0) / z;
    cd q = c.front();
    for (std::size_t k = 1; k < c.size(); ++k) q = q * u + c[k];
    return double(p.degree()) * std::log(std::abs(z)) + std::log(std::abs(q));
}

inline double max_coeff_abs(const cpoly& p) {
    double m = 0;
    for (const auto& c : p.coeffs()) m = std::max(m, std::abs(c));
    return m;
}

// A finite exceptional point exists iff f(z) = A(z-b)^d + b. Candidate b is the
// mean of the roots of f' (Vieta, no root solve needed); the decision compares
// the coefficients of f against the expanded model polynomial.
inline exceptional_report detect_exceptional(const cpoly& f, double eps_exc = -1.0) {
    int d = f.degree();
    if (d < 2) throw std::invalid_argument("detect_exceptional: degree must be >= 2");
    double scale = 1.0 + max_coeff_abs(f);
    double eps = eps_exc > 0 ? eps_exc : 1e-8 * scale;

    cpoly fp = derivative(f);
    cd lead_fp = fp[std::size_t(d - 1)];
    cd b = (d >= 2) ? -fp[std::size_t(d - 2)] / (lead_fp * double(d - 1)) : cd(0, 0);
    cd A = f.leading();

    exceptional_report rep;
    if (std::abs(f(b) - b) > eps) return rep;

    cpoly model = cpoly::monomial(cd(1, 0), 0);
    cpoly shift({-b, cd(1, 0)});
    for (int k = 0; k < d; ++k) model = model * shift;
    model = A * model;
    model = model + cpoly({b});
    cpoly diff = f - model;
    for (const auto& c : diff.coeffs())
        if (std::abs(c) > eps) return rep;

    rep.has_finite_exceptional = true;
    rep.b = b;
    rep.A = A;
    return rep;
}

}  // namespace polydyn

#endif
