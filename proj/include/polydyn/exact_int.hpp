#ifndef POLYDYN_EXACT_INT_HPP
#define POLYDYN_EXACT_INT_HPP

#include <string>

#include "errors.hpp"

namespace polydyn {

// 64-bit integers that refuse to wrap. The exact coefficient mode and the
// Bell-polynomial tables both stay far below 2^63 at the supported sizes;
// anything bigger must fail loudly rather than silently corrupt an oracle.
inline long long checked_add(long long a, long long b) {
    long long r;
    if (__builtin_add_overflow(a, b, &r)) throw exact_overflow("integer add overflow");
    return r;
}

inline long long checked_sub(long long a, long long b) {
    long long r;
    if (__builtin_sub_overflow(a, b, &r)) throw exact_overflow("integer sub overflow");
    return r;
}

inline long long checked_mul(long long a, long long b) {
    long long r;
    if (__builtin_mul_overflow(a, b, &r)) throw exact_overflow("integer mul overflow");
    return r;
}

// Gaussian integer a + b*i. Closed under +, -, * so polynomial evaluation,
// differentiation, composition and iteration of Gaussian-integer inputs stay exact.
struct gauss_int {
    long long re = 0;
    long long im = 0;

    gauss_int() = default;
    gauss_int(long long r, long long i = 0) : re(r), im(i) {}

    friend gauss_int operator+(gauss_int a, gauss_int b) {
        return {checked_add(a.re, b.re), checked_add(a.im, b.im)};
    }
    friend gauss_int operator-(gauss_int a, gauss_int b) {
        return {checked_sub(a.re, b.re), checked_sub(a.im, b.im)};
    }
    friend gauss_int operator-(gauss_int a) { return {checked_sub(0, a.re), checked_sub(0, a.im)}; }
    friend gauss_int operator*(gauss_int a, gauss_int b) {
        long long r = checked_sub(checked_mul(a.re, b.re), checked_mul(a.im, b.im));
        long long i = checked_add(checked_mul(a.re, b.im), checked_mul(a.im, b.re));
        return {r, i};
    }
    gauss_int& operator+=(gauss_int o) { return *this = *this + o; }
    gauss_int& operator-=(gauss_int o) { return *this = *this - o; }
    gauss_int& operator*=(gauss_int o) { return *this = *this * o; }
    friend bool operator==(gauss_int a, gauss_int b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(gauss_int a, gauss_int b) { return !(a == b); }

    std::string str() const {
        return "(" + std::to_string(re) + (im >= 0 ? "+" : "") + std::to_string(im) + "i)";
    }
};

}  // namespace polydyn

#endif
