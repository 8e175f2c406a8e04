#ifndef POLYDYN_UTIL_HPP
#define POLYDYN_UTIL_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <thread>
#include <vector>

namespace polydyn {

using cd = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr const char* kVersion = "0.1.0";

struct rect_t {
    double x_min = -2.0, x_max = 2.0, y_min = -2.0, y_max = 2.0;
    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    double area() const { return width() * height(); }
    bool contains(cd z) const {
        return z.real() >= x_min && z.real() <= x_max && z.imag() >= y_min && z.imag() <= y_max;
    }
    bool operator==(const rect_t& o) const {
        return x_min == o.x_min && x_max == o.x_max && y_min == o.y_min && y_max == o.y_max;
    }
};

// splitmix64: portable deterministic generator, one independent stream per (seed, index).
struct rng64 {
    std::uint64_t state;
    explicit rng64(std::uint64_t seed) : state(seed) {}
    rng64(std::uint64_t seed, std::uint64_t stream)
        : state(seed ^ (0x9E3779B97F4A7C15ULL * (stream + 1))) {
        next();
        next();
    }
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    // uniform in [0,1)
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    std::uint64_t below(std::uint64_t n) { return n ? next() % n : 0; }
    cd unit_disk() {
        double r = std::sqrt(uniform());
        double th = uniform(0.0, 2.0 * kPi);
        return cd(r * std::cos(th), r * std::sin(th));
    }
    cd box(double half) { return cd(uniform(-half, half), uniform(-half, half)); }
};

inline unsigned worker_count() {
    static const unsigned cached = [] {
        unsigned hw = std::thread::hardware_concurrency();
        return hw == 0 ? 1u : std::min(hw, 8u);
    }();
    return cached;
}

// Static partition; each index writes only its own outputs, so results do not
// depend on the number of workers.
template <class F>
inline void parallel_for(std::size_t n, F&& body, std::size_t grain = 128) {
    unsigned nt = worker_count();
    if (n < grain || nt <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    nt = std::min<std::size_t>(nt, (n + grain - 1) / grain);
    std::vector<std::thread> pool;
    pool.reserve(nt);
    std::size_t chunk = (n + nt - 1) / nt;
    for (unsigned w = 0; w < nt; ++w) {
        std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

struct line_fit {
    double slope = 0.0, intercept = 0.0;
    int points = 0;
};

inline line_fit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    line_fit out;
    out.points = int(std::min(xs.size(), ys.size()));
    if (out.points < 2) return out;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < out.points; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    double n = out.points;
    double denom = n * sxx - sx * sx;
    if (denom == 0) return out;
    out.slope = (n * sxy - sx * sy) / denom;
    out.intercept = (sy - out.slope * sx) / n;
    return out;
}

// Least-squares slope for complex samples y = beta*x + c.
inline cd fit_complex_slope(const std::vector<cd>& xs, const std::vector<cd>& ys) {
    std::size_t n = std::min(xs.size(), ys.size());
    if (n < 2) return cd(0, 0);
    cd mx(0, 0), my(0, 0);
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= double(n);
    my /= double(n);
    cd num(0, 0);
    double den = 0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (ys[i] - my) * std::conj(xs[i] - mx);
        den += std::norm(xs[i] - mx);
    }
    return den > 0 ? num / den : cd(0, 0);
}

inline bool lex_less(cd a, cd b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

inline double log_factorial(int k) { return std::lgamma(double(k) + 1.0); }

inline long long binomial_ll(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// v[k+1] <= max(jitter*v[k], floor) for every step.
inline bool decreasing_with_jitter(const std::vector<double>& v, double jitter = 1.10,
                                   double floor = 0.0) {
    for (std::size_t k = 0; k + 1 < v.size(); ++k)
        if (v[k + 1] > std::max(jitter * v[k], floor)) return false;
    return true;
}

}  // namespace polydyn

#endif
