#ifndef POLYDYN_POTENTIAL_HPP
#define POLYDYN_POTENTIAL_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <vector>

#include "complex_poly.hpp"
#include "jet.hpp"
#include "rootfinder.hpp"
#include "util.hpp"

namespace polydyn {

// Scalar samples on a rectangular lattice, row-major (row = y index). An
// optional mask excludes cells from norms.
struct grid_field {
    rect_t rect;
    int nx = 0, ny = 0;
    std::vector<double> values;
    std::vector<std::uint8_t> mask;  // empty or nx*ny, 1 = excluded

    double cell_w() const { return rect.width() / nx; }
    double cell_h() const { return rect.height() / ny; }
    double cell_area() const { return cell_w() * cell_h(); }
    cd center(int i, int j) const {
        return cd(rect.x_min + (i + 0.5) * cell_w(), rect.y_min + (j + 0.5) * cell_h());
    }
    double& at(int i, int j) { return values[std::size_t(j) * nx + i]; }
    double at(int i, int j) const { return values[std::size_t(j) * nx + i]; }
    bool masked(std::size_t k) const { return !mask.empty() && mask[k] != 0; }
    bool same_geometry(const grid_field& o) const {
        return nx == o.nx && ny == o.ny && rect == o.rect;
    }
};

inline grid_field make_grid(rect_t rect, int nx, int ny) {
    if (nx < 1 || ny < 1 || rect.width() <= 0 || rect.height() <= 0)
        throw std::invalid_argument("make_grid: degenerate rectangle or sizes");
    grid_field g;
    g.rect = rect;
    g.nx = nx;
    g.ny = ny;
    g.values.assign(std::size_t(nx) * ny, 0.0);
    return g;
}

// Weighted finite point set; weights must sum to 1.
struct empirical_measure {
    std::vector<cd> points;
    std::vector<double> weights;

    empirical_measure() = default;
    empirical_measure(std::vector<cd> pts, std::vector<double> w)
        : points(std::move(pts)), weights(std::move(w)) {
        validate();
    }
    static empirical_measure uniform(std::vector<cd> pts) {
        empirical_measure m;
        m.points = std::move(pts);
        m.weights.assign(m.points.size(), 1.0 / double(m.points.size()));
        return m;
    }
    void validate() const {
        if (points.size() != weights.size())
            throw std::invalid_argument("empirical_measure: size mismatch");
        double s = 0;
        for (double w : weights) {
            if (!(w > 0)) throw std::invalid_argument("empirical_measure: weights must be positive");
            s += w;
        }
        if (std::abs(s - 1.0) > 1e-12)
            throw std::invalid_argument("empirical_measure: weights must sum to 1");
    }
};

// Escape-rate Green function: log max{1,|f^n(z)|}/d^n, short-circuited once the
// orbit clears a large radius, after which the remaining tail is the exact
// leading-term sum log|c_d| * (1/d + 1/d^2 + ...) up to O(1/|w|).
inline double green_escape(const cpoly& f, cd z, int n_esc) {
    if (n_esc < 1) throw std::invalid_argument("green_escape: n_esc must be >= 1");
    const int d = f.degree();
    if (d < 2) throw std::invalid_argument("green_escape: degree must be >= 2");
    const double robin = std::log(std::abs(f.leading())) / double(d - 1);
    const double W = std::max(2.0 * escape_radius(f), std::min(1e9, std::exp(600.0 / d)));
    cd w = z;
    double dn = 1.0;
    for (int k = 0; k < n_esc; ++k) {
        double aw = std::abs(w);
        if (!std::isfinite(aw)) return std::numeric_limits<double>::quiet_NaN();
        if (aw > W) return (std::log(aw) + robin) / dn;
        w = f(w);
        dn *= double(d);
    }
    double aw = std::abs(w);
    if (!std::isfinite(aw)) return std::numeric_limits<double>::quiet_NaN();
    if (aw > W) return (std::log(aw) + robin) / dn;
    return std::log(std::max(1.0, aw)) / dn;
}

inline grid_field green_grid(const cpoly& f, rect_t rect, int nx, int ny, int n_esc = 30) {
    grid_field g = make_grid(rect, nx, ny);
    parallel_for(std::size_t(nx) * ny, [&](std::size_t k) {
        int i = int(k % std::size_t(nx)), j = int(k / std::size_t(nx));
        g.values[k] = green_escape(f, g.center(i, j), n_esc);
    });
    return g;
}

// Random backward orbits: from a, pick one of the d preimages uniformly at
// random, depth times, one independent walk per output point. Unbiased sample
// of the balanced pullback measure.
inline empirical_measure brolin_sample(const cpoly& f, cd a, int depth, int count,
                                       std::uint64_t seed) {
    if (depth < 1 || count < 1) throw std::invalid_argument("brolin_sample: depth, count >= 1");
    const int d = f.degree();
    if (d < 2) throw std::invalid_argument("brolin_sample: degree must be >= 2");
    std::vector<cd> pts((std::size_t)count);
    std::vector<std::uint8_t> failed(std::size_t(count), 0);
    parallel_for(std::size_t(count), [&](std::size_t w) {
        rng64 rng(seed, w);
        cd cur = a;
        for (int k = 0; k < depth; ++k) {
            cpoly shifted = f - cpoly({cur});
            root_cloud pre = find_roots(shifted, 1e-11, 300);
            if (!pre.converged || int(pre.points.size()) != d) {
                failed[w] = 1;
                return;
            }
            cur = pre.points[rng.below(std::uint64_t(d))];
        }
        pts[w] = cur;
    }, 8);
    for (std::size_t w = 0; w < pts.size(); ++w)
        if (failed[w]) throw preimage_error("brolin_sample: preimage solve failed certification");
    return empirical_measure::uniform(std::move(pts));
}

inline double cloud_potential_at(const empirical_measure& mu, cd z) {
    double s = 0;
    for (std::size_t i = 0; i < mu.points.size(); ++i)
        s += mu.weights[i] * std::log(std::abs(z - mu.points[i]));
    return s;
}

// Logarithmic potential of a point cloud on a grid. Cells within one cell
// diagonal of a support point are masked: a single sample there misrepresents
// the cell average of the (integrable) singularity.
inline grid_field cloud_potential(const empirical_measure& mu, rect_t rect, int nx, int ny) {
    grid_field g = make_grid(rect, nx, ny);
    g.mask.assign(g.values.size(), 0);
    const double eps_sing = std::hypot(g.cell_w(), g.cell_h());
    parallel_for(g.values.size(), [&](std::size_t k) {
        int i = int(k % std::size_t(nx)), j = int(k / std::size_t(nx));
        cd z = g.center(i, j);
        double s = 0;
        double dmin = std::numeric_limits<double>::infinity();
        for (std::size_t q = 0; q < mu.points.size(); ++q) {
            double dist = std::abs(z - mu.points[q]);
            dmin = std::min(dmin, dist);
            s += mu.weights[q] * std::log(dist);
        }
        g.values[k] = s;
        if (dmin < eps_sing || !std::isfinite(s)) g.mask[k] = 1;
    });
    return g;
}

inline double l1_distance(const grid_field& u, const grid_field& v) {
    if (!u.same_geometry(v)) throw grid_mismatch("l1_distance: grid geometry differs");
    double s = 0;
    for (std::size_t k = 0; k < u.values.size(); ++k) {
        if (u.masked(k) || v.masked(k)) continue;
        s += std::abs(u.values[k] - v.values[k]);
    }
    return s * u.cell_area();
}

// log |(f^n)^(m)(z)| / (d^n - m) on cell centers via log-scaled jets of order m.
// Cells whose log-modulus is not finite (zeros of the derivative) are masked.
inline grid_field normalized_logmod_grid(const cpoly& f, int n, int m, rect_t rect, int nx,
                                         int ny) {
    const int d = f.degree();
    if (d < 2) throw std::invalid_argument("normalized_logmod_grid: degree must be >= 2");
    if (n < 1 || m < 1) throw std::invalid_argument("normalized_logmod_grid: n, m >= 1");
    const double norm = std::pow(double(d), double(n)) - double(m);
    if (norm <= 0) throw std::invalid_argument("normalized_logmod_grid: need m < d^n");
    grid_field g = make_grid(rect, nx, ny);
    g.mask.assign(g.values.size(), 0);
    parallel_for(g.values.size(), [&](std::size_t k) {
        int i = int(k % std::size_t(nx)), j = int(k / std::size_t(nx));
        scaled_jet s = scaled_iterate(f, g.center(i, j), n, m);
        double lm = log_abs_derivative(s, m);
        if (std::isfinite(lm)) {
            g.values[k] = lm / norm;
        } else {
            g.values[k] = 0.0;
            g.mask[k] = 1;
        }
    });
    return g;
}

}  // namespace polydyn

#endif
