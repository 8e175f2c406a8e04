#ifndef POLYDYN_IO_HPP
#define POLYDYN_IO_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "complex_poly.hpp"
#include "equidist.hpp"
#include "errors.hpp"
#include "linearize.hpp"
#include "potential.hpp"
#include "rootfinder.hpp"

namespace polydyn {

using nlohmann::json;

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// --- polynomials: JSON array of [re, im] pairs, index = power of z ---------

inline cpoly poly_from_json(const json& j) {
    if (!j.is_array()) throw config_error("polynomial: expected a JSON array of [re, im] pairs");
    std::vector<cd> c;
    c.reserve(j.size());
    for (const auto& e : j) {
        if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
            c.emplace_back(e[0].get<double>(), e[1].get<double>());
        else if (e.is_number())
            c.emplace_back(e.get<double>(), 0.0);
        else
            throw config_error("polynomial: each coefficient must be [re, im] or a number");
    }
    return cpoly(std::move(c));
}

inline json poly_to_json(const cpoly& p) {
    json j = json::array();
    for (const auto& c : p.coeffs()) j.push_back({c.real(), c.imag()});
    return j;
}

inline cpoly read_poly_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open polynomial file: " + path);
    json j;
    in >> j;
    return poly_from_json(j);
}

inline cpoly parse_poly_text(const std::string& text) {
    return poly_from_json(json::parse(text));
}

// --- grids ------------------------------------------------------------------
// CSV: one header row "x_min,x_max,y_min,y_max,nx,ny", then ny rows of nx
// values; masked cells are written as nan. Binary: values only, little-endian
// 64-bit reals, row-major, with geometry in a .meta.json sidecar.

inline void write_grid_csv(const grid_field& g, std::ostream& out,
                           const std::string& header_comment = "") {
    if (!header_comment.empty()) out << "# " << header_comment << "\n";
    out << fmt_double(g.rect.x_min) << ',' << fmt_double(g.rect.x_max) << ','
        << fmt_double(g.rect.y_min) << ',' << fmt_double(g.rect.y_max) << ',' << g.nx << ','
        << g.ny << "\n";
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            std::size_t k = std::size_t(j) * g.nx + i;
            out << (g.masked(k) ? "nan" : fmt_double(g.values[k]));
            out << (i + 1 < g.nx ? ',' : '\n');
        }
    }
}

inline void write_grid_csv_file(const grid_field& g, const std::string& path,
                                const std::string& header_comment = "") {
    std::ofstream out(path);
    if (!out) throw config_error("cannot write " + path);
    write_grid_csv(g, out, header_comment);
}

inline grid_field read_grid_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open grid file: " + path);
    std::string line;
    do {
        if (!std::getline(in, line)) throw config_error("grid file truncated: " + path);
    } while (!line.empty() && line[0] == '#');
    grid_field g;
    {
        std::istringstream hs(line);
        char comma;
        if (!(hs >> g.rect.x_min >> comma >> g.rect.x_max >> comma >> g.rect.y_min >> comma >>
              g.rect.y_max >> comma >> g.nx >> comma >> g.ny))
            throw config_error("grid header malformed in " + path);
    }
    g.values.reserve(std::size_t(g.nx) * g.ny);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            if (cell == "nan") {
                if (g.mask.empty()) g.mask.assign(std::size_t(g.nx) * g.ny, 0);
                g.mask[g.values.size()] = 1;
                g.values.push_back(0.0);
            } else {
                g.values.push_back(std::stod(cell));
            }
        }
    }
    if ((int)g.values.size() != g.nx * g.ny) throw config_error("grid size mismatch in " + path);
    return g;
}

inline void write_grid_binary_file(const grid_field& g, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot write " + path);
    std::vector<double> vals = g.values;
    for (std::size_t k = 0; k < vals.size(); ++k)
        if (g.masked(k)) vals[k] = std::numeric_limits<double>::quiet_NaN();
    out.write(reinterpret_cast<const char*>(vals.data()),
              std::streamsize(vals.size() * sizeof(double)));
    json meta = {{"x_min", g.rect.x_min}, {"x_max", g.rect.x_max}, {"y_min", g.rect.y_min},
                 {"y_max", g.rect.y_max}, {"nx", g.nx},            {"ny", g.ny}};
    std::ofstream ms(path + ".meta.json");
    ms << meta.dump(2) << "\n";
}

// --- point sets ---------------------------------------------------------------

inline void write_measure_csv(const empirical_measure& mu, std::ostream& out,
                              const std::string& header_comment = "") {
    if (!header_comment.empty()) out << "# " << header_comment << "\n";
    out << "re,im,weight\n";
    for (std::size_t i = 0; i < mu.points.size(); ++i)
        out << fmt_double(mu.points[i].real()) << ',' << fmt_double(mu.points[i].imag()) << ','
            << fmt_double(mu.weights[i]) << "\n";
}

inline void write_measure_csv_file(const empirical_measure& mu, const std::string& path,
                                   const std::string& header_comment = "") {
    std::ofstream out(path);
    if (!out) throw config_error("cannot write " + path);
    write_measure_csv(mu, out, header_comment);
}

inline void write_roots_csv(const root_cloud& cloud, std::ostream& out,
                            const std::string& header_comment = "") {
    if (!header_comment.empty()) out << "# " << header_comment << "\n";
    out << "re,im,residual\n";
    for (std::size_t i = 0; i < cloud.points.size(); ++i)
        out << fmt_double(cloud.points[i].real()) << ',' << fmt_double(cloud.points[i].imag())
            << ',' << fmt_double(cloud.residuals[i]) << "\n";
}

inline std::vector<cd> read_points_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open points file: " + path);
    std::vector<cd> pts;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (line.find("re") == 0) continue;  // column header
        std::istringstream ls(line);
        double re, im = 0;
        char comma;
        if (ls >> re) {
            if (ls >> comma >> im) {
            }
            pts.emplace_back(re, im);
        }
    }
    return pts;
}

// --- reports ------------------------------------------------------------------

inline json exceptional_to_json(const exceptional_report& e) {
    json j;
    j["has_finite_exceptional"] = e.has_finite_exceptional;
    if (e.has_finite_exceptional) {
        j["b"] = {e.b.real(), e.b.imag()};
        j["A"] = {e.A.real(), e.A.imag()};
    }
    return j;
}

inline json convergence_to_json(const convergence_report& r) {
    json j;
    j["f"] = r.f_descriptor;
    j["m"] = r.m;
    j["n_list"] = r.n_list;
    j["l1_norms"] = r.l1_norms;
    j["bl_distances"] = r.bl_distances;
    j["exceptional"] = exceptional_to_json(r.exceptional);
    j["verdict"] = verdict_name(r.verdict);
    return j;
}

inline json rate_report_to_json(const rate_report& r) {
    json errs = json::array();
    for (const auto& [n, e] : r.errors) errs.push_back({n, e});
    json j;
    j["t"] = r.t;
    j["errors"] = errs;
    j["fitted_slope"] = r.fitted_slope;
    j["expected_slope"] = r.expected_slope;
    j["fit_points"] = r.fit_points;
    return j;
}

inline json bell_table_to_json(const bell_table& t) {
    json entries = json::array();
    for (int s = 0; s <= t.s_max; ++s) {
        for (int u = 0; u <= s; ++u) {
            json terms = json::array();
            for (const auto& [e, c] : t.entry(s, u).terms)
                terms.push_back({{"exponents", e}, {"coeff", c}});
            entries.push_back({{"s", s}, {"u", u}, {"terms", terms}});
        }
    }
    return json{{"s_max", t.s_max}, {"entries", entries}};
}

inline json multiset_report_to_json(const multiset_match_report& r) {
    return json{{"n", r.n},
                {"expected_count", r.expected_count},
                {"lhs_count", r.lhs_count},
                {"count_identity_ok", r.count_identity_ok},
                {"max_match_distance", r.max_match_distance},
                {"pass", r.pass}};
}

}  // namespace polydyn

#endif
