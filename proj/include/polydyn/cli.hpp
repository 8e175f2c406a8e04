#ifndef POLYDYN_CLI_HPP
#define POLYDYN_CLI_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "bell.hpp"
#include "equidist.hpp"
#include "io.hpp"
#include "linearize.hpp"
#include "potential.hpp"
#include "rootfinder.hpp"
#include "util.hpp"

namespace polydyn {

struct run_config {
    std::string subcommand;
    std::string config_path;    // --config (consumed before flag parsing)
    std::string poly_path;      // --poly
    std::string coeffs_inline;  // --coeffs (JSON text)
    std::string out_dir;        // --out; empty = stdout only
    std::uint64_t seed = 12345;

    int m = 1;
    int t = 2;
    int period = 1;
    int n = 1;
    std::string n_range;  // "6..11" or "16,32,64"
    std::string rect_text = "-2,2,-2,2";
    std::string grid_text = "256x256";
    int depth = 14;
    int count = 4096;
    int n_esc = 30;
    double tol = 1e-10;
    double verdict_tol = 0.08;
    int max_iter = 260;
    int smax = 8;
    std::string mode = "schroeder";
    std::string points_path;
    std::string z_text = "0,0";
    std::string a_text;  // brolin start; default picked away from E(f)
    std::string format = "csv";
};

inline std::vector<int> parse_n_list(const std::string& text) {
    std::vector<int> out;
    auto dots = text.find("..");
    try {
        if (dots != std::string::npos) {
            int lo = std::stoi(text.substr(0, dots));
            int hi = std::stoi(text.substr(dots + 2));
            if (hi < lo) throw config_error("--n: empty range " + text);
            for (int n = lo; n <= hi; ++n) out.push_back(n);
        } else {
            std::size_t pos = 0;
            while (pos < text.size()) {
                auto comma = text.find(',', pos);
                if (comma == std::string::npos) comma = text.size();
                out.push_back(std::stoi(text.substr(pos, comma - pos)));
                pos = comma + 1;
            }
        }
    } catch (const config_error&) {
        throw;
    } catch (const std::exception&) {
        throw config_error("--n: cannot parse '" + text + "' (use A..B or a comma list)");
    }
    if (out.empty()) throw config_error("--n: empty list");
    return out;
}

inline std::pair<int, int> parse_grid(const std::string& text) {
    auto x = text.find('x');
    if (x == std::string::npos) throw config_error("--grid: expected NXxNY, got " + text);
    try {
        int nx = std::stoi(text.substr(0, x));
        int ny = std::stoi(text.substr(x + 1));
        if (nx < 1 || ny < 1) throw config_error("--grid: sizes must be positive");
        return {nx, ny};
    } catch (const config_error&) {
        throw;
    } catch (const std::exception&) {
        throw config_error("--grid: cannot parse '" + text + "'");
    }
}

inline rect_t parse_rect(const std::string& text) {
    rect_t r;
    std::istringstream ss(text);
    char c;
    if (!(ss >> r.x_min >> c >> r.x_max >> c >> r.y_min >> c >> r.y_max))
        throw config_error("--rect: expected x_min,x_max,y_min,y_max, got " + text);
    if (r.width() <= 0 || r.height() <= 0) throw config_error("--rect: degenerate rectangle");
    return r;
}

inline cd parse_complex(const std::string& text) {
    std::istringstream ss(text);
    double re, im = 0;
    char c;
    if (!(ss >> re)) throw config_error("expected re,im complex value, got " + text);
    if (ss >> c >> im) {
    }
    return cd(re, im);
}

inline cpoly load_poly(const run_config& cfg) {
    if (!cfg.poly_path.empty()) return read_poly_file(cfg.poly_path);
    if (!cfg.coeffs_inline.empty()) return parse_poly_text(cfg.coeffs_inline);
    throw config_error("--poly <file> or --coeffs <json> is required");
}

namespace detail {

inline std::filesystem::path ensure_out_dir(const run_config& cfg) {
    std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write_manifest(const run_config& cfg, const json& extra = {}) {
    if (cfg.out_dir.empty()) return;
    json j;
    j["tool"] = "polydyn";
    j["version"] = kVersion;
    j["command"] = cfg.subcommand;
    j["seed"] = cfg.seed;
    json c;
    c["poly"] = cfg.poly_path;
    c["coeffs"] = cfg.coeffs_inline;
    c["m"] = cfg.m;
    c["t"] = cfg.t;
    c["period"] = cfg.period;
    c["n"] = cfg.n;
    c["n_range"] = cfg.n_range;
    c["rect"] = cfg.rect_text;
    c["grid"] = cfg.grid_text;
    c["depth"] = cfg.depth;
    c["count"] = cfg.count;
    c["n_esc"] = cfg.n_esc;
    c["tol"] = cfg.tol;
    c["verdict_tol"] = cfg.verdict_tol;
    c["max_iter"] = cfg.max_iter;
    c["smax"] = cfg.smax;
    c["mode"] = cfg.mode;
    c["points"] = cfg.points_path;
    c["z"] = cfg.z_text;
    c["a"] = cfg.a_text;
    c["format"] = cfg.format;
    j["config"] = c;
    if (!extra.is_null()) j["result"] = extra;
    std::ofstream out(ensure_out_dir(cfg) / "manifest.json");
    out << j.dump(2) << "\n";
}

inline void emit_text(const run_config& cfg, const std::string& name, const std::string& body) {
    if (cfg.out_dir.empty()) {
        std::cout << body;
    } else {
        std::ofstream out(ensure_out_dir(cfg) / name);
        out << body;
    }
}

inline int cmd_roots(const run_config& cfg) {
    cpoly p = load_poly(cfg);
    root_cloud cloud = find_roots(p, cfg.tol, cfg.max_iter);
    std::ostringstream body;
    write_roots_csv(cloud, body,
                    "polydyn roots, converged=" + std::string(cloud.converged ? "1" : "0"));
    emit_text(cfg, "roots.csv", body.str());
    write_manifest(cfg, json{{"converged", cloud.converged}, {"count", cloud.points.size()}});
    return cloud.converged ? 0 : 1;
}

inline int cmd_jet_eval(const run_config& cfg) {
    cpoly p = load_poly(cfg);
    cd z = parse_complex(cfg.z_text);
    jet j = iterate_jet(p, z, cfg.n, cfg.t);
    json out;
    out["value"] = {j.value().real(), j.value().imag()};
    json ders = json::array();
    for (int k = 1; k <= cfg.t; ++k) {
        cd dk = j.deriv(k);
        ders.push_back({dk.real(), dk.imag()});
    }
    out["derivatives"] = ders;
    emit_text(cfg, "jet.json", out.dump(2) + "\n");
    write_manifest(cfg, out);
    return 0;
}

inline int cmd_green(const run_config& cfg) {
    cpoly f = load_poly(cfg);
    auto [nx, ny] = parse_grid(cfg.grid_text);
    grid_field g = green_grid(f, parse_rect(cfg.rect_text), nx, ny, cfg.n_esc);
    if (cfg.format == "bin" && !cfg.out_dir.empty()) {
        write_grid_binary_file(g, (ensure_out_dir(cfg) / "green.bin").string());
    } else {
        std::ostringstream body;
        write_grid_csv(g, body, "polydyn green, n_esc=" + std::to_string(cfg.n_esc));
        emit_text(cfg, "green.csv", body.str());
    }
    write_manifest(cfg);
    return 0;
}

inline int cmd_brolin(const run_config& cfg) {
    cpoly f = load_poly(cfg);
    exceptional_report exc = detect_exceptional(f);
    cd a = cfg.a_text.empty() ? cd(2.0, 0.5) : parse_complex(cfg.a_text);
    if (exc.has_finite_exceptional && std::abs(a - exc.b) < 1e-9)
        throw config_error("brolin: start point coincides with the finite exceptional point");
    empirical_measure mu = brolin_sample(f, a, cfg.depth, cfg.count, cfg.seed);
    std::ostringstream body;
    write_measure_csv(mu, body, "polydyn brolin, seed=" + std::to_string(cfg.seed) +
                                     ", depth=" + std::to_string(cfg.depth));
    emit_text(cfg, "brolin.csv", body.str());
    write_manifest(cfg);
    return 0;
}

inline int cmd_potential_l1(const run_config& cfg) {
    cpoly f = load_poly(cfg);
    auto [nx, ny] = parse_grid(cfg.grid_text);
    rect_t rect = parse_rect(cfg.rect_text);
    std::vector<int> ns = parse_n_list(cfg.n_range.empty() ? std::to_string(cfg.n) : cfg.n_range);
    grid_field green = green_grid(f, rect, nx, ny, cfg.n_esc);
    json rows = json::array();
    for (int n : ns) {
        grid_field u = normalized_logmod_grid(f, n, cfg.m, rect, nx, ny);
        rows.push_back({{"n", n}, {"l1", l1_distance(u, green)}});
    }
    json out = {{"m", cfg.m}, {"l1_norms", rows}};
    emit_text(cfg, "potential_l1.json", out.dump(2) + "\n");
    write_manifest(cfg, out);
    return 0;
}

inline int cmd_bell_table(const run_config& cfg) {
    bell_table t = build_bell_table(cfg.smax);
    std::ostringstream human;
    for (int s = 0; s <= t.s_max; ++s) {
        for (int u = 0; u <= s; ++u) {
            human << "A[" << s << "," << u << "] =";
            const auto& terms = t.entry(s, u).terms;
            if (terms.empty()) human << " 0";
            for (const auto& [e, c] : terms) {
                human << (c >= 0 ? " +" : " ") << c;
                for (std::size_t q = 0; q < e.size(); ++q) {
                    if (e[q] == 0) continue;
                    human << " X" << q;
                    if (e[q] > 1) human << "^" << e[q];
                }
            }
            human << "\n";
        }
    }
    std::cout << human.str();
    if (!cfg.out_dir.empty()) {
        std::ofstream out(ensure_out_dir(cfg) / "bell_table.json");
        out << bell_table_to_json(t).dump(2) << "\n";
    }
    write_manifest(cfg);
    return 0;
}

inline int cmd_linearize(const run_config& cfg) {
    cpoly f = load_poly(cfg);
    std::vector<cycle_data> cycles = find_cycle(f, cfg.period);
    const bool want_parabolic = cfg.mode == "abel";
    std::optional<cycle_data> chosen;
    for (const auto& c : cycles) {
        if (want_parabolic && c.kind == cycle_kind::parabolic) chosen = c;
        if (!want_parabolic && c.kind == cycle_kind::attracting) chosen = c;
        if (chosen) break;
    }
    if (!chosen)
        throw config_error("linearize: no " + cfg.mode + "-compatible cycle of period " +
                           std::to_string(cfg.period));
    std::vector<cd> pts;
    if (!cfg.points_path.empty()) pts = read_points_csv_file(cfg.points_path);
    if (pts.empty()) throw config_error("linearize: --points file with test points is required");
    std::vector<int> ns = parse_n_list(cfg.n_range.empty() ? "5..40" : cfg.n_range);
    rate_report rep = derivative_ratio_rates(f, *chosen, cfg.t, pts, ns);
    json out = rate_report_to_json(rep);
    out["cycle"] = {{"point", {chosen->point.real(), chosen->point.imag()}},
                    {"period", chosen->period},
                    {"multiplier", {chosen->multiplier.real(), chosen->multiplier.imag()}}};
    emit_text(cfg, "rate_report.json", out.dump(2) + "\n");
    write_manifest(cfg, out);
    return 0;
}

inline int cmd_verify_a(const run_config& cfg) {
    cpoly f = load_poly(cfg);
    auto [nx, ny] = parse_grid(cfg.grid_text);
    rect_t rect = parse_rect(cfg.rect_text);
    std::vector<int> ns = parse_n_list(cfg.n_range.empty() ? "4..8" : cfg.n_range);

    exceptional_report exc = detect_exceptional(f);
    cd a = cfg.a_text.empty() ? cd(2.0, 0.5) : parse_complex(cfg.a_text);
    if (exc.has_finite_exceptional && std::abs(a - exc.b) < 1e-6) a += cd(1.0, 0.75);

    double dmax = std::pow(double(f.degree()), double(ns.back()));
    int count = std::max(cfg.count, int(std::min(65536.0, dmax)));
    empirical_measure mu_ref = brolin_sample(f, a, cfg.depth, count, cfg.seed);

    equidist_options opts;
    opts.n_esc = cfg.n_esc;
    opts.root_tol = cfg.tol;
    convergence_report rep =
        equidistribution_run(f, cfg.m, ns, mu_ref, rect, nx, ny, cfg.verdict_tol, opts);

    json out = convergence_to_json(rep);
    out["seed"] = cfg.seed;
    emit_text(cfg, "verify_a.json", out.dump(2) + "\n");
    if (!cfg.out_dir.empty()) {
        // per-n zero clouds for external plotting
        for (int n : ns) {
            root_cloud cloud = roots_of_iterated_derivative(f, n, cfg.m, cfg.tol);
            char name[64];
            std::snprintf(name, sizeof name, "cloud_n%02d.csv", n);
            std::ofstream cs(ensure_out_dir(cfg) / name);
            write_roots_csv(cloud, cs, "seed=" + std::to_string(cfg.seed));
        }
        write_measure_csv_file(mu_ref, (ensure_out_dir(cfg) / "mu_ref.csv").string(),
                               "seed=" + std::to_string(cfg.seed));
    }
    write_manifest(cfg, out);
    bool expected = rep.verdict == (exc.has_finite_exceptional
                                        ? verdict_t::counterexample_expected
                                        : verdict_t::converging);
    return expected ? 0 : 1;
}

inline int cmd_m1_check(const run_config& cfg) {
    cpoly f = load_poly(cfg);
    multiset_match_report rep = first_derivative_multiset_check(f, cfg.n, std::max(cfg.tol, 1e-6));
    json out = multiset_report_to_json(rep);
    emit_text(cfg, "m1_check.json", out.dump(2) + "\n");
    write_manifest(cfg, out);
    return rep.pass ? 0 : 1;
}

}  // namespace detail

// Route a validated config to its subcommand. Throws config_error for
// malformed inputs; returns a nonzero exit code for failed verdicts.
inline int dispatch(const run_config& cfg) {
    if (cfg.subcommand == "roots") return detail::cmd_roots(cfg);
    if (cfg.subcommand == "jet-eval") return detail::cmd_jet_eval(cfg);
    if (cfg.subcommand == "green") return detail::cmd_green(cfg);
    if (cfg.subcommand == "brolin") return detail::cmd_brolin(cfg);
    if (cfg.subcommand == "potential-l1") return detail::cmd_potential_l1(cfg);
    if (cfg.subcommand == "bell-table") return detail::cmd_bell_table(cfg);
    if (cfg.subcommand == "linearize") return detail::cmd_linearize(cfg);
    if (cfg.subcommand == "verify-a") return detail::cmd_verify_a(cfg);
    if (cfg.subcommand == "m1-check") return detail::cmd_m1_check(cfg);
    throw config_error("unknown subcommand: " + cfg.subcommand);
}

}  // namespace polydyn

#endif
