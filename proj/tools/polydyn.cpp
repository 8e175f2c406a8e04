// polydyn command-line front end: subcommand dispatch over the library.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "polydyn/polydyn.hpp"

using polydyn::run_config;

namespace {

// Flat JSON config mirroring the flags; explicitly passed flags win.
void preload_config(int argc, char** argv, run_config& cfg) {
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) != "--config") continue;
        std::ifstream in(argv[i + 1]);
        if (!in) throw polydyn::config_error(std::string("cannot open config file: ") + argv[i + 1]);
        nlohmann::json j;
        in >> j;
        auto str = [&](const char* key, std::string& slot) {
            if (!j.contains(key)) return;
            if (!j[key].is_string())
                throw polydyn::config_error(std::string("config field '") + key + "' must be a string");
            slot = j[key].get<std::string>();
        };
        auto num = [&](const char* key, auto& slot) {
            if (!j.contains(key)) return;
            if (!j[key].is_number())
                throw polydyn::config_error(std::string("config field '") + key + "' must be a number");
            slot = j[key].get<std::decay_t<decltype(slot)>>();
        };
        str("poly", cfg.poly_path);
        str("coeffs", cfg.coeffs_inline);
        str("out", cfg.out_dir);
        str("rect", cfg.rect_text);
        str("grid", cfg.grid_text);
        str("mode", cfg.mode);
        str("points", cfg.points_path);
        str("z", cfg.z_text);
        str("a", cfg.a_text);
        str("format", cfg.format);
        // "n" mirrors the --n flag: a range string for the sweep subcommands,
        // a plain count elsewhere
        if (j.contains("n")) {
            if (j["n"].is_string()) {
                cfg.n_range = j["n"].get<std::string>();
            } else if (j["n"].is_number()) {
                cfg.n = j["n"].get<int>();
                cfg.n_range = std::to_string(cfg.n);
            } else {
                throw polydyn::config_error("config field 'n' must be a number or range string");
            }
        }
        str("n_range", cfg.n_range);
        num("seed", cfg.seed);
        num("m", cfg.m);
        num("t", cfg.t);
        num("period", cfg.period);
        num("depth", cfg.depth);
        num("count", cfg.count);
        num("n_esc", cfg.n_esc);
        num("tol", cfg.tol);
        num("verdict_tol", cfg.verdict_tol);
        num("max_iter", cfg.max_iter);
        num("smax", cfg.smax);
    }
}

void add_common(CLI::App* sub, run_config& cfg) {
    sub->add_option("--poly", cfg.poly_path, "polynomial file: JSON array of [re,im], index = power");
    sub->add_option("--coeffs", cfg.coeffs_inline, "inline polynomial JSON");
    sub->add_option("--out", cfg.out_dir, "output directory (manifest.json + artifacts)");
    sub->add_option("--seed", cfg.seed, "seed for stochastic subcommands");
    sub->add_option("--config", cfg.config_path, "flat JSON config file; flags override it");
}

}  // namespace

int main(int argc, char** argv) {
    run_config cfg;
    try {
        preload_config(argc, argv, cfg);
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "config error: %s\n", ex.what());
        return 2;
    }

    CLI::App app{"polydyn: numerical laboratory for iterated complex polynomials"};
    app.require_subcommand(1);

    auto* roots = app.add_subcommand("roots", "all zeros of a polynomial (CSV re,im,residual)");
    add_common(roots, cfg);
    roots->add_option("--tol", cfg.tol, "Newton-step tolerance");
    roots->add_option("--max-iter", cfg.max_iter, "iteration cap");

    auto* jete = app.add_subcommand("jet-eval", "value and derivatives of f^n at a point");
    add_common(jete, cfg);
    jete->add_option("--z", cfg.z_text, "evaluation point re,im");
    jete->add_option("--n", cfg.n, "iterate count");
    jete->add_option("--t", cfg.t, "derivative order");

    auto* green = app.add_subcommand("green", "escape-rate Green function on a grid");
    add_common(green, cfg);
    green->add_option("--rect", cfg.rect_text, "x_min,x_max,y_min,y_max");
    green->add_option("--grid", cfg.grid_text, "NXxNY");
    green->add_option("--n-esc", cfg.n_esc, "escape iteration count");
    green->add_option("--format", cfg.format, "csv or bin");

    auto* brolin = app.add_subcommand("brolin", "backward-orbit sample of the harmonic measure");
    add_common(brolin, cfg);
    brolin->add_option("--a", cfg.a_text, "start point re,im (must avoid the exceptional set)");
    brolin->add_option("--depth", cfg.depth, "backward steps per walk");
    brolin->add_option("--count", cfg.count, "number of walks");

    auto* pl1 = app.add_subcommand("potential-l1",
                                   "L1 distance of normalized log|(f^n)^(m)| grids to the Green grid");
    add_common(pl1, cfg);
    pl1->add_option("--m", cfg.m, "derivative order");
    pl1->add_option("--n", cfg.n_range, "iterate range A..B or list");
    pl1->add_option("--rect", cfg.rect_text, "x_min,x_max,y_min,y_max");
    pl1->add_option("--grid", cfg.grid_text, "NXxNY");
    pl1->add_option("--n-esc", cfg.n_esc, "escape iteration count");

    auto* bell = app.add_subcommand("bell-table", "composition-derivative polynomial table");
    add_common(bell, cfg);
    bell->add_option("--smax", cfg.smax, "table size");

    auto* lin = app.add_subcommand("linearize", "derivative-ratio convergence rates at a cycle");
    add_common(lin, cfg);
    lin->add_option("--period", cfg.period, "cycle period");
    lin->add_option("--mode", cfg.mode, "schroeder or abel");
    lin->add_option("--points", cfg.points_path, "CSV of test points re,im");
    lin->add_option("--t", cfg.t, "derivative order (>= 2)");
    lin->add_option("--n-range", cfg.n_range, "iterate range A..B or list");

    auto* va = app.add_subcommand("verify-a", "zero-cloud and potential convergence report");
    add_common(va, cfg);
    va->add_option("--m", cfg.m, "derivative order");
    va->add_option("--n", cfg.n_range, "iterate range A..B or list");
    va->add_option("--rect", cfg.rect_text, "x_min,x_max,y_min,y_max");
    va->add_option("--grid", cfg.grid_text, "NXxNY");
    va->add_option("--depth", cfg.depth, "reference-measure walk depth");
    va->add_option("--count", cfg.count, "reference-measure walk count");
    va->add_option("--tol", cfg.tol, "root-finder tolerance");
    va->add_option("--verdict-tol", cfg.verdict_tol, "verdict threshold");
    va->add_option("--a", cfg.a_text, "reference-measure start point");

    auto* m1 = app.add_subcommand("m1-check", "first-derivative zeros vs critical backward orbit");
    add_common(m1, cfg);
    m1->add_option("--n", cfg.n, "iterate count");
    m1->add_option("--tol", cfg.tol, "multiset match tolerance");

    CLI11_PARSE(app, argc, argv);

    for (auto* sub : {roots, jete, green, brolin, pl1, bell, lin, va, m1})
        if (sub->parsed()) cfg.subcommand = sub->get_name();

    try {
        return polydyn::dispatch(cfg);
    } catch (const polydyn::config_error& ex) {
        std::fprintf(stderr, "config error: %s\n", ex.what());
        return 2;
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 1;
    }
}
