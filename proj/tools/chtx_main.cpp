#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chtx/io.hpp"

namespace fs = std::filesystem;
using namespace chtx;

namespace {

std::string join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

Scheme scheme_from_name(const std::string& s) {
    if (s == "explicit-euler") return Scheme::explicit_euler;
    if (s == "imex-diffusion") return Scheme::imex_diffusion;
    throw ValidationError("scheme must be explicit-euler or imex-diffusion, got '" + s + "'");
}

struct Common {
    std::string config;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool quiet = false;
};

int cmd_run(const Common& c) {
    RunConfig cfg = parse_config(c.config);
    if (c.seed_set) cfg.seed = c.seed;
    fs::create_directories(c.out_dir);
    {
        std::ofstream echo(join(c.out_dir, "effective.cfg"));
        if (!echo) throw IoError("cannot open " + join(c.out_dir, "effective.cfg"));
        echo << render_config(cfg);
    }

    const Grid grid = Grid::from_params(cfg.params);
    const State init = load_initial_state(cfg.ic, grid, cfg.params, cfg.seed);
    const FunctionalSpec fspec = validate_functional_spec(cfg.p, cfg.q, cfg.params);

    CsvSink csv(join(c.out_dir, cfg.out_csv));
    VectorSink trace;
    const RunOutcome out = run(init, cfg.params, cfg.scheme, cfg.floor, grid, fspec, cfg.diag,
                               {&csv, &trace});
    csv.close();
    if (!cfg.out_snapshot.empty())
        write_snapshot(out.final_state, grid, join(c.out_dir, cfg.out_snapshot));

    const CheckResult mass =
        check_mass_bound(trace.records, cfg.params, grid, trace.records.front().mass_u);
    const CheckResult vfloor =
        check_v_floor(trace.records, cfg.params, trace.records.front().min_v);
    const BoundednessClass cls =
        classify_boundedness(trace.records, out.status == RunStatus::completed);

    if (!c.quiet) {
        std::printf("status: %s\n", to_string(out.status).c_str());
        std::printf("steps: %lld  final t: %.17g\n", out.steps, out.final_state.t);
        std::printf("mass-bound: %s (worst margin %.3e)\n", mass.pass ? "pass" : "FAIL",
                    mass.worst_margin);
        std::printf("v-floor: %s (worst margin %.3e)\n", vfloor.pass ? "pass" : "FAIL",
                    vfloor.worst_margin);
        std::printf("class: %s\n", to_string(cls).c_str());
    }
    return out.status == RunStatus::completed ? 0 : 2;
}

int cmd_sweep(const Common& c) {
    SweepConfig cfg = parse_sweep_config(c.config);
    if (c.seed_set) cfg.spec.seed = c.seed;
    fs::create_directories(c.out_dir);
    const SweepResult result = run_sweep(cfg.spec);
    write_sweep_csv(result, join(c.out_dir, cfg.out_csv));
    write_sweep_json(cfg.spec, result, join(c.out_dir, cfg.out_json));
    if (!c.quiet)
        for (const SweepCell& cell : result.cells)
            std::printf("mu=%-10.4g chi=%-8.4g k=%-6.4g %-16s %-10s sup|u|=%.6g\n", cell.mu,
                        cell.chi, cell.k, to_string(cell.status).c_str(),
                        to_string(cell.cls).c_str(), cell.sup_linf_u);
    return 0;
}

int cmd_bisect(const Common& c) {
    SweepConfig cfg = parse_sweep_config(c.config);
    if (c.seed_set) cfg.spec.seed = c.seed;
    fs::create_directories(c.out_dir);
    const BisectResult res = bisect_threshold(cfg.spec, cfg.max_bisect_iters);
    write_bisect_json(cfg.spec, res, join(c.out_dir, "bisect.json"));
    if (!c.quiet) {
        for (const BisectStep& s : res.transcript)
            std::printf("mu=%-12.6g -> %s\n", s.mu, to_string(s.cls).c_str());
        if (res.conclusive)
            std::printf("threshold interval: [%.6g, %.6g] (width %.6g)\n", res.mu_low,
                        res.mu_high, res.mu_high - res.mu_low);
        else
            std::printf("inconclusive: %s\n", res.message.c_str());
    }
    return 0;
}

struct MmsArgs {
    std::string scheme = "explicit-euler";
    double chi = 0.0;
    double k = 0.5;
    double beta = 1e-3;
    double t_end = 0.25;
    std::vector<int> levels{64, 128, 256};
};

int cmd_mms(const Common& c, const MmsArgs& a) {
    Params base;
    base.chi = a.chi;
    base.r = 1.0;
    base.mu = 1.0;
    base.alpha = 1.0;
    base.beta = a.beta;  // small secretion keeps v clear of u's upwind error
    base.k = a.k;
    base.dim = 1;
    base.cells = {a.levels.empty() ? 64 : a.levels.front(), 1, 1};

    SchemeConfig sc;
    sc.scheme = scheme_from_name(a.scheme);
    MmsSpec spec;
    spec.levels = a.levels;
    spec.t_end = a.t_end;

    const std::vector<ConvergenceRow> rows = run_convergence(spec, base, sc, VFloorPolicy{});
    fs::create_directories(c.out_dir);
    write_convergence_csv(rows, join(c.out_dir, "mms.csv"));
    std::printf("%8s %12s %14s %8s %14s %8s\n", "cells", "h", "err_u", "order_u", "err_v",
                "order_v");
    for (const ConvergenceRow& r : rows)
        std::printf("%8d %12.6g %14.6e %8.3f %14.6e %8.3f\n", r.cells, r.h, r.err_u, r.order_u,
                    r.err_v, r.order_v);
    return 0;
}

int cmd_verify_lemma24(const Common& c, int fields, int cells, std::uint64_t seed) {
    if (fields < 1) throw ValidationError("fields must be at least 1");
    if (cells < 4) throw ValidationError("cells must be at least 4");
    std::vector<InequalityEntry> entries;
    bool ok = true;
    for (int dim = 1; dim <= 2; ++dim) {
        double coarse_max[3] = {0, 0, 0};
        for (int level = 0; level < 2; ++level) {
            const int n = level == 0 ? cells : 2 * cells;
            Params p;
            p.dim = dim;
            p.cells = {n, n, 1};
            p = validate_params(p);
            const Grid g = Grid::from_params(p);
            IcSpec ic;
            ic.kind = IcKind::random_smooth;
            ic.floor = 0.5;
            ic.amplitude = 1.0;
            double level_max[3] = {0, 0, 0};
            for (int i = 0; i < fields; ++i) {
                const State w =
                    make_initial_condition(ic, g, p, seed + static_cast<std::uint64_t>(i));
                const double ps[3] = {2.0, 3.0, 4.0};
                for (int ip = 0; ip < 3; ++ip) {
                    const InequalityEntry e = lemma24_ratio(w.u, ps[ip], g);
                    entries.push_back(e);
                    if (!std::isfinite(e.ratio)) ok = false;
                    level_max[ip] = std::max(level_max[ip], e.ratio);
                }
            }
            for (int ip = 0; ip < 3; ++ip) {
                std::printf("dim=%d N=%-4d p=%.0f  max ratio %.6g\n", dim, n, 2.0 + ip,
                            level_max[ip]);
                if (level == 1 && level_max[ip] > 2.0 * coarse_max[ip]) {
                    std::printf("  refinement blow-up: %.6g > 2 x %.6g\n", level_max[ip],
                                coarse_max[ip]);
                    ok = false;
                }
                coarse_max[ip] = level_max[ip];
            }
        }
    }
    fs::create_directories(c.out_dir);
    write_inequality_csv(entries, join(c.out_dir, "lemma24.csv"));
    if (!ok) {
        std::fprintf(stderr, "inequality verification failed\n");
        return 2;
    }
    std::printf("all ratios finite and refinement-stable\n");
    return 0;
}

int cmd_steady_check(double t_end) {
    Params p;
    p.chi = 1.0;
    p.r = 1.0;
    p.mu = 2.0;
    p.beta = 1.0;
    p.alpha = 0.5;
    p.k = 0.5;
    p.dim = 2;
    p.cells = {64, 64, 1};
    p = validate_params(p);
    const Grid g = Grid::from_params(p);
    const auto [ustar, vstar] = steady_state(p);

    IcSpec ic;
    ic.kind = IcKind::constant;
    ic.u0 = ustar;
    ic.v0 = vstar;
    const State init = make_initial_condition(ic, g, p, 1);
    const FunctionalSpec fspec = validate_functional_spec(4.0, 2.0, p);

    bool ok = true;
    for (Scheme scheme : {Scheme::explicit_euler, Scheme::imex_diffusion}) {
        SchemeConfig sc;
        sc.scheme = scheme;
        sc.t_end = t_end;
        DiagSpec quiet_diag;
        quiet_diag.every_steps = 0;
        const RunOutcome out =
            run(init, p, sc, VFloorPolicy{}, g, fspec, quiet_diag, {});
        double dev = 0.0;
        for (std::size_t i = 0; i < g.total; ++i) {
            dev = std::max(dev, std::fabs(out.final_state.u[i] - ustar));
            dev = std::max(dev, std::fabs(out.final_state.v[i] - vstar));
        }
        const bool pass = out.status == RunStatus::completed && dev <= 1e-8;
        ok = ok && pass;
        std::printf("%-16s status=%s  max deviation %.3e  %s\n",
                    scheme == Scheme::explicit_euler ? "explicit-euler" : "imex-diffusion",
                    to_string(out.status).c_str(), dev, pass ? "pass" : "FAIL");
    }
    return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"chemotaxis simulator with boundedness monitors"};
    app.require_subcommand(1);

    Common c;
    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* opt = sub->add_option("--config", c.config, "configuration file");
        if (config_required) opt->required();
        sub->add_option("--out-dir", c.out_dir, "output directory");
        sub->add_option("--seed", c.seed, "override the configured seed")
            ->each([&](const std::string&) { c.seed_set = true; });
        sub->add_flag("--quiet", c.quiet, "suppress progress output");
    };

    CLI::App* s_run = app.add_subcommand("run", "single simulation");
    add_common(s_run, true);
    CLI::App* s_sweep = app.add_subcommand("sweep", "parameter sweep over (mu, chi, k)");
    add_common(s_sweep, true);
    CLI::App* s_bisect = app.add_subcommand("bisect", "mu-threshold bisection");
    add_common(s_bisect, true);

    MmsArgs ma;
    CLI::App* s_mms = app.add_subcommand("mms", "manufactured-solution convergence study");
    add_common(s_mms, false);
    s_mms->add_option("--scheme", ma.scheme, "explicit-euler or imex-diffusion");
    s_mms->add_option("--chi", ma.chi, "chemotactic strength (0 isolates reaction-diffusion)");
    s_mms->add_option("--k", ma.k, "sensitivity exponent");
    s_mms->add_option("--beta", ma.beta, "secretion rate");
    s_mms->add_option("--t-end", ma.t_end, "horizon");
    s_mms->add_option("--levels", ma.levels, "cell counts, comma separated")->delimiter(',');

    int l24_fields = 100, l24_cells = 64;
    std::uint64_t l24_seed = 12345;
    CLI::App* s_l24 = app.add_subcommand("verify-lemma24", "gradient-inequality corpus study");
    add_common(s_l24, false);
    s_l24->add_option("--fields", l24_fields, "corpus size per level");
    s_l24->add_option("--cells", l24_cells, "coarse cell count");
    s_l24->add_option("--corpus-seed", l24_seed, "corpus base seed");

    double steady_t_end = 10.0;
    CLI::App* s_steady = app.add_subcommand("steady-check", "steady-state preservation test");
    add_common(s_steady, false);
    s_steady->add_option("--t-end", steady_t_end, "horizon");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (s_run->parsed()) return cmd_run(c);
        if (s_sweep->parsed()) return cmd_sweep(c);
        if (s_bisect->parsed()) return cmd_bisect(c);
        if (s_mms->parsed()) return cmd_mms(c, ma);
        if (s_l24->parsed()) return cmd_verify_lemma24(c, l24_fields, l24_cells, l24_seed);
        if (s_steady->parsed()) return cmd_steady_check(steady_t_end);
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
