#include "chtx/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

namespace chtx {

MmsSpec validate_mms_spec(const MmsSpec& raw) {
    if (!(raw.a_u > 0.0 && raw.a_u < 1.0))
        throw ValidationError("mms amplitude a_u must lie in (0,1)");
    if (!(raw.a_v > 0.0 && raw.a_v < 1.0))
        throw ValidationError("mms amplitude a_v must lie in (0,1)");
    if (!(raw.omega > 0.0)) throw ValidationError("mms omega must be positive");
    if (raw.levels.size() < 3)
        throw ValidationError("mms needs at least 3 refinement levels");
    for (std::size_t i = 0; i < raw.levels.size(); ++i) {
        if (raw.levels[i] < 4) throw ValidationError("mms levels must be at least 4 cells");
        if (i > 0 && raw.levels[i] <= raw.levels[i - 1])
            throw ValidationError("mms levels must be strictly increasing");
    }
    if (!(raw.t_end > 0.0)) throw ValidationError("mms t_end must be positive");
    if (!(raw.dt_h2 > 0.0 && raw.dt_h2 <= 0.45))
        throw ValidationError("mms dt_h2 must lie in (0, 0.45]");
    return raw;
}

MmsPoint mms_eval(const MmsSpec& m, const Params& p, double x, double L, double t) {
    const double w = M_PI / L;
    const double phi = std::cos(w * x);
    const double dphi = -w * std::sin(w * x);
    const double ddphi = -w * w * phi;
    const double T = std::cos(m.omega * t);
    const double dT = -m.omega * std::sin(m.omega * t);

    MmsPoint out;
    out.u = 2.0 + m.a_u * T * phi;
    out.v = 2.0 + m.a_v * T * phi;
    const double ut = m.a_u * dT * phi;
    const double ux = m.a_u * T * dphi;
    const double uxx = m.a_u * T * ddphi;
    const double vt = m.a_v * dT * phi;
    const double vx = m.a_v * T * dphi;
    const double vxx = m.a_v * T * ddphi;

    const double vk = std::pow(out.v, -p.k);  // v^{-k}
    const double flux_div =
        ux * vk * vx - p.k * out.u * vk / out.v * vx * vx + out.u * vk * vxx;
    out.fu = ut - uxx + p.chi * flux_div - p.r * out.u + p.mu * out.u * out.u;
    out.fv = vt - vxx + p.alpha * out.v - p.beta * out.u;
    return out;
}

void mms_fill_exact(const MmsSpec& m, const Grid& g, double t, Field& u, Field& v) {
    u.resize(g.total);
    v.resize(g.total);
    const double L = g.lengths[0];
    const int n0 = g.cells[0], n1 = g.cells[1], n2 = g.cells[2];
    for (int i0 = 0; i0 < n0; ++i0) {
        const double x = g.center(0, i0);
        const double phi = std::cos(M_PI / L * x);
        const double T = std::cos(m.omega * t);
        const double uval = 2.0 + m.a_u * T * phi;
        const double vval = 2.0 + m.a_v * T * phi;
        for (int i1 = 0; i1 < n1; ++i1)
            for (int i2 = 0; i2 < n2; ++i2) {
                const std::size_t c = g.index(i0, i1, i2);
                u[c] = uval;
                v[c] = vval;
            }
    }
}

ForcingFn make_mms_forcing(const MmsSpec& m, const Params& p) {
    return [m, p](double t, const Grid& g, Field& fu, Field& fv) {
        const double L = g.lengths[0];
        const int n0 = g.cells[0], n1 = g.cells[1], n2 = g.cells[2];
        for (int i0 = 0; i0 < n0; ++i0) {
            const MmsPoint pt = mms_eval(m, p, g.center(0, i0), L, t);
            for (int i1 = 0; i1 < n1; ++i1)
                for (int i2 = 0; i2 < n2; ++i2) {
                    const std::size_t c = g.index(i0, i1, i2);
                    fu[c] = pt.fu;
                    fv[c] = pt.fv;
                }
        }
    };
}

std::vector<ConvergenceRow> run_convergence(const MmsSpec& spec, const Params& base,
                                            const SchemeConfig& sc, const VFloorPolicy& floor) {
    const MmsSpec m = validate_mms_spec(spec);
    std::vector<ConvergenceRow> rows;
    if (!(base.chi >= 0.0)) throw ValidationError("chi must be nonnegative");
    for (int n : m.levels) {
        Params p = base;
        p.cells[0] = n;
        // chi = 0 is allowed here (and only here) to isolate the
        // reaction-diffusion part; check everything else as usual.
        Params strict = p;
        if (strict.chi == 0.0) strict.chi = 1.0;
        validate_params(strict);
        const Grid g = Grid::from_params(p);
        const double h = g.h[0];

        SchemeConfig level_sc = sc;
        level_sc.t_end = m.t_end;
        level_sc.dt_max = m.dt_h2 * h * h;
        level_sc.dt_min = std::min(sc.dt_min, 1e-6 * level_sc.dt_max);
        level_sc = validate_scheme_config(level_sc);

        State init;
        mms_fill_exact(m, g, 0.0, init.u, init.v);
        const FunctionalSpec fspec = validate_functional_spec(4.0, 2.0, p);
        DiagSpec quiet;
        quiet.every_steps = 0;
        const RunOutcome out = run(init, p, level_sc, floor, g, fspec, quiet, {},
                                   make_mms_forcing(m, p));
        if (out.status != RunStatus::completed)
            throw std::runtime_error("manufactured run aborted: " + to_string(out.status) +
                                     " at t=" + std::to_string(out.detected_time));

        Field ue, ve;
        mms_fill_exact(m, g, m.t_end, ue, ve);
        double su = 0.0, sv = 0.0;
        for (std::size_t c = 0; c < g.total; ++c) {
            const double du = out.final_state.u[c] - ue[c];
            const double dv = out.final_state.v[c] - ve[c];
            su += du * du;
            sv += dv * dv;
        }
        ConvergenceRow row;
        row.cells = n;
        row.h = h;
        row.err_u = std::sqrt(su * g.cell_volume);
        row.err_v = std::sqrt(sv * g.cell_volume);
        if (!rows.empty()) {
            const ConvergenceRow& prev = rows.back();
            const double lr = std::log(prev.h / row.h);
            row.order_u = std::log(prev.err_u / row.err_u) / lr;
            row.order_v = std::log(prev.err_v / row.err_v) / lr;
        }
        rows.push_back(row);
    }
    return rows;
}

namespace {

SweepCell run_cell(const SweepSpec& spec, const Grid& g, const State& init, double mu,
                   double chi, double k) {
    Params p = spec.base;
    p.mu = mu;
    p.chi = chi;
    p.k = k;
    p = validate_params(p);
    const FunctionalSpec fspec = validate_functional_spec(spec.p, spec.q, p);

    VectorSink sink;
    const RunOutcome out =
        run(init, p, spec.scheme, spec.floor, g, fspec, spec.diag, {&sink});

    SweepCell cell;
    cell.mu = mu;
    cell.chi = chi;
    cell.k = k;
    cell.status = out.status;
    const bool completed = out.status == RunStatus::completed;
    cell.cls = classify_boundedness(sink.records, completed);
    for (const DiagRecord& rec : sink.records) {
        cell.sup_linf_u = std::max(cell.sup_linf_u, rec.linf_u);
        cell.sup_h_pq = std::max(cell.sup_h_pq, rec.h_pq);
    }
    cell.abort_time =
        completed ? std::numeric_limits<double>::quiet_NaN() : out.detected_time;
    return cell;
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec) {
    if (spec.mu.empty() || spec.chi.empty() || spec.k.empty())
        throw ValidationError("sweep axes must be non-empty");
    if (spec.workers < 1) throw ValidationError("workers must be at least 1");
    if (spec.ic.kind == IcKind::from_snapshot)
        throw ValidationError("sweep initial data must be generated, not loaded");

    // Geometry and initial data are shared by every cell.
    const Params base = validate_params(spec.base);
    const Grid g = Grid::from_params(base);
    const State init = make_initial_condition(spec.ic, g, base, spec.seed);

    const std::size_t n = spec.mu.size() * spec.chi.size() * spec.k.size();
    SweepResult result;
    result.cells.resize(n);

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto work = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                const std::size_t ik = i % spec.k.size();
                const std::size_t ichi = (i / spec.k.size()) % spec.chi.size();
                const std::size_t imu = i / (spec.k.size() * spec.chi.size());
                result.cells[i] =
                    run_cell(spec, g, init, spec.mu[imu], spec.chi[ichi], spec.k[ik]);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    const int workers =
        static_cast<int>(std::min(static_cast<std::size_t>(spec.workers), n));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < workers; ++i) pool.emplace_back(work);
        for (std::thread& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    return result;
}

BisectResult bisect_threshold(const SweepSpec& spec, int max_iters) {
    if (spec.chi.size() != 1 || spec.k.size() != 1)
        throw ValidationError("bisect requires exactly one chi and one k");
    if (max_iters < 1) throw ValidationError("max_iters must be at least 1");

    SweepSpec scan = spec;
    std::sort(scan.mu.begin(), scan.mu.end());
    scan.mu.erase(std::unique(scan.mu.begin(), scan.mu.end()), scan.mu.end());
    if (scan.mu.size() < 2)
        throw ValidationError("bisect needs at least two distinct mu values");

    BisectResult res;
    const SweepResult initial = run_sweep(scan);
    bool seen_bounded = false;
    for (const SweepCell& cell : initial.cells) {
        res.transcript.push_back({cell.mu, cell.cls});
        if (cell.cls == BoundednessClass::inconclusive) {
            res.message = "inconclusive classification at mu=" + std::to_string(cell.mu);
            return res;
        }
        const bool bounded = cell.cls == BoundednessClass::bounded;
        if (seen_bounded && !bounded) {
            res.message = "classification not monotone in mu";
            return res;
        }
        seen_bounded = seen_bounded || bounded;
    }
    if (!seen_bounded) {
        res.message = "no upper bracket";
        return res;
    }
    if (initial.cells.front().cls == BoundednessClass::bounded) {
        res.message = "no lower bracket";
        return res;
    }

    double lo = 0.0, hi = 0.0;
    for (const SweepCell& cell : initial.cells)
        if (cell.cls == BoundednessClass::bounded) {
            hi = cell.mu;
            break;
        }
    for (const SweepCell& cell : initial.cells)
        if (cell.cls != BoundednessClass::bounded) lo = cell.mu;

    SweepSpec probe = scan;
    for (int it = 0; it < max_iters; ++it) {
        const double mid = 0.5 * (lo + hi);
        probe.mu = {mid};
        const SweepCell cell = run_sweep(probe).cells.front();
        res.transcript.push_back({mid, cell.cls});
        if (cell.cls == BoundednessClass::inconclusive) {
            res.message = "inconclusive classification at mu=" + std::to_string(mid);
            return res;
        }
        if (cell.cls == BoundednessClass::bounded)
            hi = mid;
        else
            lo = mid;
    }
    res.conclusive = true;
    res.mu_low = lo;
    res.mu_high = hi;
    return res;
}

}  // namespace chtx
