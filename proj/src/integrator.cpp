#include "chtx/integrator.hpp"

#include <cmath>
#include <limits>

namespace chtx {

SchemeConfig validate_scheme_config(const SchemeConfig& raw) {
    if (!(raw.cfl_diffusion > 0.0 && raw.cfl_diffusion <= 1.0))
        throw ValidationError("cfl_diffusion must lie in (0,1]");
    if (!(raw.cfl_advection > 0.0 && raw.cfl_advection <= 1.0))
        throw ValidationError("cfl_advection must lie in (0,1]");
    if (!(raw.dt_min > 0.0)) throw ValidationError("dt_min must be positive");
    if (!(raw.dt_min <= raw.dt_max)) throw ValidationError("dt_min must not exceed dt_max");
    if (!(raw.t_end > 0.0)) throw ValidationError("t_end must be positive");
    if (!(raw.blowup_threshold > 0.0)) throw ValidationError("blowup_threshold must be positive");
    return raw;
}

std::string to_string(RunStatus s) {
    switch (s) {
        case RunStatus::completed: return "completed";
        case RunStatus::blowup_detected: return "blowup-detected";
        case RunStatus::v_floor_breached: return "v-floor-breached";
        case RunStatus::dt_underflow: return "dt-underflow";
    }
    return "unknown";
}

double stable_dt(const State& s, const FaceVelocity& drift, const Grid& g,
                 const SchemeConfig& sc, const Params& p) {
    double h_min = g.h[0];
    for (int a = 1; a < g.dim; ++a) h_min = std::min(h_min, g.h[a]);
    const double two_d = 2.0 * g.dim;

    double dt = sc.dt_max;
    // unit diffusivity in both equations
    if (sc.scheme == Scheme::explicit_euler)
        dt = std::min(dt, sc.cfl_diffusion * h_min * h_min / two_d);
    if (drift.max_abs > 0.0)
        dt = std::min(dt, sc.cfl_advection * h_min / (two_d * drift.max_abs));
    const double rate = p.r + p.mu * field_max(s.u) + p.alpha + p.beta;
    dt = std::min(dt, 0.5 / rate);

    if (dt < sc.dt_min) throw DtUnderflow(dt, sc.dt_min);
    return dt;
}

namespace {

// uses the sign-safe reaction form wherever explicit Euler would go negative
void fix_negative_candidates(const Field& u, double dt, const Params& p, Field& cand) {
    for (std::size_t c = 0; c < cand.size(); ++c)
        if (cand[c] < 0.0) cand[c] = u[c] * (1.0 + dt * p.r) / (1.0 + dt * p.mu * u[c]);
}

}  // namespace

void step(State& s, double dt, const FaceVelocity& drift, const Params& p,
          const SchemeConfig& sc, const Grid& g, StepWorkspace& ws,
          const Field* fu, const Field* fv) {
    const std::size_t n = g.total;
    ws.rhs_u.resize(n);
    ws.rhs_v.resize(n);
    chemo_divergence(s.u, drift, g, ws.adv);
    const double* __restrict fup = fu ? fu->data() : nullptr;
    const double* __restrict fvp = fv ? fv->data() : nullptr;

    if (sc.scheme == Scheme::explicit_euler) {
        laplacian_neumann(s.u, g, ws.lap);
        double worst = 0.0;
        if (fup)
            for (std::size_t c = 0; c < n; ++c) {
                const double u = s.u[c];
                const double cand =
                    u + dt * (ws.lap[c] - ws.adv[c] + p.r * u - p.mu * u * u + fup[c]);
                ws.rhs_u[c] = cand;
                worst = std::min(worst, cand);
            }
        else
            for (std::size_t c = 0; c < n; ++c) {
                const double u = s.u[c];
                const double cand = u + dt * (ws.lap[c] - ws.adv[c] + p.r * u - p.mu * u * u);
                ws.rhs_u[c] = cand;
                worst = std::min(worst, cand);
            }
        if (worst < 0.0) fix_negative_candidates(s.u, dt, p, ws.rhs_u);
        laplacian_neumann(s.v, g, ws.lap);
        if (fvp)
            for (std::size_t c = 0; c < n; ++c)
                ws.rhs_v[c] =
                    s.v[c] + dt * (ws.lap[c] - p.alpha * s.v[c] + p.beta * s.u[c] + fvp[c]);
        else
            for (std::size_t c = 0; c < n; ++c)
                ws.rhs_v[c] = s.v[c] + dt * (ws.lap[c] - p.alpha * s.v[c] + p.beta * s.u[c]);
        s.u.swap(ws.rhs_u);
        s.v.swap(ws.rhs_v);
    } else {
        // explicit advection + reaction, then backward-Euler diffusion
        double worst = 0.0;
        for (std::size_t c = 0; c < n; ++c) {
            const double u = s.u[c];
            const double cand =
                u + dt * (-ws.adv[c] + p.r * u - p.mu * u * u + (fup ? fup[c] : 0.0));
            ws.rhs_u[c] = cand;
            worst = std::min(worst, cand);
        }
        if (worst < 0.0) fix_negative_candidates(s.u, dt, p, ws.rhs_u);
        for (std::size_t c = 0; c < n; ++c)
            ws.rhs_v[c] =
                s.v[c] + dt * (-p.alpha * s.v[c] + p.beta * s.u[c] + (fvp ? fvp[c] : 0.0));
        helmholtz_solve(ws.rhs_u, dt, g, s.u, ws.cg);
        // the iterative solve can undershoot zero by O(tol) where u vanishes
        for (std::size_t c = 0; c < n; ++c) s.u[c] = std::max(s.u[c], 0.0);
        helmholtz_solve(ws.rhs_v, dt, g, s.v, ws.cg);
    }
    s.t += dt;
}

State step(const State& s, const Params& p, const SchemeConfig& sc,
           const VFloorPolicy& floor, const Grid& g) {
    StepWorkspace ws;
    face_drift(s.v, g, p, floor, ws.drift);
    const double dt = stable_dt(s, ws.drift, g, sc, p);
    State out = s;
    step(out, dt, ws.drift, p, sc, g, ws);
    return out;
}

namespace {

struct FieldScan {
    double linf_u = 0.0;
    double linf_v = 0.0;
    double min_v = 0.0;
    bool finite = true;
};

FieldScan scan_state(const State& s) {
    FieldScan r;
    r.linf_u = field_linf(s.u);
    r.linf_v = field_linf(s.v);
    r.min_v = field_min(s.v);
    // a max-reduction skips NaN, so detect non-finite entries through sums
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= s.u.size(); i += 4) {
        s0 += s.u[i] + s.v[i];
        s1 += s.u[i + 1] + s.v[i + 1];
        s2 += s.u[i + 2] + s.v[i + 2];
        s3 += s.u[i + 3] + s.v[i + 3];
    }
    for (; i < s.u.size(); ++i) s0 += s.u[i] + s.v[i];
    r.finite = std::isfinite((s0 + s1) + (s2 + s3)) && std::isfinite(r.linf_u) &&
               std::isfinite(r.linf_v);
    return r;
}

}  // namespace

RunOutcome run(const State& initial, const Params& p, const SchemeConfig& sc,
               const VFloorPolicy& floor, const Grid& g, const FunctionalSpec& fspec,
               const DiagSpec& diag, const std::vector<RecordSink*>& sinks,
               const ForcingFn& forcing) {
    validate_state(initial, g);

    RunOutcome out;
    State s = initial;
    StepWorkspace ws;
    long long steps = 0;
    double last_dt = 0.0;
    double next_emit_time = diag.every_time > 0.0 ? diag.every_time : 0.0;
    long long last_emitted = -1;

    auto emit = [&]() {
        const DiagRecord rec = eval_record(s, g, fspec, p, last_dt, steps);
        for (RecordSink* sink : sinks) sink->write(rec);
        last_emitted = steps;
    };
    // returns the abort status for the current state, if any
    auto abort_status = [&](const FieldScan& scan) -> bool {
        if (!scan.finite ||
            scan.linf_u + scan.linf_v + max_face_gradient(s.v, g) >= sc.blowup_threshold) {
            out.status = RunStatus::blowup_detected;
            return true;
        }
        if (scan.min_v <= floor.hard_floor) {
            out.status = RunStatus::v_floor_breached;
            return true;
        }
        return false;
    };
    auto finish = [&](RunStatus status) {
        out.status = status;
        out.final_state = std::move(s);
        out.detected_time = out.final_state.t;
        out.steps = steps;
        return out;
    };

    emit();  // t = 0 record (valid states always evaluate finitely)
    if (abort_status(scan_state(s))) return finish(out.status);

    while (s.t < sc.t_end) {
        double dt;
        try {
            face_drift(s.v, g, p, floor, ws.drift, s.t);
            dt = stable_dt(s, ws.drift, g, sc, p);
        } catch (const FloorBreach&) {
            return finish(RunStatus::v_floor_breached);
        } catch (const DtUnderflow&) {
            return finish(RunStatus::dt_underflow);
        }
        bool final_step = false;
        if (s.t + dt >= sc.t_end) {
            dt = sc.t_end - s.t;
            final_step = true;
        }
        if (forcing) {
            ws.fu.resize(g.total);
            ws.fv.resize(g.total);
            forcing(s.t, g, ws.fu, ws.fv);
        }
        step(s, dt, ws.drift, p, sc, g, ws, forcing ? &ws.fu : nullptr,
             forcing ? &ws.fv : nullptr);
        if (final_step) s.t = sc.t_end;  // land exactly
        ++steps;
        last_dt = dt;

        if (abort_status(scan_state(s))) return finish(out.status);

        bool due = diag.every_steps > 0 && steps % diag.every_steps == 0;
        if (diag.every_time > 0.0 && s.t >= next_emit_time) {
            due = true;
            while (next_emit_time <= s.t) next_emit_time += diag.every_time;
        }
        if (due || final_step) emit();
    }

    if (last_emitted != steps) emit();
    return finish(RunStatus::completed);
}

}  // namespace chtx
