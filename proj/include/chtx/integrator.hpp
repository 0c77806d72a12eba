#pragma once

#include <functional>

#include "chtx/diagnostics.hpp"
#include "chtx/model.hpp"
#include "chtx/operators.hpp"

namespace chtx {

enum class Scheme { explicit_euler, imex_diffusion };

struct SchemeConfig {
    Scheme scheme = Scheme::imex_diffusion;
    double cfl_diffusion = 0.9;   // in (0,1], explicit diffusion safety
    double cfl_advection = 0.5;   // in (0,1], drift CFL safety
    double dt_max = 0.1;
    double dt_min = 1e-12;
    double t_end = 1.0;
    double blowup_threshold = 1e6;  // cutoff on linf_u + linf_v + linf_grad_v
};

SchemeConfig validate_scheme_config(const SchemeConfig& raw);

// Diagnostic cadence: emit every `every_steps` steps and/or every
// `every_time` time units; t = 0 and the final state are always emitted.
struct DiagSpec {
    long long every_steps = 10;  // 0 disables the step cadence
    double every_time = 0.0;     // 0 disables the time cadence
};

enum class RunStatus { completed, blowup_detected, v_floor_breached, dt_underflow };
std::string to_string(RunStatus s);

struct RunOutcome {
    RunStatus status = RunStatus::completed;
    State final_state;
    double detected_time = 0.0;  // abort time; equals final t when completed
    long long steps = 0;
};

// Largest stable step: advective CFL h_min/(2 d max|q|) and reaction limit
// 0.5/(r + mu max u + alpha + beta) always apply; the explicit scheme adds
// the diffusion limit h_min^2/(2 d). Clamped by dt_max; below dt_min throws
// DtUnderflow.
double stable_dt(const State& s, const FaceVelocity& drift, const Grid& g,
                 const SchemeConfig& sc, const Params& p);

// Fills fu/fv (cell-centered source terms) for time t; used by the
// manufactured-solution studies. Null pointers mean zero forcing.
using ForcingFn = std::function<void(double t, const Grid& g, Field& fu, Field& fv)>;

// Scratch buffers reused across steps.
struct StepWorkspace {
    FaceVelocity drift;
    Field lap, adv, rhs_u, rhs_v, fu, fv;
    CgWorkspace cg;
};

// One step of size dt with the drift already evaluated on s.v. Explicit
// Euler applies everything forward; imex-diffusion applies advection and
// reaction explicitly, then solves (I - dt Lap) per field. The logistic
// update falls back to u (1 + dt r)/(1 + dt mu u) whenever the forward
// candidate would be negative, so u never leaves [0, inf).
void step(State& s, double dt, const FaceVelocity& drift, const Params& p,
          const SchemeConfig& sc, const Grid& g, StepWorkspace& ws,
          const Field* fu = nullptr, const Field* fv = nullptr);

// Convenience form: computes drift and stable_dt internally.
State step(const State& s, const Params& p, const SchemeConfig& sc,
           const VFloorPolicy& floor, const Grid& g);

// Advances from `initial` until t_end or an abort: blow-up detector
// (linf_u + linf_v + linf_grad_v >= threshold, or any non-finite value,
// checked at t = 0 and after every step), hard v-floor, dt underflow.
// Emits DiagRecords to every sink at the configured cadence. Deterministic:
// identical inputs give bit-identical outcomes and record streams.
RunOutcome run(const State& initial, const Params& p, const SchemeConfig& sc,
               const VFloorPolicy& floor, const Grid& g, const FunctionalSpec& fspec,
               const DiagSpec& diag, const std::vector<RecordSink*>& sinks,
               const ForcingFn& forcing = nullptr);

}  // namespace chtx
