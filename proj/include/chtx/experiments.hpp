#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chtx/integrator.hpp"

namespace chtx {

// Manufactured pair on the box, varying along the first axis only:
//   u_ex = 2 + a_u cos(w t) cos(pi x / L),  v_ex = 2 + a_v cos(w t) cos(pi x / L).
// Cosine modes satisfy the Neumann closure exactly; amplitudes below 1 keep
// both fields above 1 so v^{-k} stays regular.
struct MmsSpec {
    double a_u = 0.25;
    double a_v = 0.25;
    double omega = 1.0;
    std::vector<int> levels{64, 128, 256};  // cell counts along the first axis
    double t_end = 0.25;
    double dt_h2 = 0.2;  // dt = dt_h2 * h^2, keeps temporal error subdominant
};

MmsSpec validate_mms_spec(const MmsSpec& raw);

// Pointwise exact solution and forcing residual at position x (first axis),
// box length L, time t:
//   f_u = du/dt - Lap u + chi d/dx(u v^{-k} dv/dx) - r u + mu u^2
//   f_v = dv/dt - Lap v + alpha v - beta u
struct MmsPoint {
    double u = 0.0, v = 0.0, fu = 0.0, fv = 0.0;
};
MmsPoint mms_eval(const MmsSpec& m, const Params& p, double x, double L, double t);

// Exact fields at cell centers and the forcing callback for run().
void mms_fill_exact(const MmsSpec& m, const Grid& g, double t, Field& u, Field& v);
ForcingFn make_mms_forcing(const MmsSpec& m, const Params& p);

struct ConvergenceRow {
    int cells = 0;
    double h = 0.0;
    double err_u = 0.0;  // L2 error against the exact solution at t_end
    double err_v = 0.0;
    double order_u = 0.0;  // log2(e_coarse / e_fine); 0 on the first row
    double order_v = 0.0;
};

// Runs every refinement level with manufactured forcing and returns the
// error table. Any aborted run fails the study (throws).
std::vector<ConvergenceRow> run_convergence(const MmsSpec& spec, const Params& base,
                                            const SchemeConfig& sc, const VFloorPolicy& floor);

// Cartesian sweep over (mu, chi, k); everything else shared. Cells are
// independent runs, deterministic per cell (same seed), merged by index.
struct SweepSpec {
    std::vector<double> mu{1.0};
    std::vector<double> chi{1.0};
    std::vector<double> k{0.5};
    Params base;
    SchemeConfig scheme;
    VFloorPolicy floor;
    IcSpec ic;
    std::uint64_t seed = 1;
    double p = 4.0;
    double q = 2.0;
    DiagSpec diag;
    int workers = 1;
};

struct SweepCell {
    double mu = 0.0, chi = 0.0, k = 0.0;
    RunStatus status = RunStatus::completed;
    BoundednessClass cls = BoundednessClass::inconclusive;
    double sup_linf_u = 0.0;
    double sup_h_pq = 0.0;
    double abort_time = 0.0;  // NaN when the run completed
};

struct SweepResult {
    std::vector<SweepCell> cells;  // mu outer, then chi, then k
};

SweepResult run_sweep(const SweepSpec& spec);

// Bisection on the boundedness classification along the mu axis. Needs a
// single chi and k. The initial sweep over spec.mu must produce a monotone
// picture (non-bounded below, bounded above); otherwise inconclusive with
// the transcript attached.
struct BisectStep {
    double mu = 0.0;
    BoundednessClass cls = BoundednessClass::inconclusive;
};

struct BisectResult {
    bool conclusive = false;
    double mu_low = 0.0;   // highest non-bounded mu of the final bracket
    double mu_high = 0.0;  // lowest bounded mu of the final bracket
    std::string message;   // reason when inconclusive ("no lower bracket", ...)
    std::vector<BisectStep> transcript;
};

BisectResult bisect_threshold(const SweepSpec& spec, int max_iters);

}  // namespace chtx
