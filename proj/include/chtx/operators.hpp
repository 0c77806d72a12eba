#pragma once

#include "chtx/model.hpp"

namespace chtx {

// Regularization for the singular sensitivity v^{-k} and the abort floor.
// eps_v clips the face-averaged v inside the drift coefficient only; the
// hard floor aborts a run when the raw field dips below it.
struct VFloorPolicy {
    double eps_v = 1e-10;
    double hard_floor = 1e-12;
};

// Flux-form 5/7-point Laplacian with mirrored (zero-flux) boundary faces.
// out[c] = sum_a (F_{a,right} - F_{a,left}) / h_a with F = dw/dx at the face.
void laplacian_neumann(const Field& w, const Grid& g, Field& out);

// Max over interior faces of |w_R - w_L| / h_a (discrete sup of |grad w|).
double max_face_gradient(const Field& w, const Grid& g);

// Face-centered drift q = chi * vbar^{-k} * (v_R - v_L)/h_a, vbar clipped at
// eps_v. comp[a][c] is the face between cell c and its +a neighbor; entries
// on the domain boundary stay zero. max_abs feeds the advective CFL.
struct FaceVelocity {
    std::array<Field, 3> comp;
    double max_abs = 0.0;

    void resize(const Grid& g) {
        // Boundary entries are zeroed once and never written afterwards.
        for (int a = 0; a < 3; ++a) {
            const std::size_t n = a < g.dim ? g.total : 0;
            if (comp[a].size() != n) comp[a].assign(n, 0.0);
        }
    }
};

// Throws FloorBreach when min(v) <= hard_floor; t only labels that error.
void face_drift(const Field& v, const Grid& g, const Params& p, const VFloorPolicy& floor,
                FaceVelocity& out, double t = 0.0);

// Donor-cell flux divergence: out[c] = div(u q), upwinded on the sign of q;
// the caller subtracts it. First order; u - dt*div stays nonnegative under
// the advective CFL.
void chemo_divergence(const Field& u, const FaceVelocity& q, const Grid& g, Field& out);

// Matrix-free CG for (I - a*Lap) w = rhs, warm-started at w = rhs so the
// constant mode (and hence the mean) is reproduced exactly. Stops when
// ||rhs - (I - a*Lap)w||_inf <= tol * ||rhs||_inf.
struct HelmholtzStats {
    int iterations = 0;
    double residual = 0.0;
};

struct CgWorkspace {
    Field res, dir, adir;
};

HelmholtzStats helmholtz_solve(const Field& rhs, double a, const Grid& g, Field& w,
                               CgWorkspace& ws, double tol = 1e-10, int max_iters = 10000);
HelmholtzStats helmholtz_solve(const Field& rhs, double a, const Grid& g, Field& w,
                               double tol = 1e-10, int max_iters = 10000);

}  // namespace chtx
