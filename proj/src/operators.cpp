#include "chtx/operators.hpp"

#include <cmath>
#include <vector>

namespace chtx {

namespace {

// Axis decomposition: linear indices split into blocks of s*n per period of
// axis a (s = stride, n = cells). Left cells of interior faces are exactly
// the first s*(n-1) offsets of each block, so every face sweep below runs
// over contiguous spans; the right neighbor sits s entries ahead.
struct AxisSpan {
    std::size_t s, block, left;  // stride, s*n, s*(n-1)
    AxisSpan(const Grid& g, int a)
        : s(g.stride[a]),
          block(g.stride[a] * static_cast<std::size_t>(g.cells[a])),
          left(g.stride[a] * static_cast<std::size_t>(g.cells[a] - 1)) {}
};

}  // namespace

void laplacian_neumann(const Field& w, const Grid& g, Field& out) {
    out.assign(g.total, 0.0);
    std::vector<double> fbuf;
    for (int a = 0; a < g.dim; ++a) {
        const AxisSpan ax(g, a);
        const double inv_h2 = 1.0 / (g.h[a] * g.h[a]);
        if (ax.s == 1) {
            // Contiguous axis: per-row face fluxes, then their difference.
            const std::size_t n = ax.block;
            fbuf.assign(n + 1, 0.0);
            for (std::size_t base = 0; base < g.total; base += n) {
                const double* __restrict wr = w.data() + base;
                double* __restrict orow = out.data() + base;
                double* __restrict f = fbuf.data();
                for (std::size_t i = 1; i < n; ++i) f[i] = wr[i] - wr[i - 1];
                for (std::size_t i = 0; i < n; ++i) orow[i] += (f[i + 1] - f[i]) * inv_h2;
            }
        } else {
            // Outer axis: left and right spans of each face sheet are disjoint.
            for (std::size_t base = 0; base < g.total; base += ax.block)
                for (std::size_t off = 0; off < ax.left; off += ax.s) {
                    const double* __restrict wl = w.data() + base + off;
                    const double* __restrict wr = wl + ax.s;
                    double* __restrict ol = out.data() + base + off;
                    double* __restrict orr = ol + ax.s;
                    for (std::size_t j = 0; j < ax.s; ++j) {
                        const double flux = (wr[j] - wl[j]) * inv_h2;
                        ol[j] += flux;
                        orr[j] -= flux;
                    }
                }
        }
    }
}

double max_face_gradient(const Field& w, const Grid& g) {
    double m = 0.0;
    for (int a = 0; a < g.dim; ++a) {
        const AxisSpan ax(g, a);
        double m0 = 0.0, m1 = 0.0, m2 = 0.0, m3 = 0.0;
        for (std::size_t base = 0; base < g.total; base += ax.block) {
            const double* __restrict wl = w.data() + base;
            const double* __restrict wr = wl + ax.s;
            std::size_t j = 0;
            for (; j + 4 <= ax.left; j += 4) {
                m0 = std::max(m0, std::fabs(wr[j] - wl[j]));
                m1 = std::max(m1, std::fabs(wr[j + 1] - wl[j + 1]));
                m2 = std::max(m2, std::fabs(wr[j + 2] - wl[j + 2]));
                m3 = std::max(m3, std::fabs(wr[j + 3] - wl[j + 3]));
            }
            for (; j < ax.left; ++j) m0 = std::max(m0, std::fabs(wr[j] - wl[j]));
        }
        const double ma = std::max(std::max(m0, m1), std::max(m2, m3));
        m = std::max(m, ma / g.h[a]);
    }
    return m;
}

void face_drift(const Field& v, const Grid& g, const Params& p, const VFloorPolicy& floor,
                FaceVelocity& out, double t) {
    const double mv = field_min(v);
    if (mv <= floor.hard_floor) throw FloorBreach(mv, floor.hard_floor, t);
    out.resize(g);
    const bool half = p.k == 0.5;
    for (int a = 0; a < g.dim; ++a) {
        const AxisSpan ax(g, a);
        const double inv_h = 1.0 / g.h[a];
        const double eps = floor.eps_v;
        for (std::size_t base = 0; base < g.total; base += ax.block) {
            const double* __restrict vl = v.data() + base;
            const double* __restrict vr = vl + ax.s;
            double* __restrict q = out.comp[a].data() + base;
            if (half) {
                for (std::size_t j = 0; j < ax.left; ++j) {
                    const double vb = std::max(0.5 * (vl[j] + vr[j]), eps);
                    q[j] = p.chi / std::sqrt(vb) * ((vr[j] - vl[j]) * inv_h);
                }
            } else {
                for (std::size_t j = 0; j < ax.left; ++j) {
                    const double vb = std::max(0.5 * (vl[j] + vr[j]), eps);
                    q[j] = p.chi * std::pow(vb, -p.k) * ((vr[j] - vl[j]) * inv_h);
                }
            }
        }
    }
    // boundary entries are zero, so scanning whole components is harmless
    double max_abs = 0.0;
    for (int a = 0; a < g.dim; ++a) max_abs = std::max(max_abs, field_linf(out.comp[a]));
    out.max_abs = max_abs;
}

void chemo_divergence(const Field& u, const FaceVelocity& q, const Grid& g, Field& out) {
    out.assign(g.total, 0.0);
    std::vector<double> fbuf;
    for (int a = 0; a < g.dim; ++a) {
        const AxisSpan ax(g, a);
        const double inv_h = 1.0 / g.h[a];
        if (ax.s == 1) {
            const std::size_t n = ax.block;
            fbuf.assign(n + 1, 0.0);
            for (std::size_t base = 0; base < g.total; base += n) {
                const double* __restrict ur = u.data() + base;
                const double* __restrict qa = q.comp[a].data() + base;
                double* __restrict orow = out.data() + base;
                double* __restrict f = fbuf.data();
                for (std::size_t i = 1; i < n; ++i) {
                    const double qf = qa[i - 1];  // face between cells i-1 and i
                    f[i] = std::max(qf, 0.0) * ur[i - 1] + std::min(qf, 0.0) * ur[i];
                }
                for (std::size_t i = 0; i < n; ++i) orow[i] += (f[i + 1] - f[i]) * inv_h;
            }
        } else {
            for (std::size_t base = 0; base < g.total; base += ax.block)
                for (std::size_t off = 0; off < ax.left; off += ax.s) {
                    const double* __restrict ul = u.data() + base + off;
                    const double* __restrict ur = ul + ax.s;
                    const double* __restrict qa = q.comp[a].data() + base + off;
                    double* __restrict ol = out.data() + base + off;
                    double* __restrict orr = ol + ax.s;
                    for (std::size_t j = 0; j < ax.s; ++j) {
                        const double qf = qa[j];
                        const double flux =
                            (std::max(qf, 0.0) * ul[j] + std::min(qf, 0.0) * ur[j]) * inv_h;
                        ol[j] += flux;
                        orr[j] -= flux;
                    }
                }
        }
    }
}

namespace {

// out = (I - a*Lap) w
void apply_helmholtz(const Field& w, double a, const Grid& g, Field& out) {
    out = w;
    std::vector<double> fbuf;
    for (int axi = 0; axi < g.dim; ++axi) {
        const AxisSpan ax(g, axi);
        const double c_ax = a / (g.h[axi] * g.h[axi]);
        if (ax.s == 1) {
            const std::size_t n = ax.block;
            fbuf.assign(n + 1, 0.0);
            for (std::size_t base = 0; base < g.total; base += n) {
                const double* __restrict wr = w.data() + base;
                double* __restrict orow = out.data() + base;
                double* __restrict f = fbuf.data();
                for (std::size_t i = 1; i < n; ++i) f[i] = wr[i] - wr[i - 1];
                for (std::size_t i = 0; i < n; ++i) orow[i] -= (f[i + 1] - f[i]) * c_ax;
            }
        } else {
            for (std::size_t base = 0; base < g.total; base += ax.block)
                for (std::size_t off = 0; off < ax.left; off += ax.s) {
                    const double* __restrict wl = w.data() + base + off;
                    const double* __restrict wrp = wl + ax.s;
                    double* __restrict ol = out.data() + base + off;
                    double* __restrict orr = ol + ax.s;
                    for (std::size_t j = 0; j < ax.s; ++j) {
                        const double flux = (wrp[j] - wl[j]) * c_ax;
                        ol[j] -= flux;
                        orr[j] += flux;
                    }
                }
        }
    }
}

double dot(const Field& x, const Field& y) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= x.size(); i += 4) {
        s0 += x[i] * y[i];
        s1 += x[i + 1] * y[i + 1];
        s2 += x[i + 2] * y[i + 2];
        s3 += x[i + 3] * y[i + 3];
    }
    for (; i < x.size(); ++i) s0 += x[i] * y[i];
    return (s0 + s1) + (s2 + s3);
}

}  // namespace

HelmholtzStats helmholtz_solve(const Field& rhs, double a, const Grid& g, Field& w,
                               CgWorkspace& ws, double tol, int max_iters) {
    w = rhs;  // warm start; also reproduces constants (and the mean) exactly
    const double rhs_inf = field_linf(rhs);
    if (rhs_inf == 0.0) return {0, 0.0};
    const double target = tol * rhs_inf;

    ws.res.resize(g.total);
    ws.dir.resize(g.total);
    ws.adir.resize(g.total);

    apply_helmholtz(w, a, g, ws.res);
    double res_inf = 0.0;
    for (std::size_t i = 0; i < g.total; ++i) {
        ws.res[i] = rhs[i] - ws.res[i];
        res_inf = std::max(res_inf, std::fabs(ws.res[i]));
    }
    if (res_inf <= target) return {0, res_inf};
    ws.dir = ws.res;
    double rr = dot(ws.res, ws.res);

    for (int it = 1; it <= max_iters; ++it) {
        apply_helmholtz(ws.dir, a, g, ws.adir);
        const double denom = dot(ws.dir, ws.adir);
        if (!(denom > 0.0)) throw SolverFailure(it, res_inf);
        const double alpha = rr / denom;
        res_inf = 0.0;
        for (std::size_t i = 0; i < g.total; ++i) {
            w[i] += alpha * ws.dir[i];
            ws.res[i] -= alpha * ws.adir[i];
            res_inf = std::max(res_inf, std::fabs(ws.res[i]));
        }
        if (res_inf <= target) return {it, res_inf};
        const double rr_new = dot(ws.res, ws.res);
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t i = 0; i < g.total; ++i) ws.dir[i] = ws.res[i] + beta * ws.dir[i];
    }
    throw SolverFailure(max_iters, res_inf);
}

HelmholtzStats helmholtz_solve(const Field& rhs, double a, const Grid& g, Field& w, double tol,
                               int max_iters) {
    CgWorkspace ws;
    return helmholtz_solve(rhs, a, g, w, ws, tol, max_iters);
}

}  // namespace chtx
