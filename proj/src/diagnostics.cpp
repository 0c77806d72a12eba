#include "chtx/diagnostics.hpp"

#include <cmath>
#include <limits>

#include "chtx/operators.hpp"

namespace chtx {

namespace {

// |grad w|^2 per cell: each component is the mean of the two adjacent face
// gradients (boundary faces contribute zero under the mirror closure).
Field cell_grad_sq(const Field& w, const Grid& g) {
    Field out(g.total, 0.0);
    const int n0 = g.cells[0], n1 = g.cells[1], n2 = g.cells[2];
    for (int i0 = 0; i0 < n0; ++i0)
        for (int i1 = 0; i1 < n1; ++i1)
            for (int i2 = 0; i2 < n2; ++i2) {
                const std::size_t c = g.index(i0, i1, i2);
                const int idx[3] = {i0, i1, i2};
                double s = 0.0;
                for (int a = 0; a < g.dim; ++a) {
                    const double inv_h = 1.0 / g.h[a];
                    const double gl =
                        idx[a] > 0 ? (w[c] - w[c - g.stride[a]]) * inv_h : 0.0;
                    const double gr =
                        idx[a] < g.cells[a] - 1 ? (w[c + g.stride[a]] - w[c]) * inv_h : 0.0;
                    const double ga = 0.5 * (gl + gr);
                    s += ga * ga;
                }
                out[c] = s;
            }
    return out;
}

void require_finite(double x, const char* name) {
    if (!std::isfinite(x)) throw DiagnosticOverflow(name);
}

}  // namespace

DiagRecord eval_record(const State& s, const Grid& g, const FunctionalSpec& spec,
                       const Params& params, double dt, long long step) {
    DiagRecord rec;
    rec.t = s.t;
    rec.dt = dt;
    rec.step = step;

    double sum_u = 0.0, sum_v = 0.0;
    double max_u = 0.0, max_v = 0.0;
    double min_v = std::numeric_limits<double>::infinity();
    double sum_up = 0.0, sum_up_vq = 0.0, sum_vp1 = 0.0;
    const double p = spec.p, q = spec.q;
    for (std::size_t c = 0; c < g.total; ++c) {
        const double u = s.u[c], v = s.v[c];
        sum_u += u;
        sum_v += v;
        const double au = std::fabs(u), av = std::fabs(v);
        if (au > max_u) max_u = au;
        if (av > max_v) max_v = av;
        if (v < min_v) min_v = v;
        const double up = std::pow(u, p);
        sum_up += up;
        sum_up_vq += up * std::pow(v, -q);
        sum_vp1 += std::pow(v, p + 1.0);
    }
    rec.mass_u = sum_u * g.cell_volume;
    rec.mass_v = sum_v * g.cell_volume;
    rec.linf_u = max_u;
    rec.linf_v = max_v;
    rec.min_v = min_v;
    rec.linf_grad_v = max_face_gradient(s.v, g);
    rec.y_pq = (sum_up + sum_up_vq) * g.cell_volume;
    rec.h_pq = rec.y_pq + sum_vp1 * g.cell_volume;

    if (spec.strong_eligible) {
        const Field gsq = cell_grad_sq(s.v, g);
        double acc = 0.0;
        const double kp = params.k * p;
        for (std::size_t c = 0; c < g.total; ++c)
            acc += std::pow(s.u[c], p) * std::pow(gsq[c], 0.5 * p) * std::pow(s.v[c], -kp);
        rec.sing_p = acc * g.cell_volume;
    }

    require_finite(rec.mass_u, "mass_u");
    require_finite(rec.mass_v, "mass_v");
    require_finite(rec.linf_u, "linf_u");
    require_finite(rec.linf_v, "linf_v");
    require_finite(rec.min_v, "min_v");
    require_finite(rec.linf_grad_v, "linf_grad_v");
    require_finite(rec.y_pq, "y_pq");
    require_finite(rec.h_pq, "h_pq");
    require_finite(rec.sing_p, "sing_p");
    return rec;
}

double mass_bound_c1(const Params& p, const Grid& g, double u0_mass) {
    return std::max(p.r * g.volume() / p.mu, u0_mass);
}

CheckResult check_mass_bound(const std::vector<DiagRecord>& records, const Params& p,
                             const Grid& g, double u0_mass) {
    const double c1 = mass_bound_c1(p, g, u0_mass);
    CheckResult res;
    res.worst_margin = std::numeric_limits<double>::infinity();
    for (const DiagRecord& rec : records) {
        const double tol = 1e-6 + 2.0 * rec.dt * p.r;
        const double margin = c1 * (1.0 + tol) - rec.mass_u;
        if (margin < res.worst_margin) res.worst_margin = margin;
        if (margin < 0.0 && res.pass) {
            res.pass = false;
            res.first_violation_t = rec.t;
        }
    }
    if (records.empty()) res.worst_margin = 0.0;
    return res;
}

CheckResult check_v_floor(const std::vector<DiagRecord>& records, const Params& p,
                          double v0_min, double tol) {
    CheckResult res;
    res.worst_margin = std::numeric_limits<double>::infinity();
    for (const DiagRecord& rec : records) {
        const double floor_t = std::exp(-p.alpha * rec.t) * v0_min * (1.0 - tol);
        const double margin = rec.min_v - floor_t;
        if (margin < res.worst_margin) res.worst_margin = margin;
        if (margin < 0.0 && res.pass) {
            res.pass = false;
            res.first_violation_t = rec.t;
        }
    }
    if (records.empty()) res.worst_margin = 0.0;
    return res;
}

InequalityEntry lemma24_ratio(const Field& w, double p, const Grid& g) {
    if (w.size() != g.total) throw ValidationError("field size does not match grid");
    if (!(p > 1.0)) throw ValidationError("p must exceed 1");
    if (!(field_min(w) > 0.0)) throw ValidationError("w must be strictly positive");

    InequalityEntry e;
    e.p = p;
    const Field gsq = cell_grad_sq(w, g);
    Field lap;
    laplacian_neumann(w, g, lap);
    double lhs = 0.0, rlap = 0.0, rmass = 0.0;
    for (std::size_t c = 0; c < g.total; ++c) {
        const double wp = std::pow(w[c], p);
        lhs += std::pow(gsq[c], p) / wp;  // |grad w|^{2p} = (|grad w|^2)^p
        rlap += std::pow(std::fabs(lap[c]), p);
        rmass += wp;
    }
    e.lhs = lhs * g.cell_volume;
    e.rhs_lap = rlap * g.cell_volume;
    e.rhs_mass = rmass * g.cell_volume;
    e.ratio = e.lhs / (e.rhs_lap + e.rhs_mass);
    return e;
}

std::string to_string(BoundednessClass c) {
    switch (c) {
        case BoundednessClass::bounded: return "bounded";
        case BoundednessClass::growing: return "growing";
        case BoundednessClass::aborted: return "aborted";
        case BoundednessClass::inconclusive: return "inconclusive";
    }
    return "unknown";
}

BoundednessClass classify_boundedness(const std::vector<DiagRecord>& records, bool completed,
                                      double window_fraction, double growth_tol) {
    if (!completed) return BoundednessClass::aborted;
    const std::size_t n = records.size();
    if (n < 10) return BoundednessClass::inconclusive;
    std::size_t w = static_cast<std::size_t>(window_fraction * static_cast<double>(n));
    if (w < 1) w = 1;
    double last = 0.0, prev = 0.0;
    for (std::size_t i = n - w; i < n; ++i) last = std::max(last, records[i].linf_u);
    for (std::size_t i = n - 2 * w; i < n - w; ++i) prev = std::max(prev, records[i].linf_u);
    return last > growth_tol * prev ? BoundednessClass::growing : BoundednessClass::bounded;
}

}  // namespace chtx
