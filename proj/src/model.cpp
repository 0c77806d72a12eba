#include "chtx/model.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace chtx {

Params validate_params(const Params& raw) {
    if (!(raw.chi > 0.0)) throw ValidationError("chi must be positive");
    if (!(raw.r > 0.0)) throw ValidationError("r must be positive");
    if (!(raw.mu > 0.0)) throw ValidationError("mu must be positive");
    if (!(raw.alpha > 0.0)) throw ValidationError("alpha must be positive");
    if (!(raw.beta > 0.0)) throw ValidationError("beta must be positive");
    if (!(raw.k > 0.0 && raw.k < 1.0)) throw ValidationError("k must lie in (0,1)");
    if (raw.dim < 1 || raw.dim > 3) throw ValidationError("dim must be 1, 2, or 3");
    for (int a = 0; a < raw.dim; ++a) {
        if (!(raw.lengths[a] > 0.0))
            throw ValidationError("length along axis " + std::to_string(a) + " must be positive");
    }
    for (int a = 0; a < raw.dim; ++a) {
        if (raw.cells[a] < 4)
            throw ValidationError("cells along axis " + std::to_string(a) +
                                  " must be at least 4");
    }
    return raw;
}

std::pair<double, double> steady_state(const Params& p) {
    const double ustar = p.r / p.mu;
    const double vstar = p.beta * ustar / p.alpha;
    return {ustar, vstar};
}

Grid Grid::from_params(const Params& p) {
    Grid g;
    g.dim = p.dim;
    g.total = 1;
    for (int a = 0; a < 3; ++a) {
        if (a < p.dim) {
            g.cells[a] = p.cells[a];
            g.lengths[a] = p.lengths[a];
            g.h[a] = p.lengths[a] / p.cells[a];
        } else {
            g.cells[a] = 1;
            g.lengths[a] = 1.0;
            g.h[a] = 1.0;
        }
        g.total *= static_cast<std::size_t>(g.cells[a]);
    }
    // row-major: last axis fastest
    g.stride[2] = 1;
    g.stride[1] = static_cast<std::size_t>(g.cells[2]);
    g.stride[0] = static_cast<std::size_t>(g.cells[1]) * g.cells[2];
    g.cell_volume = 1.0;
    for (int a = 0; a < p.dim; ++a) g.cell_volume *= g.h[a];
    return g;
}

// The reductions below use four independent accumulators so the loop is not
// serialized on one dependency chain; min/max results are order-independent.

double field_min(const Field& f) {
    const double inf = std::numeric_limits<double>::infinity();
    double m0 = inf, m1 = inf, m2 = inf, m3 = inf;
    std::size_t i = 0;
    for (; i + 4 <= f.size(); i += 4) {
        m0 = std::min(m0, f[i]);
        m1 = std::min(m1, f[i + 1]);
        m2 = std::min(m2, f[i + 2]);
        m3 = std::min(m3, f[i + 3]);
    }
    for (; i < f.size(); ++i) m0 = std::min(m0, f[i]);
    return std::min(std::min(m0, m1), std::min(m2, m3));
}

double field_max(const Field& f) {
    const double inf = std::numeric_limits<double>::infinity();
    double m0 = -inf, m1 = -inf, m2 = -inf, m3 = -inf;
    std::size_t i = 0;
    for (; i + 4 <= f.size(); i += 4) {
        m0 = std::max(m0, f[i]);
        m1 = std::max(m1, f[i + 1]);
        m2 = std::max(m2, f[i + 2]);
        m3 = std::max(m3, f[i + 3]);
    }
    for (; i < f.size(); ++i) m0 = std::max(m0, f[i]);
    return std::max(std::max(m0, m1), std::max(m2, m3));
}

double field_linf(const Field& f) {
    double m0 = 0.0, m1 = 0.0, m2 = 0.0, m3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= f.size(); i += 4) {
        m0 = std::max(m0, std::fabs(f[i]));
        m1 = std::max(m1, std::fabs(f[i + 1]));
        m2 = std::max(m2, std::fabs(f[i + 2]));
        m3 = std::max(m3, std::fabs(f[i + 3]));
    }
    for (; i < f.size(); ++i) m0 = std::max(m0, std::fabs(f[i]));
    return std::max(std::max(m0, m1), std::max(m2, m3));
}

bool field_all_finite(const Field& f) {
    for (double x : f)
        if (!std::isfinite(x)) return false;
    return true;
}

double integrate(const Field& f, const Grid& g) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= f.size(); i += 4) {
        s0 += f[i];
        s1 += f[i + 1];
        s2 += f[i + 2];
        s3 += f[i + 3];
    }
    for (; i < f.size(); ++i) s0 += f[i];
    return ((s0 + s1) + (s2 + s3)) * g.cell_volume;
}

void validate_state(const State& s, const Grid& g) {
    if (s.u.size() != g.total || s.v.size() != g.total)
        throw ValidationError("state field size does not match grid");
    if (!field_all_finite(s.u) || !field_all_finite(s.v))
        throw ValidationError("state contains non-finite values");
    if (field_min(s.u) < 0.0) throw ValidationError("u must be nonnegative");
    if (!(field_min(s.v) > 0.0)) throw ValidationError("v must be strictly positive");
    if (!(s.t >= 0.0)) throw ValidationError("t must be nonnegative");
}

FunctionalSpec validate_functional_spec(double p, double q, const Params& params) {
    if (!(p > 2.0)) throw ValidationError("p must exceed 2");
    if (!(q >= 1.0)) throw ValidationError("q must be at least 1");
    if (!(q < p - 1.0)) throw ValidationError("q must be less than p-1");
    FunctionalSpec spec;
    spec.p = p;
    spec.q = q;
    const double bound =
        std::max({static_cast<double>(params.dim), 1.0 / (1.0 - params.k), 1.0 / params.k});
    spec.strong_eligible = p > bound;
    return spec;
}

namespace {

// Deterministic uniform double in [0,1) from the raw engine word; the
// distribution classes are implementation-defined, this mapping is not.
double uniform01(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// One Jacobi smoothing pass with mirrored (Neumann) closure.
void smooth_pass(Field& w, const Grid& g, Field& tmp) {
    const int n0 = g.cells[0], n1 = g.cells[1], n2 = g.cells[2];
    const double inv2d = 1.0 / (2.0 * g.dim);
    for (int i0 = 0; i0 < n0; ++i0)
        for (int i1 = 0; i1 < n1; ++i1)
            for (int i2 = 0; i2 < n2; ++i2) {
                const std::size_t c = g.index(i0, i1, i2);
                double nb = 0.0;
                const int idx[3] = {i0, i1, i2};
                for (int a = 0; a < g.dim; ++a) {
                    const std::size_t left = idx[a] > 0 ? c - g.stride[a] : c;
                    const std::size_t right = idx[a] < g.cells[a] - 1 ? c + g.stride[a] : c;
                    nb += w[left] + w[right];
                }
                tmp[c] = 0.5 * w[c] + 0.5 * nb * inv2d;
            }
    w.swap(tmp);
}

Field smoothed_noise(std::mt19937_64& eng, const Grid& g) {
    Field w(g.total);
    for (std::size_t c = 0; c < g.total; ++c) w[c] = 2.0 * uniform01(eng) - 1.0;
    Field tmp(g.total);
    for (int pass = 0; pass < kSmoothingPasses; ++pass) smooth_pass(w, g, tmp);
    return w;
}

// Shift/scale to [floor, floor + amplitude].
void normalize_to_floor(Field& w, double floor, double amplitude) {
    const double lo = field_min(w), hi = field_max(w);
    const double range = hi - lo;
    if (range < 1e-300) {
        for (double& x : w) x = floor + 0.5 * amplitude;
        return;
    }
    for (double& x : w) x = floor + amplitude * ((x - lo) / range);
}

}  // namespace

State make_initial_condition(const IcSpec& spec, const Grid& grid, const Params& params,
                             std::uint64_t seed) {
    (void)params;
    State s;
    s.t = 0.0;
    switch (spec.kind) {
        case IcKind::constant: {
            if (!(spec.u0 > 0.0))
                throw ValidationError("constant initial u0 must be positive (needs positive mass)");
            if (!(spec.v0 > 0.0)) throw ValidationError("constant initial v0 must be positive");
            s.u.assign(grid.total, spec.u0);
            s.v.assign(grid.total, spec.v0);
            break;
        }
        case IcKind::gaussian_bump: {
            if (!(spec.amplitude > 0.0)) throw ValidationError("bump amplitude must be positive");
            if (!(spec.width > 0.0)) throw ValidationError("bump width must be positive");
            if (!(spec.floor > 0.0)) throw ValidationError("bump floor must be positive");
            s.u.resize(grid.total);
            s.v.resize(grid.total);
            const double inv2w2 = 1.0 / (2.0 * spec.width * spec.width);
            const int n0 = grid.cells[0], n1 = grid.cells[1], n2 = grid.cells[2];
            for (int i0 = 0; i0 < n0; ++i0)
                for (int i1 = 0; i1 < n1; ++i1)
                    for (int i2 = 0; i2 < n2; ++i2) {
                        const int idx[3] = {i0, i1, i2};
                        double r2 = 0.0;
                        for (int a = 0; a < grid.dim; ++a) {
                            const double d =
                                grid.center(a, idx[a]) - spec.center[a] * grid.lengths[a];
                            r2 += d * d;
                        }
                        const double bump = spec.amplitude * std::exp(-r2 * inv2w2);
                        const std::size_t c = grid.index(i0, i1, i2);
                        s.u[c] = spec.floor + bump;
                        s.v[c] = spec.floor + bump;
                    }
            break;
        }
        case IcKind::random_smooth: {
            if (!(spec.amplitude > 0.0)) throw ValidationError("noise amplitude must be positive");
            if (!(spec.floor > 0.0)) throw ValidationError("noise floor must be positive");
            std::mt19937_64 eng(seed);
            s.u = smoothed_noise(eng, grid);
            s.v = smoothed_noise(eng, grid);
            normalize_to_floor(s.u, spec.floor, spec.amplitude);
            normalize_to_floor(s.v, spec.floor, spec.amplitude);
            break;
        }
        case IcKind::from_snapshot:
            // File access lives in the io layer; see load_initial_state there.
            throw ValidationError("from-snapshot initial conditions are resolved by the io layer");
    }
    validate_state(s, grid);
    if (!(integrate(s.u, grid) > 0.0))
        throw ValidationError("initial u must have positive mass");
    return s;
}

}  // namespace chtx
