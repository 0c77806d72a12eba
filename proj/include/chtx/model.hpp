#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "chtx/errors.hpp"

namespace chtx {

/// Model constants and domain geometry.
///
/// chi   chemotactic strength, > 0
/// r     growth rate, > 0
/// mu    quadratic damping, > 0
/// alpha signal decay, > 0
/// beta  signal secretion, > 0
/// k     sensitivity exponent, in (0,1)
/// dim   spatial dimension, 1..3
struct Params {
    double chi = 1.0;
    double r = 1.0;
    double mu = 1.0;
    double alpha = 1.0;
    double beta = 1.0;
    double k = 0.5;
    int dim = 1;
    std::array<double, 3> lengths{1.0, 1.0, 1.0};
    std::array<int, 3> cells{64, 1, 1};
};

/// Checks every positivity/range constraint; throws ValidationError naming
/// the first violated one.
Params validate_params(const Params& raw);

/// Spatially homogeneous equilibrium: ru - mu u^2 = 0, -alpha v + beta u = 0.
/// Returns (u*, v*) = (r/mu, beta r / (alpha mu)).
std::pair<double, double> steady_state(const Params& p);

/// Uniform cell-centered Cartesian mesh with row-major (last axis fastest)
/// storage. Cell centers sit at (i + 1/2) h per axis.
struct Grid {
    int dim = 1;
    std::array<int, 3> cells{1, 1, 1};        // padded with 1 beyond dim
    std::array<double, 3> lengths{1.0, 1.0, 1.0};
    std::array<double, 3> h{1.0, 1.0, 1.0};   // h = 1 beyond dim
    std::array<std::size_t, 3> stride{1, 1, 1};
    std::size_t total = 1;
    double cell_volume = 1.0;

    static Grid from_params(const Params& p);

    double volume() const { return lengths[0] * (dim > 1 ? lengths[1] : 1.0) * (dim > 2 ? lengths[2] : 1.0); }

    std::size_t index(int i0, int i1 = 0, int i2 = 0) const {
        return static_cast<std::size_t>(i0) * stride[0] +
               static_cast<std::size_t>(i1) * stride[1] +
               static_cast<std::size_t>(i2) * stride[2];
    }

    /// Center coordinate of cell i along axis a.
    double center(int a, int i) const { return (i + 0.5) * h[a]; }
};

/// Scalar cell field, flat row-major storage.
using Field = std::vector<double>;

double field_min(const Field& f);
double field_max(const Field& f);
double field_linf(const Field& f);
bool field_all_finite(const Field& f);

/// Midpoint quadrature: cell sum times cell volume.
double integrate(const Field& f, const Grid& g);

/// Solution snapshot advanced by the integrator. Invariants: min(u) >= 0,
/// min(v) > 0, all values finite.
struct State {
    Field u;
    Field v;
    double t = 0.0;
};

/// Throws ValidationError if the State invariants fail.
void validate_state(const State& s, const Grid& g);

/// Exponent pair for the monitored functionals. Constraints: p > 2 and
/// 1 <= q < p-1; the stronger eligibility flag additionally needs
/// p > max{dim, 1/(1-k), 1/k}.
struct FunctionalSpec {
    double p = 4.0;
    double q = 2.0;
    bool strong_eligible = false;  // p > max{dim, 1/(1-k), 1/k}
};

FunctionalSpec validate_functional_spec(double p, double q, const Params& params);

enum class IcKind { constant, gaussian_bump, random_smooth, from_snapshot };

/// Initial-condition recipe. Which fields apply depends on kind:
///   constant:      u0, v0
///   gaussian_bump: center (box fractions), width, amplitude, floor
///   random_smooth: amplitude, floor (seed passed separately)
///   from_snapshot: snapshot_path
struct IcSpec {
    IcKind kind = IcKind::constant;
    double u0 = 0.5;
    double v0 = 1.0;
    std::array<double, 3> center{0.5, 0.5, 0.5};
    double width = 0.15;
    double amplitude = 1.0;
    double floor = 0.1;
    std::string snapshot_path;
};

/// Number of discrete-Laplacian smoothing passes applied to random-smooth
/// noise so that gradients are grid-resolved.
inline constexpr int kSmoothingPasses = 5;

/// Builds a State satisfying u >= 0, integral(u) > 0, min(v) >= floor > 0.
/// random_smooth is bit-deterministic in `seed`.
State make_initial_condition(const IcSpec& spec, const Grid& grid, const Params& params,
                             std::uint64_t seed);

}  // namespace chtx
