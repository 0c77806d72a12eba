#include <doctest.h>

#include <cmath>
#include <random>

#include "chtx/model.hpp"
#include "chtx/operators.hpp"

using namespace chtx;

namespace {

constexpr double kPi = 3.14159265358979323846;

Params params_1d(int n, double len = 1.0) {
    Params p;
    p.chi = 1.0;
    p.r = 1.0;
    p.mu = 1.0;
    p.alpha = 1.0;
    p.beta = 1.0;
    p.k = 0.5;
    p.dim = 1;
    p.cells = {n, 1, 1};
    p.lengths = {len, 1.0, 1.0};
    return validate_params(p);
}

Params params_2d(int n) {
    Params p = params_1d(n);
    p.dim = 2;
    p.cells = {n, n, 1};
    p.lengths = {1.0, 1.0, 1.0};
    return validate_params(p);
}

// cell-centered cosine mode along axis 0; discrete Neumann eigenvector
Field cos_mode(const Grid& g, double len) {
    Field w(g.total);
    for (int i0 = 0; i0 < g.cells[0]; ++i0) {
        const double val = std::cos(kPi * g.center(0, i0) / len);
        for (std::size_t c = g.index(i0); c < g.index(i0) + g.stride[0]; ++c) w[c] = val;
    }
    return w;
}

// discrete eigenvalue of the cell-centered Neumann Laplacian for that mode
double lambda_h(double h, double len) {
    const double s = std::sin(kPi * h / (2.0 * len));
    return 4.0 * s * s / (h * h);
}

Field random_positive(const Grid& g, std::uint64_t seed, double lo, double hi) {
    std::mt19937_64 eng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    Field f(g.total);
    for (double& x : f) x = dist(eng);
    return f;
}

}  // namespace

TEST_CASE("laplacian of a constant is zero") {
    const Params p = params_2d(16);
    const Grid g = Grid::from_params(p);
    Field w(g.total, 4.75), out;
    laplacian_neumann(w, g, out);
    for (double x : out) CHECK(x == 0.0);
}

TEST_CASE("laplacian reproduces the discrete cosine eigenvalue exactly") {
    // The mirror closure is exact for cos(pi x / L) at cell centers, so the
    // operator acts as multiplication by -lambda_h up to roundoff.
    for (int n : {16, 64}) {
        const Params p = params_1d(n, 2.0);
        const Grid g = Grid::from_params(p);
        const Field w = cos_mode(g, 2.0);
        Field out;
        laplacian_neumann(w, g, out);
        const double lam = lambda_h(g.h[0], 2.0);
        for (std::size_t c = 0; c < g.total; ++c)
            CHECK(out[c] == doctest::Approx(-lam * w[c]).epsilon(1e-10));
    }
}

TEST_CASE("laplacian converges to the continuum eigenvalue at second order") {
    const double lam_exact = kPi * kPi;  // L = 1
    double err_prev = 0.0;
    for (int n : {32, 64}) {
        const double h = 1.0 / n;
        const double err = std::fabs(lambda_h(h, 1.0) - lam_exact);
        if (err_prev > 0.0) {
            const double ratio = err_prev / err;
            CHECK(ratio > 3.8);
            CHECK(ratio < 4.2);
        }
        err_prev = err;
    }
}

TEST_CASE("laplacian conserves mass by telescoping") {
    const Params p = params_2d(32);
    const Grid g = Grid::from_params(p);
    const Field w = random_positive(g, 11, 0.5, 2.5);
    Field out;
    laplacian_neumann(w, g, out);
    const double scale = field_linf(out);
    CHECK(std::fabs(integrate(out, g)) <= 1e-12 * std::max(scale, 1.0));
}

TEST_CASE("laplacian 2-D separates into axis modes") {
    const Params p = params_2d(24);
    const Grid g = Grid::from_params(p);
    Field w(g.total);
    for (int i = 0; i < g.cells[0]; ++i)
        for (int j = 0; j < g.cells[1]; ++j)
            w[g.index(i, j)] =
                std::cos(kPi * g.center(0, i)) * std::cos(2.0 * kPi * g.center(1, j));
    Field out;
    laplacian_neumann(w, g, out);
    // both factors are discrete eigenvectors; eigenvalues add
    const double s2 = std::sin(kPi * g.h[1]);  // half-angle of 2*pi*h/2
    const double lam = lambda_h(g.h[0], 1.0) + 4.0 * s2 * s2 / (g.h[1] * g.h[1]);
    for (std::size_t c = 0; c < g.total; ++c)
        CHECK(out[c] == doctest::Approx(-lam * w[c]).epsilon(1e-9));
}

TEST_CASE("max_face_gradient of a linear profile is the slope") {
    const Params p = params_1d(32);
    const Grid g = Grid::from_params(p);
    Field w(g.total);
    for (int i = 0; i < g.cells[0]; ++i) w[i] = 3.5 * g.center(0, i) + 1.0;
    CHECK(max_face_gradient(w, g) == doctest::Approx(3.5).epsilon(1e-13));

    Field c(g.total, 2.0);
    CHECK(max_face_gradient(c, g) == 0.0);
}

TEST_CASE("face_drift on a linear signal matches the closed form") {
    const int n = 64;
    Params p = params_1d(n);
    const Grid g = Grid::from_params(p);
    const double slope = 0.75;
    Field v(g.total);
    for (int i = 0; i < n; ++i) v[i] = 2.0 + slope * g.center(0, i);

    // raw k = 0 turns the sensitivity off: q = chi * slope at every face
    Params p0 = p;
    p0.k = 0.0;
    p0.chi = 1.5;
    FaceVelocity q;
    face_drift(v, g, p0, VFloorPolicy{}, q);
    for (int i = 0; i + 1 < n; ++i)
        CHECK(q.comp[0][i] == doctest::Approx(1.5 * slope).epsilon(1e-13));
    CHECK(q.comp[0][n - 1] == 0.0);  // boundary face
    CHECK(q.max_abs == doctest::Approx(1.5 * slope).epsilon(1e-13));

    // k = 1/2: q = chi * slope / sqrt(face mean of v)
    face_drift(v, g, p, VFloorPolicy{}, q);
    for (int i = 0; i + 1 < n; ++i) {
        const double vbar = 0.5 * (v[i] + v[i + 1]);
        CHECK(q.comp[0][i] == doctest::Approx(slope / std::sqrt(vbar)).epsilon(1e-13));
    }
}

TEST_CASE("face_drift clamps the sensitivity at eps_v") {
    const Params p = params_1d(8);
    const Grid g = Grid::from_params(p);
    Field v(g.total, 1e-11);  // above hard floor, below eps_v
    v[4] = 1e-10;
    VFloorPolicy fl;
    FaceVelocity q;
    face_drift(v, g, p, fl, q);
    // face mean between cells 3 and 4 is clipped to eps_v inside v^{-k}
    const double diff = (v[4] - v[3]) / g.h[0];
    CHECK(q.comp[0][3] == doctest::Approx(diff / std::sqrt(fl.eps_v)).epsilon(1e-12));
}

TEST_CASE("face_drift aborts below the hard floor") {
    const Params p = params_1d(8);
    const Grid g = Grid::from_params(p);
    Field v(g.total, 1.0);
    v[3] = 1e-13;
    FaceVelocity q;
    CHECK_THROWS_AS(face_drift(v, g, p, VFloorPolicy{}, q, 2.5), FloorBreach);
    try {
        face_drift(v, g, p, VFloorPolicy{}, q, 2.5);
    } catch (const FloorBreach& e) {
        CHECK(std::string(e.what()).find("v-floor breached") != std::string::npos);
        CHECK(e.time == 2.5);
    }
}

TEST_CASE("chemo divergence with unit density reduces to chi * laplacian of v") {
    const Params p = params_2d(32);
    const Grid g = Grid::from_params(p);
    const Field v = random_positive(g, 5, 1.0, 3.0);
    Field u(g.total, 1.0);

    Params p0 = p;
    p0.k = 0.0;  // raw: sensitivity off
    p0.chi = 2.0;
    FaceVelocity q;
    face_drift(v, g, p0, VFloorPolicy{}, q);
    Field adv, lap;
    chemo_divergence(u, q, g, adv);
    laplacian_neumann(v, g, lap);
    const double scale = field_linf(lap);
    for (std::size_t c = 0; c < g.total; ++c)
        CHECK(adv[c] == doctest::Approx(2.0 * lap[c]).epsilon(1e-11).scale(scale));
}

TEST_CASE("chemo divergence telescopes to zero total mass flux") {
    const Params p = params_2d(32);
    const Grid g = Grid::from_params(p);
    const Field v = random_positive(g, 6, 0.5, 2.0);
    const Field u = random_positive(g, 7, 0.0, 5.0);
    FaceVelocity q;
    face_drift(v, g, p, VFloorPolicy{}, q);
    Field adv;
    chemo_divergence(u, q, g, adv);
    const double scale = std::max(field_linf(adv), 1.0);
    CHECK(std::fabs(integrate(adv, g)) <= 1e-12 * scale);
}

TEST_CASE("upwind advection keeps u nonnegative under the advective CFL") {
    const Params p = params_2d(24);
    const Grid g = Grid::from_params(p);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const Field v = random_positive(g, 900 + seed, 0.2, 4.0);
        Field u = random_positive(g, 1900 + seed, 0.0, 3.0);
        u[seed % g.total] = 0.0;  // make sure zeros appear
        FaceVelocity q;
        face_drift(v, g, p, VFloorPolicy{}, q);
        Field adv;
        chemo_divergence(u, q, g, adv);
        const double dt = 0.5 * g.h[0] / (2.0 * g.dim * std::max(q.max_abs, 1e-300));
        double worst = 0.0;
        for (std::size_t c = 0; c < g.total; ++c)
            worst = std::min(worst, u[c] - dt * adv[c]);
        CHECK(worst >= -1e-15);
    }
}

TEST_CASE("helmholtz solve is exact for constants") {
    const Params p = params_2d(16);
    const Grid g = Grid::from_params(p);
    Field rhs(g.total, 3.0), w;
    const HelmholtzStats st = helmholtz_solve(rhs, 0.07, g, w);
    CHECK(st.iterations == 0);
    for (double x : w) CHECK(x == 3.0);
}

TEST_CASE("helmholtz solve matches the discrete eigenmode solution") {
    const int n = 64;
    const Params p = params_1d(n);
    const Grid g = Grid::from_params(p);
    const Field mode = cos_mode(g, 1.0);
    const double a = 0.013;
    const double denom = 1.0 + a * lambda_h(g.h[0], 1.0);
    Field rhs(g.total);
    for (std::size_t c = 0; c < g.total; ++c) rhs[c] = 2.0 + mode[c];
    Field w;
    helmholtz_solve(rhs, a, g, w);
    // (I - a*Lap)^{-1} leaves the constant part alone and scales the mode
    for (std::size_t c = 0; c < g.total; ++c)
        CHECK(w[c] == doctest::Approx(2.0 + mode[c] / denom).epsilon(1e-8));
}

TEST_CASE("helmholtz solve drives the residual below tolerance") {
    const Params p = params_2d(32);
    const Grid g = Grid::from_params(p);
    const Field rhs = random_positive(g, 21, -1.0, 2.0);
    Field w;
    const double a = 0.05;
    const HelmholtzStats st = helmholtz_solve(rhs, a, g, w);
    CHECK(st.iterations > 0);
    CHECK(st.residual <= 1e-10 * field_linf(rhs));

    // residual recomputed independently from the 5-point stencil
    Field lap;
    laplacian_neumann(w, g, lap);
    double res = 0.0;
    for (std::size_t c = 0; c < g.total; ++c)
        res = std::max(res, std::fabs(rhs[c] - (w[c] - a * lap[c])));
    CHECK(res <= 1e-9 * field_linf(rhs));
}

TEST_CASE("helmholtz solve preserves the mean") {
    const Params p = params_2d(32);
    const Grid g = Grid::from_params(p);
    const Field rhs = random_positive(g, 22, 0.5, 1.5);
    Field w;
    helmholtz_solve(rhs, 0.2, g, w);
    CHECK(integrate(w, g) == doctest::Approx(integrate(rhs, g)).epsilon(1e-10));
}

TEST_CASE("helmholtz solve reports non-convergence") {
    const Params p = params_2d(16);
    const Grid g = Grid::from_params(p);
    const Field rhs = random_positive(g, 23, 0.0, 1.0);
    Field w;
    CHECK_THROWS_AS(helmholtz_solve(rhs, 0.5, g, w, 1e-14, 1), SolverFailure);
    try {
        helmholtz_solve(rhs, 0.5, g, w, 1e-14, 1);
    } catch (const SolverFailure& e) {
        CHECK(std::string(e.what()).find("did not converge") != std::string::npos);
        CHECK(e.iterations == 1);
    }
}
