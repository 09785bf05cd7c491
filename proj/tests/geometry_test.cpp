#include <doctest.h>

#include <cmath>
#include <random>

#include "wavelab/geometry.hpp"

using namespace wavelab;

namespace {

Metric bumpy2() {
    // g*_xx = 1 + 0.2x + 0.1y, g*_yy = 1.5 - 0.1x + 0.05y
    std::array<Vec3, 3> slope{};
    slope[0] = {0.2, 0.1, 0.0};
    slope[1] = {-0.1, 0.05, 0.0};
    return Metric::diag_linear(2, {1.0, 1.5, 1.0}, slope);
}

}  // namespace

TEST_CASE("flat metric basics") {
    Metric m = Metric::flat(2);
    Vec3 x{0.3, -0.2, 0.0};
    Vec3 gs = m.g_star_diag(x);
    CHECK(gs[0] == 1.0);
    CHECK(gs[1] == 1.0);
    CHECK(m.sqrt_det_g(x) == doctest::Approx(1.0));
    Vec3 d = m.d_gstar_diag(x, 0);
    CHECK(d[0] == doctest::Approx(0.0));
}

TEST_CASE("diag-linear dual pair is consistent") {
    Metric m = bumpy2();
    Vec3 x{0.4, 0.7, 0.0};
    Vec3 gs = m.g_star_diag(x);
    Vec3 g = m.g_diag(x);
    for (int i = 0; i < 2; ++i) CHECK(g[i] * gs[i] == doctest::Approx(1.0));
    CHECK(m.sqrt_det_g(x) == doctest::Approx(1.0 / std::sqrt(gs[0] * gs[1])));
}

TEST_CASE("metric derivative matches a finite-difference oracle") {
    Metric m = bumpy2();
    Vec3 x{0.1, -0.3, 0.0};
    const double e = 1e-6;
    for (int axis = 0; axis < 2; ++axis) {
        Vec3 xp = x, xm = x;
        xp[axis] += e;
        xm[axis] -= e;
        Vec3 num{};
        Vec3 gp = m.g_star_diag(xp), gm = m.g_star_diag(xm);
        for (int i = 0; i < 2; ++i) num[i] = (gp[i] - gm[i]) / (2 * e);
        Vec3 got = m.d_gstar_diag(x, axis);
        for (int i = 0; i < 2; ++i) CHECK(got[i] == doctest::Approx(num[i]).epsilon(1e-6));
    }
}

TEST_CASE("symbol and Hamilton field agree with finite differences") {
    Metric m = bumpy2();
    PhasePoint pp;
    pp.x = {0.2, {0.3, -0.1, 0.0}};
    pp.zeta = {-1.1, {0.8, 0.4, 0.0}};

    HamiltonRate r = hamiltonian_field(m, pp);
    // dx/dtheta = dp/dzeta, dzeta/dtheta = -dp/dx, numerically.
    const double e = 1e-6;
    auto p_at = [&](double tau, Vec3 xi, Vec3 x) {
        PhasePoint q;
        q.x = {pp.x.t, x};
        q.zeta = {tau, xi};
        return symbol_p(m, q);
    };
    double dpdtau =
        (p_at(pp.zeta.tau + e, pp.zeta.xi, pp.x.x) - p_at(pp.zeta.tau - e, pp.zeta.xi, pp.x.x)) /
        (2 * e);
    CHECK(r.dx.t == doctest::Approx(dpdtau).epsilon(1e-7));
    for (int i = 0; i < 2; ++i) {
        Vec3 xp = pp.zeta.xi, xm = pp.zeta.xi;
        xp[i] += e;
        xm[i] -= e;
        double d = (p_at(pp.zeta.tau, xp, pp.x.x) - p_at(pp.zeta.tau, xm, pp.x.x)) / (2 * e);
        CHECK(r.dx.x[i] == doctest::Approx(d).epsilon(1e-6));
        Vec3 yp = pp.x.x, ym = pp.x.x;
        yp[i] += e;
        ym[i] -= e;
        double dx = (p_at(pp.zeta.tau, pp.zeta.xi, yp) - p_at(pp.zeta.tau, pp.zeta.xi, ym)) /
                    (2 * e);
        CHECK(r.dzeta.xi[i] == doctest::Approx(-dx).epsilon(1e-6));
    }
    CHECK(r.dzeta.tau == 0.0);  // time-independent metric
}

TEST_CASE("null lift produces a forward null covector") {
    Metric m = bumpy2();
    SpacetimePoint x{0.0, {0.25, 0.5, 0.0}};
    Vec3 xi{1.0, 2.0, 0.0};
    PhasePoint pp = null_lift(m, x, xi, Orientation::Forward);
    CHECK(std::abs(symbol_p(m, pp)) < 1e-12 * m.hat_dual_sq(x.x, pp.zeta));
    CHECK(pp.zeta.tau < 0.0);  // dt/dtheta = -2 tau > 0
    HamiltonRate r = hamiltonian_field(m, pp);
    CHECK(r.dx.t > 0.0);

    PhasePoint pb = null_lift(m, x, xi, Orientation::Backward);
    CHECK(hamiltonian_field(m, pb).dx.t < 0.0);

    CHECK_THROWS_AS(null_lift(m, x, Vec3{0, 0, 0}, Orientation::Forward), ZeroCovector);
}

TEST_CASE("lorentz and hat forms match their definitions") {
    Metric m = bumpy2();
    Vec3 x{-0.2, 0.6, 0.0};
    Covector z1{-0.7, {0.3, 1.2, 0.0}};
    Covector z2{0.4, {-0.5, 0.9, 0.0}};
    double want = -z1.tau * z2.tau + m.gstar_quad(x, z1.xi, z2.xi);
    CHECK(m.lorentz_dual(x, z1, z2) == doctest::Approx(want).epsilon(1e-14));
    double hat = z1.tau * z1.tau + m.gstar_quad(x, z1.xi, z1.xi);
    CHECK(m.hat_dual_sq(x, z1) == doctest::Approx(hat).epsilon(1e-14));
    SpacetimeVec v{0.9, {0.2, -0.4, 0.0}};
    double lt = -v.t * v.t + m.g_quad(x, v.x, v.x);
    CHECK(m.lorentz_tangent_sq(x, v) == doctest::Approx(lt).epsilon(1e-14));
}

TEST_CASE("sampled metric reproduces its generator") {
    // Sample the bumpy metric on a grid, then compare interpolation to truth.
    Metric truth = bumpy2();
    const int n = 41;
    const double h = 0.05;
    Vec3 origin{-1.0, -1.0, 0.0};
    std::vector<Vec3> data(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            Vec3 x{origin[0] + i * h, origin[1] + j * h, 0.0};
            data[static_cast<std::size_t>(j) * n + i] = truth.g_star_diag(x);
        }
    Metric m = Metric::sampled(2, origin, h, {n, n, 1}, std::move(data));

    // Exact at nodes; exact everywhere inside since the generator is affine
    // and the interpolation is multilinear.
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(-0.95, 0.95);
    for (int k = 0; k < 50; ++k) {
        Vec3 x{U(rng), U(rng), 0.0};
        Vec3 a = m.g_star_diag(x), b = truth.g_star_diag(x);
        for (int i = 0; i < 2; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
    }
    CHECK_THROWS_AS(m.g_star_diag(Vec3{1.5, 0.0, 0.0}), OutOfDomain);
}

TEST_CASE("c_max over a box bounds the sampled wave speeds") {
    Metric m = bumpy2();
    double c = m.c_max_over_box({-1, -1, 0}, {1, 1, 0});
    // Largest diagonal entry of g* over the box: g*_yy at (-1, 1) is 1.65.
    CHECK(c == doctest::Approx(std::sqrt(1.65)).epsilon(1e-6));
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int k = 0; k < 100; ++k) {
        Vec3 x{U(rng), U(rng), 0.0};
        Vec3 gs = m.g_star_diag(x);
        CHECK(std::sqrt(std::max(gs[0], gs[1])) <= c + 1e-9);
    }
}
