#include <doctest.h>

#include <cmath>
#include <random>

#include "wavelab/solver.hpp"

using namespace wavelab;

namespace {

const double pi = 3.14159265358979323846;

GridSpec periodic_grid(int n, double t_end, double cfl = 0.45) {
    Metric m = Metric::flat(2);
    return GridSpec::make(2, {0, 0, 0}, {2, 2, 0}, {n, n, 1}, t_end, cfl, m);
}

SolverConfig periodic_cfg() {
    SolverConfig cfg;
    cfg.boundary = SolverConfig::Boundary::Periodic;
    cfg.sponge_width = 0;
    return cfg;
}

/// Two crossing beams on [-1,1]^2, interface {x=0}, jump alpha.
Problem small_scene(double alpha, int n = 96, double t_end = 1.0) {
    Problem p;
    p.metric = Metric::flat(2);
    p.grid = GridSpec::make(2, {-1, -1, 0}, {2, 2, 0}, {n, n, 1}, t_end, 0.45, p.metric);
    p.cfg.sponge_width = 10;
    p.cfg.sponge_strength = 60.0;

    auto mk = [&](double y, double dy) {
        SourceSpec s;
        s.p_launch = {0.0, {-0.45, y, 0.0}};
        s.zeta = null_lift(p.metric, s.p_launch, {2.0, dy, 0.0}, Orientation::Forward).zeta;
        s.s0 = 0.04;
        s.omega = 40.0;
        s.sigma = 0.05;
        return s;
    };
    p.src1 = mk(-0.2, 1.0);
    p.src2 = mk(0.2, -1.0);
    p.coeff.iface = InterfaceSpec::plane({1, 0, 0}, 0.0, 2);
    p.coeff.alpha = alpha;
    return p;
}

}  // namespace

TEST_CASE("discrete laplacian is exact on quadratics away from the boundary") {
    Metric m = Metric::flat(2);
    GridSpec g = periodic_grid(32, 0.1);
    SolverConfig cfg;  // Dirichlet-backed sponge faces; interior unaffected
    std::vector<double> u(g.cells());
    for (std::size_t c = 0; c < u.size(); ++c) {
        Vec3 x = g.cell_center(c);
        u[c] = x[0] * x[0] + x[1] * x[1];
    }
    std::vector<double> out;
    apply_laplacian_flux(g, m, cfg, u, out);
    for (int j = 2; j < 30; ++j)
        for (int i = 2; i < 30; ++i)
            CHECK(out[g.index(i, j)] == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("weighted laplacian is symmetric to round-off") {
    std::array<Vec3, 3> slope{};
    slope[0] = {0.2, 0.1, 0.0};
    slope[1] = {-0.1, 0.05, 0.0};
    Metric m = Metric::diag_linear(2, {1.0, 1.5, 1.0}, slope);
    GridSpec g = GridSpec::make(2, {-1, -1, 0}, {2, 2, 0}, {24, 24, 1}, 0.1, 0.45, m);

    std::mt19937 rng(11);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (auto boundary : {SolverConfig::Boundary::Sponge, SolverConfig::Boundary::Periodic}) {
        SolverConfig cfg;
        cfg.boundary = boundary;
        std::vector<double> u(g.cells()), v(g.cells());
        for (auto& x : u) x = U(rng);
        for (auto& x : v) x = U(rng);
        std::vector<double> Lu, Lv;
        apply_laplacian_flux(g, m, cfg, u, Lu);
        apply_laplacian_flux(g, m, cfg, v, Lv);
        double a = 0.0, b = 0.0, scale = 0.0;
        for (std::size_t c = 0; c < u.size(); ++c) {
            double w = m.sqrt_det_g(g.cell_center(c));
            a += w * Lu[c] * v[c];
            b += w * u[c] * Lv[c];
            scale += std::abs(w * Lu[c] * v[c]);
        }
        CHECK(std::abs(a - b) < 1e-12 * std::max(scale, 1.0));
    }
}

TEST_CASE("manufactured solution converges at second order") {
    // u = cos(t) sin(pi x) sin(pi y), f = u_tt - lap u = (2 pi^2 - 1) u.
    auto error_at = [&](int n) {
        Metric m = Metric::flat(2);
        GridSpec g = periodic_grid(n, 0.5);
        SolverConfig cfg = periodic_cfg();
        auto exact = [&](double t, const Vec3& x) {
            return std::cos(t) * std::sin(pi * x[0]) * std::sin(pi * x[1]);
        };
        CauchyData init;
        init.u0.resize(g.cells());
        init.u1.assign(g.cells(), 0.0);
        for (std::size_t c = 0; c < init.u0.size(); ++c)
            init.u0[c] = exact(0.0, g.cell_center(c));
        std::vector<double> fbuf(g.cells());
        SourceFn src = [&](int k) {
            double t = k * g.dt;
            for (std::size_t c = 0; c < fbuf.size(); ++c)
                fbuf[c] = (2.0 * pi * pi - 1.0) * exact(t, g.cell_center(c));
            return fbuf.data();
        };
        WaveField u = solve_linear(g, m, cfg, &init, src);
        const auto& last = u.slices.back();
        double tN = g.n_t * g.dt;
        std::vector<double> err(g.cells());
        for (std::size_t c = 0; c < err.size(); ++c)
            err[c] = last[c] - exact(tN, g.cell_center(c));
        return slice_l2(g, m, err);
    };
    double e1 = error_at(32), e2 = error_at(64), e3 = error_at(128);
    double o1 = std::log2(e1 / e2), o2 = std::log2(e2 / e3);
    CHECK(o1 > 1.7);
    CHECK(o1 < 2.3);
    CHECK(o2 > 1.7);
    CHECK(o2 < 2.3);
}

TEST_CASE("linear energy stays flat over a long periodic run") {
    Metric m = Metric::flat(2);
    GridSpec g = periodic_grid(96, 1.0, 0.3);
    g.n_t = 1010;  // stretch to ~1000 interior steps
    g.t_end = g.n_t * g.dt;
    SolverConfig cfg = periodic_cfg();
    CauchyData init;
    init.u0.resize(g.cells());
    init.u1.assign(g.cells(), 0.0);
    for (std::size_t c = 0; c < init.u0.size(); ++c) {
        Vec3 x = g.cell_center(c);
        init.u0[c] = std::sin(pi * x[0]) * std::sin(pi * x[1]);
    }
    WaveField u = solve_linear(g, m, cfg, &init);
    double drift = energy_drift(u, m, 5 * g.dt, 1005 * g.dt);
    CHECK(drift < 1e-3);
}

TEST_CASE("leapfrog is exactly time reversible") {
    Problem p = small_scene(1.0, 64, 0.3);
    p.cfg.boundary = SolverConfig::Boundary::Periodic;
    p.cfg.sponge_width = 0;
    std::vector<double> a = build_coefficient(p.grid, p.coeff);

    Stepper fwd(p.grid, p.metric, p.cfg);
    fwd.set_nonlinear(&a);
    CauchyData d = build_pulse(p.grid, p.metric, p.src1);
    fwd.seed_cauchy(d.u0, d.u1);
    std::vector<double> s0 = fwd.prev(), s1 = fwd.curr();
    const int steps = 40;
    for (int k = 0; k < steps; ++k) fwd.advance();
    std::vector<double> un = fwd.curr(), unm1 = fwd.prev();

    Stepper bwd(p.grid, p.metric, p.cfg);
    bwd.set_nonlinear(&a);
    bwd.seed_slices(un, unm1);
    for (int k = 0; k < steps; ++k) bwd.advance();
    double dmax = 0.0;
    for (std::size_t c = 0; c < s0.size(); ++c)
        dmax = std::max(dmax, std::abs(bwd.curr()[c] - s0[c]));
    CHECK(dmax < 1e-12);  // reversible to round-off: 2uc - un rounds differently
}

TEST_CASE("uniform data reduces to the scalar recurrence") {
    Metric m = Metric::flat(2);
    GridSpec g = periodic_grid(16, 0.3);
    SolverConfig cfg = periodic_cfg();
    std::vector<double> a(g.cells(), 1.0);
    Stepper st(g, m, cfg);
    st.set_nonlinear(&a);
    std::vector<double> u0(g.cells(), -0.5), v0(g.cells(), 0.0);
    st.seed_cauchy(u0, v0);

    // Scalar oracle with the same update arithmetic.
    double up = -0.5;
    double uc = up + 0.5 * g.dt * g.dt * (0.0 - up * up * 1.0);
    CHECK(st.curr()[0] == uc);
    for (int k = 1; k < g.n_t; ++k) {
        st.advance();
        double un = 2.0 * uc - up + g.dt * g.dt * (0.0 - 1.0 * uc * uc);
        up = uc;
        uc = un;
        for (std::size_t c : {std::size_t{0}, g.cells() / 2})
            CHECK(st.curr()[c] == uc);
    }
}

TEST_CASE("focusing blow-up trips the amplitude guard") {
    Metric m = Metric::flat(2);
    GridSpec g = periodic_grid(16, 40.0);
    SolverConfig cfg = periodic_cfg();
    cfg.blowup_factor = 1e3;
    std::vector<double> a(g.cells(), 1.0);
    Stepper st(g, m, cfg);
    st.set_nonlinear(&a);
    std::vector<double> u0(g.cells(), -2.0), v0(g.cells(), 0.0);
    st.seed_cauchy(u0, v0);
    bool blew = false;
    try {
        for (int k = 1; k < g.n_t; ++k) st.advance();
    } catch (const BlowUp& e) {
        blew = true;
        CHECK(e.step > 0);
        CHECK(e.amplitude > 1e3);
    }
    CHECK(blew);
}

TEST_CASE("linear solver is superposable") {
    Problem p = small_scene(0.0, 64, 0.5);
    CauchyData d1 = build_pulse(p.grid, p.metric, p.src1);
    CauchyData d2 = build_pulse(p.grid, p.metric, p.src2);
    CauchyData sum;
    sum.u0.resize(d1.u0.size());
    sum.u1.resize(d1.u1.size());
    for (std::size_t c = 0; c < sum.u0.size(); ++c) {
        sum.u0[c] = d1.u0[c] + d2.u0[c];
        sum.u1[c] = d1.u1[c] + d2.u1[c];
    }
    WaveField u1 = solve_linear(p.grid, p.metric, p.cfg, &d1);
    WaveField u2 = solve_linear(p.grid, p.metric, p.cfg, &d2);
    WaveField us = solve_linear(p.grid, p.metric, p.cfg, &sum);
    double scale = us.max_abs();
    double dmax = 0.0;
    for (std::size_t k = 0; k < us.slices.size(); ++k)
        for (std::size_t c = 0; c < us.slices[k].size(); ++c)
            dmax = std::max(dmax,
                            std::abs(us.slices[k][c] - u1.slices[k][c] - u2.slices[k][c]));
    CHECK(dmax < 1e-12 * scale);
}

TEST_CASE("sponge absorbs an outgoing pulse") {
    Problem p = small_scene(0.0, 96, 2.2);
    p.cfg.sponge_width = 16;
    SourceSpec s = p.src1;
    s.p_launch.x = {-0.3, 0.0, 0.0};
    s.zeta = null_lift(p.metric, s.p_launch, {1.0, 0.0, 0.0}, Orientation::Forward).zeta;
    CauchyData d = build_pulse(p.grid, p.metric, s);
    double e0 = slice_l2(p.grid, p.metric, d.u0);
    WaveField u = solve_linear(p.grid, p.metric, p.cfg, &d);
    double e1 = slice_l2(p.grid, p.metric, u.slices.back());
    CHECK(e1 < 0.05 * e0);
}

TEST_CASE("picard iteration contracts and matches the direct solve") {
    Problem p = small_scene(1.0, 64, 0.8);
    const double eps = 0.02;
    PicardResult pr = picard_solve(p, eps, eps);
    REQUIRE(pr.B.size() >= 2);
    for (std::size_t k = 1; k < pr.B.size(); ++k) {
        if (pr.B[k - 1] > 0.0) CHECK(pr.B[k] / pr.B[k - 1] <= 0.6);
    }
    WaveField direct = solve_semilinear(p, eps, eps);
    WaveField diff;
    diff.grid = p.grid;
    diff.slices.resize(direct.slices.size());
    for (std::size_t k = 0; k < direct.slices.size(); ++k) {
        diff.slices[k].resize(direct.slices[k].size());
        for (std::size_t c = 0; c < direct.slices[k].size(); ++c)
            diff.slices[k][c] = direct.slices[k][c] - pr.field.slices[k][c];
    }
    CHECK(field_norm(diff, NormKind::L4, p.metric) < 10.0 * p.cfg.picard_tol);
}

TEST_CASE("picard reports loss of contraction for large data") {
    Problem p = small_scene(1.0, 48, 0.8);
    CHECK_THROWS_AS(picard_solve(p, 60.0, 60.0), Error);  // NoContraction or BlowUp
}

TEST_CASE("zero nonlinearity converges in one picard sweep") {
    Problem p = small_scene(0.0, 48, 0.5);
    PicardResult pr = picard_solve(p, 0.05, 0.05);
    REQUIRE(!pr.B.empty());
    CHECK(pr.B[0] == 0.0);
}

TEST_CASE("stepping is bit-identical across thread counts") {
    Problem p1 = small_scene(1.0, 64, 0.6);
    Problem p8 = p1;
    p1.cfg.threads = 1;
    p8.cfg.threads = 8;
    WaveField a = solve_semilinear(p1, 0.05, 0.05);
    WaveField b = solve_semilinear(p8, 0.05, 0.05);
    double dmax = 0.0;
    for (std::size_t k = 0; k < a.slices.size(); ++k)
        for (std::size_t c = 0; c < a.slices[k].size(); ++c)
            dmax = std::max(dmax, std::abs(a.slices[k][c] - b.slices[k][c]));
    CHECK(dmax == 0.0);
}
