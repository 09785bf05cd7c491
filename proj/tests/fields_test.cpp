#include <doctest.h>

#include <cmath>

#include "wavelab/fields.hpp"

using namespace wavelab;

namespace {

GridSpec unit_grid(int n, double t_end = 0.5, double cfl = 0.45) {
    Metric m = Metric::flat(2);
    return GridSpec::make(2, {-1, -1, 0}, {2, 2, 0}, {n, n, 1}, t_end, cfl, m);
}

}  // namespace

TEST_CASE("grid construction validates its inputs") {
    Metric m = Metric::flat(2);
    CHECK_THROWS_AS(GridSpec::make(2, {0, 0, 0}, {-1, 1, 0}, {8, 8, 1}, 1.0, 0.45, m),
                    ValidationError);
    CHECK_THROWS_AS(GridSpec::make(2, {0, 0, 0}, {1, 1, 0}, {8, 8, 1}, 1.0, 0.6, m),
                    ValidationError);
    CHECK_THROWS_AS(GridSpec::make(2, {0, 0, 0}, {1, 2, 0}, {8, 8, 1}, 1.0, 0.45, m),
                    ValidationError);  // unequal spacing
    CHECK_THROWS_AS(GridSpec::make(2, {0, 0, 0}, {1, 1, 0}, {8, 8, 1}, -1.0, 0.45, m),
                    ValidationError);

    GridSpec g = unit_grid(64);
    CHECK(g.h == doctest::Approx(2.0 / 64));
    CHECK(g.dt == doctest::Approx(0.45 * g.h));
    CHECK(g.n_t == static_cast<int>(std::ceil(0.5 / g.dt - 1e-12)));
}

TEST_CASE("cell centers and locate are inverse to each other") {
    GridSpec g = unit_grid(32);
    for (std::size_t c : {std::size_t{0}, std::size_t{17}, g.cells() - 1}) {
        Vec3 x = g.cell_center(c);
        auto idx = g.locate(x);
        REQUIRE(idx.has_value());
        CHECK(g.index((*idx)[0], (*idx)[1]) == c);
    }
    CHECK(!g.locate(Vec3{1.5, 0.0, 0.0}).has_value());
}

TEST_CASE("jump coefficient is an exact indicator") {
    GridSpec g = unit_grid(32);
    CoefficientSpec spec;
    spec.iface = InterfaceSpec::plane({1, 0, 0}, 0.0, 2);
    spec.alpha = 2.5;
    auto a = build_coefficient(g, spec);
    for (std::size_t c = 0; c < a.size(); ++c) {
        double x0 = g.cell_center(c)[0];
        CHECK(a[c] == (x0 < 0.0 ? 2.5 : 0.0));
    }
}

TEST_CASE("mollified jump matches the sharp jump outside the collar") {
    GridSpec g = unit_grid(64);
    CoefficientSpec sharp, soft;
    sharp.iface = soft.iface = InterfaceSpec::plane({1, 0, 0}, 0.0, 2);
    sharp.alpha = soft.alpha = 1.0;
    soft.profile = CoeffProfile::MollifiedJump;
    soft.mollify_width = 0.2;
    auto as = build_coefficient(g, sharp);
    auto am = build_coefficient(g, soft);
    for (std::size_t c = 0; c < as.size(); ++c) {
        double x0 = g.cell_center(c)[0];
        CHECK(am[c] >= 0.0);
        CHECK(am[c] <= 1.0);
        if (std::abs(x0) > 0.11) CHECK(am[c] == as[c]);
    }
}

TEST_CASE("power profile vanishes continuously at the interface") {
    GridSpec g = unit_grid(64);
    CoefficientSpec spec;
    spec.iface = InterfaceSpec::plane({1, 0, 0}, 0.0, 2);
    spec.alpha = 1.0;
    spec.profile = CoeffProfile::Power;
    spec.power_kappa = 2.0;
    auto a = build_coefficient(g, spec);
    for (std::size_t c = 0; c < a.size(); ++c) {
        double x0 = g.cell_center(c)[0];
        double want = x0 < 0.0 ? x0 * x0 : 0.0;
        CHECK(a[c] == doctest::Approx(want).epsilon(1e-14));
    }
}

TEST_CASE("potential array follows its own strength and gate") {
    GridSpec g = unit_grid(16);
    CoefficientSpec spec;
    spec.iface = InterfaceSpec::plane({1, 0, 0}, 0.0, 2);
    spec.alpha = 1.0;
    auto q_off = build_potential(g, spec);
    for (double v : q_off) CHECK(v == 0.0);
    spec.potential_enabled = true;
    spec.potential_strength = 3.0;
    auto q = build_potential(g, spec);
    for (std::size_t c = 0; c < q.size(); ++c)
        CHECK(q[c] == (g.cell_center(c)[0] < 0.0 ? 3.0 : 0.0));
}

namespace {

SourceSpec centered_pulse(const Metric& m) {
    SourceSpec s;
    s.p_launch = {0.0, {0.0, 0.0, 0.0}};
    s.zeta = null_lift(m, s.p_launch, {1.0, 0.0, 0.0}, Orientation::Forward).zeta;
    s.s0 = 0.05;
    s.omega = 40.0;
    s.sigma = 0.06;
    return s;
}

}  // namespace

TEST_CASE("pulse velocity matches the advection of its displacement") {
    Metric m = Metric::flat(2);
    GridSpec g = unit_grid(128);
    SourceSpec s = centered_pulse(m);
    CauchyData d = build_pulse(g, m, s);

    // One-way along +x at unit speed: u1 = -du0/dx. Compare to a centered
    // difference away from the lateral cutoff.
    double max_rel = 0.0, scale = 0.0;
    for (int j = 60; j < 68; ++j)
        for (int i = 2; i < 126; ++i) {
            std::size_t c = g.index(i, j);
            double num = -(d.u0[g.index(i + 1, j)] - d.u0[g.index(i - 1, j)]) / (2 * g.h);
            max_rel = std::max(max_rel, std::abs(num - d.u1[c]));
            scale = std::max(scale, std::abs(d.u1[c]));
        }
    CHECK(scale > 1.0);  // the pulse is actually there
    // Centered difference truncation ~ (omega h)^2 / 6 of the carrier scale,
    // with a comparable envelope contribution (3/(omega sigma) of the carrier term).
    CHECK(max_rel < 2.0 * scale * (s.omega * g.h) * (s.omega * g.h) / 6.0 + 1e-6 * scale);
}

TEST_CASE("pulse rejects non-null covectors and clipped supports") {
    Metric m = Metric::flat(2);
    GridSpec g = unit_grid(64);
    SourceSpec s = centered_pulse(m);
    s.zeta.tau = -2.0;  // breaks the null condition
    CHECK_THROWS_AS(build_pulse(g, m, s), ValidationError);

    SourceSpec edge = centered_pulse(m);
    edge.p_launch.x = {-0.95, 0.0, 0.0};
    CHECK_THROWS_AS(build_pulse(g, m, edge), PulseClipped);
}

TEST_CASE("norms agree with closed-form integrals") {
    Metric m = Metric::flat(2);
    GridSpec g = unit_grid(64, 0.3);

    WaveField f;
    f.grid = g;
    f.slices.assign(static_cast<std::size_t>(g.n_t) + 1,
                    std::vector<double>(g.cells(), 2.0));
    double T = g.n_t * g.dt + g.dt;  // Riemann sum counts n_t+1 slabs of dt
    double vol = 4.0;
    CHECK(field_norm(f, NormKind::L2, m) == doctest::Approx(std::sqrt(4.0 * vol * T)));
    CHECK(field_norm(f, NormKind::L4, m) == doctest::Approx(std::pow(16.0 * vol * T, 0.25)));

    // Restriction to a sub-box.
    Box region;
    region.lo = {-0.5, -0.5, 0};
    region.hi = {0.5, 0.5, 0};
    double sub = field_norm(f, NormKind::L2, m, region);
    CHECK(sub == doctest::Approx(std::sqrt(4.0 * 1.0 * T)).epsilon(0.05));

    // Oscillatory slice: mean of sin^2 over full periods is 1/2.
    std::vector<double> slice(g.cells());
    for (std::size_t c = 0; c < slice.size(); ++c)
        slice[c] = std::sin(3.14159265358979 * g.cell_center(c)[0]);
    double l2 = slice_l2(g, m, slice);
    CHECK(l2 == doctest::Approx(std::sqrt(0.5 * vol)).epsilon(1e-3));
}

TEST_CASE("energy of a standing wave is stationary in closed form") {
    Metric m = Metric::flat(2);
    GridSpec g = unit_grid(64, 0.2);
    const double pi = 3.14159265358979;
    // u = cos(c t) sin(pi x) sin(pi y) with c = sqrt(2) pi has constant energy.
    const double cw = std::sqrt(2.0) * pi;
    WaveField f;
    f.grid = g;
    for (int k = 0; k <= g.n_t; ++k) {
        std::vector<double> s(g.cells());
        for (std::size_t c = 0; c < s.size(); ++c) {
            Vec3 x = g.cell_center(c);
            s[c] = std::cos(cw * k * g.dt) * std::sin(pi * x[0]) * std::sin(pi * x[1]);
        }
        f.slices.push_back(std::move(s));
    }
    double e1 = energy_at_slice(f, m, 1);
    double e2 = energy_at_slice(f, m, g.n_t - 1);
    // Analytic total: integral of 1/2 (u_t^2 + |grad u|^2) = pi^2, since
    // each of sin^2 and cos^2 integrates to 1 over [-1,1].
    double want = pi * pi;
    CHECK(e1 == doctest::Approx(want).epsilon(0.02));
    CHECK(e2 == doctest::Approx(want).epsilon(0.02));
}
