#include <doctest.h>

#include <cmath>

#include "wavelab/inversion.hpp"

using namespace wavelab;

namespace {

GridSpec unit_grid(int n, double t_end) {
    Metric m = Metric::flat(2);
    return GridSpec::make(2, {-1, -1, 0}, {2, 2, 0}, {n, n, 1}, t_end, 0.45, m);
}

/// Static vertical line surface x = x0 sampled through time.
Surface line_surface(double x0, double t_max, double dt_sample) {
    Surface s;
    s.id = "line";
    for (double t = 0.0; t <= t_max; t += dt_sample)
        for (double y = -0.6; y <= 0.6; y += 0.02) {
            SurfaceSample ss;
            ss.p = {t, {x0, y, 0.0}};
            ss.tangent = {1.0, {0.0, 0.0, 0.0}};
            ss.normal = {0.0, {1.0, 0.0, 0.0}};
            s.samples.push_back(ss);
        }
    return s;
}

WaveField constant_field(const GridSpec& g, int slices, double value) {
    WaveField f;
    f.grid = g;
    f.slices.assign(static_cast<std::size_t>(slices), std::vector<double>(g.cells(), value));
    return f;
}

}  // namespace

TEST_CASE("tube energy normalization and trivial cases") {
    GridSpec g = unit_grid(64, 0.5);
    Surface s = line_surface(0.0, g.n_t * g.dt, 2 * g.dt);

    WaveField zero = constant_field(g, g.n_t + 1, 0.0);
    CHECK(tube_energy(zero, s, 3 * g.h, 0.0) == 0.0);

    // Constant field, no high-pass: mean of squares over the tube is exact.
    WaveField ones = constant_field(g, g.n_t + 1, 1.0);
    CHECK(tube_energy(ones, s, 3 * g.h, 0.0) == doctest::Approx(1.0));

    CHECK_THROWS_AS(tube_energy(ones, s, 0.5 * g.h, 0.0), ValidationError);
    Surface off = line_surface(5.0, 0.4, 0.1);  // fully outside the grid
    CHECK_THROWS_AS(tube_energy(ones, off, 3 * g.h, 0.0), EmptyTube);
}

TEST_CASE("oscillation confined to the tube keeps half its square amplitude") {
    GridSpec g = unit_grid(128, 0.2);
    Surface s = line_surface(0.0, g.n_t * g.dt, g.dt);
    const double radius = 4 * g.h;
    // Period of exactly three cells: the box blur averages it to zero, so the
    // high-pass passes the oscillation through unchanged.
    const double omega = 2.0 * 3.14159265358979323846 / (3.0 * g.h);
    WaveField f;
    f.grid = g;
    for (int k = 0; k <= g.n_t; ++k) {
        std::vector<double> slice(g.cells(), 0.0);
        for (std::size_t c = 0; c < slice.size(); ++c)
            slice[c] = std::cos(omega * g.cell_center(c)[0] + 0.25 * 3.14159265358979323846);
        f.slices.push_back(std::move(slice));
    }
    double e = tube_energy(f, s, radius, omega / 8.0);
    CHECK(e > 0.45);
    CHECK(e < 0.56);
}

TEST_CASE("tube energy is invariant under grid-aligned translation") {
    GridSpec g = unit_grid(96, 0.3);
    const double shift = 8 * g.h;
    auto pattern = [&](const Vec3& x, double t, double x_off) {
        double dx = x[0] - x_off;
        return std::exp(-80.0 * dx * dx) * std::cos(40.0 * dx) * std::cos(7.0 * t);
    };
    auto make = [&](double x_off) {
        WaveField f;
        f.grid = g;
        for (int k = 0; k <= g.n_t; ++k) {
            std::vector<double> slice(g.cells());
            for (std::size_t c = 0; c < slice.size(); ++c)
                slice[c] = pattern(g.cell_center(c), k * g.dt, x_off);
            f.slices.push_back(std::move(slice));
        }
        return f;
    };
    WaveField f0 = make(-0.2);
    WaveField f1 = make(-0.2 + shift);
    Surface s0 = line_surface(-0.2, g.n_t * g.dt, g.dt);
    Surface s1 = line_surface(-0.2 + shift, g.n_t * g.dt, g.dt);
    double e0 = tube_energy(f0, s0, 3 * g.h, 1.0);
    double e1 = tube_energy(f1, s1, 3 * g.h, 1.0);
    CHECK(std::abs(e0 - e1) < 1e-10 * std::max(e0, 1e-30));
}

TEST_CASE("surface detection separates signal from background") {
    GridSpec g = unit_grid(96, 0.4);
    // Signal rides on the line x = -0.2; the predicted support carries it as
    // its only nonempty surface.
    WaveField f;
    f.grid = g;
    for (int k = 0; k <= g.n_t; ++k) {
        std::vector<double> slice(g.cells(), 0.0);
        for (std::size_t c = 0; c < slice.size(); ++c) {
            Vec3 x = g.cell_center(c);
            double dx = x[0] + 0.2;
            slice[c] = std::exp(-2000.0 * dx * dx) * std::cos(50.0 * x[0]);
        }
        f.slices.push_back(std::move(slice));
    }
    PredictedSupport pred;
    pred.cone = line_surface(-0.2, g.n_t * g.dt, g.dt);
    pred.cone.id = "cone";
    DetectionConfig cfg;
    cfg.radius = 3 * g.h;
    auto reports = detect_surfaces(f, pred, cfg);
    REQUIRE(reports.size() == 5);
    for (const auto& r : reports) {
        if (r.surface_id == "cone") {
            CHECK(!r.empty_tube);
            CHECK(r.snr > 5.0);
            CHECK(r.detected);
        } else {
            CHECK(r.empty_tube);
            CHECK(!r.detected);
        }
    }

    // Noise-like flat field: tube and background see the same statistics.
    WaveField flat = constant_field(g, g.n_t + 1, 0.0);
    for (std::size_t k = 0; k < flat.slices.size(); ++k)
        for (std::size_t c = 0; c < flat.slices[k].size(); ++c)
            flat.slices[k][c] = std::sin(12.3 * static_cast<double>((c * 31 + k * 17) % 101));
    auto rep2 = detect_surfaces(flat, pred, cfg);
    for (const auto& r : rep2)
        if (r.surface_id == "cone") CHECK(r.snr < 2.0);
}

TEST_CASE("jump recovery is exact on proportional pairs") {
    GridSpec g = unit_grid(64, 0.3);
    Surface s = line_surface(0.0, g.n_t * g.dt, g.dt);
    WaveField ref;
    ref.grid = g;
    for (int k = 0; k <= g.n_t; ++k) {
        std::vector<double> slice(g.cells());
        for (std::size_t c = 0; c < slice.size(); ++c) {
            Vec3 x = g.cell_center(c);
            slice[c] = std::sin(9.0 * x[0] + 3.0 * x[1] + 0.5 * k * g.dt);
        }
        ref.slices.push_back(std::move(slice));
    }
    for (double c : {0.5, 2.0, 4.0}) {
        WaveField obs = ref;
        for (auto& sl : obs.slices)
            for (auto& v : sl) v *= c;
        JumpEstimate est = recover_jump(obs, ref, 1.0, s, 3 * g.h, "born-oracle");
        CHECK(est.alpha_hat == doctest::Approx(c).epsilon(1e-12));
        CHECK(est.residual < 1e-12);
    }
    JumpEstimate self = recover_jump(ref, ref, 2.5, s, 3 * g.h, "born-oracle");
    CHECK(self.alpha_hat == doctest::Approx(2.5).epsilon(1e-14));

    WaveField zero = constant_field(g, g.n_t + 1, 0.0);
    CHECK_THROWS_AS(recover_jump(ref, zero, 1.0, s, 3 * g.h, "born-oracle"),
                    DegenerateReference);
}

TEST_CASE("frequency probe enforces grid resolution") {
    Problem p;
    p.metric = Metric::flat(2);
    p.grid = unit_grid(48, 0.4);
    p.coeff.iface = InterfaceSpec::plane({1, 0, 0}, 0.0, 2);
    p.coeff.alpha = 1.0;
    auto mk = [&](double y, double dy) {
        SourceSpec s;
        s.p_launch = {0.0, {-0.45, y, 0.0}};
        s.zeta = null_lift(p.metric, s.p_launch, {2.0, dy, 0.0}, Orientation::Forward).zeta;
        s.s0 = 0.04;
        s.omega = 10.0;
        s.sigma = 0.05;
        return s;
    };
    p.src1 = mk(-0.2, 1.0);
    p.src2 = mk(0.2, -1.0);
    RayParams prm;
    prm.fan_count = 5;
    prm.cone_count = 16;
    DetectionConfig det;
    // 8 points per wavelength fails at omega = 60 on a 48-cell grid (h ~ 0.042).
    CHECK_THROWS_AS(frequency_scaling_probe(p, prm, {10.0, 60.0}, 0.05, det), UnderResolved);
}
