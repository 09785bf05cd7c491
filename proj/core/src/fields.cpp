#include "wavelab/fields.hpp"

#include <algorithm>
#include <cmath>

namespace wavelab {

GridSpec GridSpec::make(int dim, const Vec3& origin, const Vec3& extent,
                        const std::array<int, 3>& n, double t_end, double cfl, const Metric& m) {
    if (dim != 2 && dim != 3) throw ValidationError("dim must be 2 or 3", "grid.dim");
    GridSpec g;
    g.dim = dim;
    g.origin = origin;
    g.extent = extent;
    g.n = n;
    g.cfl = cfl;
    g.t_end = t_end;
    for (int i = 0; i < dim; ++i) {
        if (n[i] <= 0) throw ValidationError("cell count must be positive", "grid.n");
        if (extent[i] <= 0) throw ValidationError("extent must be positive", "grid.extent");
    }
    g.h = extent[0] / n[0];
    for (int i = 1; i < dim; ++i) {
        double hi = extent[i] / n[i];
        if (std::abs(hi - g.h) > 1e-12 * g.h)
            throw ValidationError("all axes must share one spacing h", "grid.n");
    }
    if (g.h <= 0) throw ValidationError("spacing must be positive", "grid.h");
    if (cfl <= 0 || cfl > 0.5) throw ValidationError("cfl must lie in (0, 0.5]", "grid.cfl");
    Vec3 hi_corner{};
    for (int i = 0; i < dim; ++i) hi_corner[i] = origin[i] + extent[i];
    double c_max = m.c_max_over_box(origin, hi_corner);
    g.dt = cfl * g.h / c_max;
    if (t_end <= 0) throw ValidationError("t_end must be positive", "grid.t_end");
    g.n_t = static_cast<int>(std::ceil(t_end / g.dt - 1e-12));
    return g;
}

std::size_t GridSpec::cells() const {
    std::size_t c = 1;
    for (int i = 0; i < dim; ++i) c *= static_cast<std::size_t>(n[i]);
    return c;
}

Vec3 GridSpec::cell_center(std::size_t idx) const {
    Vec3 x{};
    std::size_t rem = idx;
    for (int i = 0; i < dim; ++i) {
        std::size_t ni = static_cast<std::size_t>(n[i]);
        x[i] = origin[i] + (static_cast<double>(rem % ni) + 0.5) * h;
        rem /= ni;
    }
    return x;
}

std::size_t GridSpec::index(int i, int j, int k) const {
    std::size_t idx = static_cast<std::size_t>(i);
    idx += static_cast<std::size_t>(n[0]) * static_cast<std::size_t>(j);
    if (dim == 3) idx += static_cast<std::size_t>(n[0]) * n[1] * static_cast<std::size_t>(k);
    return idx;
}

DomainBox GridSpec::box() const {
    DomainBox b;
    b.lo = origin;
    for (int i = 0; i < dim; ++i) b.hi[i] = origin[i] + extent[i];
    return b;
}

std::optional<std::array<int, 3>> GridSpec::locate(const Vec3& x) const {
    std::array<int, 3> idx{};
    for (int i = 0; i < dim; ++i) {
        double s = (x[i] - origin[i]) / h - 0.5;
        long r = std::lround(s);
        if (r < 0 || r >= n[i]) return std::nullopt;
        idx[i] = static_cast<int>(r);
    }
    return idx;
}

double WaveField::max_abs() const {
    double m = 0.0;
    for (const auto& s : slices)
        for (double v : s) m = std::max(m, std::abs(v));
    return m;
}

namespace {

double smootherstep(double t) {
    t = std::clamp(t, 0.0, 1.0);
    return t * t * (3.0 - 2.0 * t);
}

double profile_value(CoeffProfile profile, double phi, double width, double kappa) {
    switch (profile) {
        case CoeffProfile::Jump:
            return phi < 0.0 ? 1.0 : 0.0;
        case CoeffProfile::MollifiedJump: {
            if (width <= 0.0) return phi < 0.0 ? 1.0 : 0.0;
            if (phi <= -0.5 * width) return 1.0;
            if (phi >= 0.5 * width) return 0.0;
            return smootherstep(0.5 - phi / width);
        }
        case CoeffProfile::Power:
            return phi < 0.0 ? std::pow(std::abs(phi), kappa) : 0.0;
    }
    return 0.0;
}

}  // namespace

std::vector<double> build_coefficient(const GridSpec& grid, const CoefficientSpec& spec) {
    std::vector<double> a(grid.cells(), 0.0);
    for (std::size_t c = 0; c < a.size(); ++c) {
        double phi = spec.iface.phi(grid.cell_center(c));
        a[c] = spec.alpha * profile_value(spec.profile, phi, spec.mollify_width, spec.power_kappa);
    }
    return a;
}

std::vector<double> build_potential(const GridSpec& grid, const CoefficientSpec& spec) {
    std::vector<double> q(grid.cells(), 0.0);
    if (!spec.potential_enabled) return q;
    for (std::size_t c = 0; c < q.size(); ++c) {
        double phi = spec.iface.phi(grid.cell_center(c));
        q[c] = spec.potential_strength *
               profile_value(spec.potential_profile, phi, spec.mollify_width, spec.power_kappa);
    }
    return q;
}

CauchyData build_pulse(const GridSpec& grid, const Metric& m, const SourceSpec& src) {
    const int d = grid.dim;
    const Vec3& x0 = src.p_launch.x;

    // Null check for the covector.
    PhasePoint pp{src.p_launch, src.zeta};
    double p = symbol_p(m, pp);
    double ref = m.hat_dual_sq(x0, src.zeta);
    if (std::abs(p) > 1e-10 * ref)
        throw ValidationError("source covector is not null for the configured metric",
                              "source.zeta");

    // Propagation direction n = g* xi normalized; local speed |g* xi|_g / |tau|.
    Vec3 gs = m.g_star_diag(x0);
    Vec3 nhat{};
    for (int i = 0; i < d; ++i) nhat[i] = gs[i] * src.zeta.xi[i];
    double nn = std::sqrt(norm2(nhat, d));
    if (nn == 0.0) throw ZeroCovector();
    nhat = scaled(1.0 / nn, nhat, d);
    // Local speed |g* xi|_g / |tau| (unit for null covectors in flat metric).
    double c_loc;
    {
        Vec3 v{};
        for (int i = 0; i < d; ++i) v[i] = gs[i] * src.zeta.xi[i];
        c_loc = std::sqrt(m.g_quad(x0, v, v)) / std::abs(src.zeta.tau);
    }

    // Lateral beam radius: s0 aperture times the domain diameter.
    double diam2 = 0.0;
    for (int i = 0; i < d; ++i) diam2 += grid.extent[i] * grid.extent[i];
    const double r_lat = src.s0 * std::sqrt(diam2);

    // Support margin check (>= 4 sigma from every face).
    for (int i = 0; i < d; ++i) {
        double ti = std::sqrt(std::max(0.0, 1.0 - nhat[i] * nhat[i]));
        double half = 4.0 * src.sigma * std::abs(nhat[i]) + 1.5 * r_lat * ti;
        if (x0[i] - half - 4.0 * src.sigma < grid.origin[i] ||
            x0[i] + half + 4.0 * src.sigma > grid.origin[i] + grid.extent[i])
            throw PulseClipped("pulse support does not fit in the grid with a 4-sigma margin");
    }

    CauchyData out;
    out.u0.assign(grid.cells(), 0.0);
    out.u1.assign(grid.cells(), 0.0);
    if (src.amplitude == 0.0) return out;

    const double A = src.amplitude;
    const double w = src.omega;
    const double sg = src.sigma;
    const double mu = src.mu_proxy;
    for (std::size_t c = 0; c < out.u0.size(); ++c) {
        Vec3 x = grid.cell_center(c);
        Vec3 dxv{};
        for (int i = 0; i < d; ++i) dxv[i] = x[i] - x0[i];
        double s = dot(nhat, dxv, d);
        double rho2 = 0.0;
        for (int i = 0; i < d; ++i) {
            double ti = dxv[i] - s * nhat[i];
            rho2 += ti * ti;
        }
        double rho = std::sqrt(rho2);
        if (rho >= 1.5 * r_lat) continue;
        double chi = rho <= r_lat ? 1.0 : smootherstep((1.5 * r_lat - rho) / (0.5 * r_lat));
        double z = s * s / (2.0 * sg * sg);
        double env = std::exp(-(mu == 1.0 ? z : std::pow(z, mu)));
        double denv;  // d env / ds
        if (mu == 1.0) {
            denv = env * (-s / (sg * sg));
        } else {
            double zeps = std::max(z, 1e-300);
            denv = env * (-mu * std::pow(zeps, mu - 1.0) * s / (sg * sg));
        }
        double u = A * env * std::cos(w * s) * chi;
        double du_ds = A * (denv * std::cos(w * s) - w * env * std::sin(w * s)) * chi;
        out.u0[c] = u;
        out.u1[c] = -c_loc * du_ds;  // one-way to leading order
    }
    return out;
}

namespace {

bool in_region(const GridSpec& grid, const std::optional<Box>& region, const Vec3& x) {
    if (!region) return true;
    for (int i = 0; i < grid.dim; ++i)
        if (x[i] < region->lo[i] || x[i] > region->hi[i]) return false;
    return true;
}

}  // namespace

double slice_l2(const GridSpec& grid, const Metric& m, const std::vector<double>& slice) {
    double s = 0.0;
    double hd = std::pow(grid.h, grid.dim);
    for (std::size_t c = 0; c < slice.size(); ++c) {
        Vec3 x = grid.cell_center(c);
        s += slice[c] * slice[c] * m.sqrt_det_g(x) * hd;
    }
    return std::sqrt(s);
}

double energy_at_slice(const WaveField& field, const Metric& m, int k,
                       const std::optional<Box>& region) {
    const GridSpec& g = field.grid;
    const int d = g.dim;
    if (k < 1 || k + 1 >= static_cast<int>(field.slices.size()))
        throw ValidationError("energy needs centered u_t: 1 <= k <= n_t-1");
    const auto& um = field.slices[k - 1];
    const auto& uc = field.slices[k];
    const auto& up = field.slices[k + 1];
    const double hd = std::pow(g.h, d);
    const double inv2dt = 1.0 / (2.0 * g.dt);
    const double inv2h = 1.0 / (2.0 * g.h);
    double e = 0.0;
    const int nx = g.n[0], ny = g.n[1], nz = (d == 3) ? g.n[2] : 1;
    for (int kk = 0; kk < nz; ++kk)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                std::size_t c = g.index(i, j, kk);
                Vec3 x = g.cell_center(c);
                if (!in_region(g, region, x)) continue;
                double ut = (up[c] - um[c]) * inv2dt;
                Vec3 grad{};
                int idx3[3] = {i, j, kk};
                for (int a = 0; a < d; ++a) {
                    int lo = idx3[a] > 0 ? idx3[a] - 1 : idx3[a];
                    int hi = idx3[a] < g.n[a] - 1 ? idx3[a] + 1 : idx3[a];
                    int i3[3] = {i, j, kk};
                    i3[a] = hi;
                    std::size_t chi = g.index(i3[0], i3[1], i3[2]);
                    i3[a] = lo;
                    std::size_t clo = g.index(i3[0], i3[1], i3[2]);
                    double scale = (hi - lo == 2) ? inv2h : 1.0 / g.h;
                    grad[a] = (uc[chi] - uc[clo]) * scale;
                }
                double gq = m.gstar_quad(x, grad, grad);
                e += 0.5 * (ut * ut + gq) * m.sqrt_det_g(x) * hd;
            }
    return e;
}

double field_norm(const WaveField& field, NormKind kind, const Metric& m,
                  const std::optional<Box>& region) {
    const GridSpec& g = field.grid;
    if (kind == NormKind::EnergySeminorm) {
        int k = static_cast<int>(field.slices.size()) - 2;
        if (k < 1) throw ValidationError("field too short for the energy seminorm");
        return energy_at_slice(field, m, k, region);
    }
    const double p = (kind == NormKind::L2) ? 2.0 : 4.0;
    const double hd = std::pow(g.h, g.dim);
    double s = 0.0;
    for (std::size_t k = 0; k < field.slices.size(); ++k) {
        double t = k * g.dt;
        if (region && (t < region->t_lo || t > region->t_hi)) continue;
        const auto& sl = field.slices[k];
        double acc = 0.0;
        for (std::size_t c = 0; c < sl.size(); ++c) {
            Vec3 x = g.cell_center(c);
            if (!in_region(g, region, x)) continue;
            double v = std::abs(sl[c]);
            acc += (p == 2.0 ? v * v : v * v * v * v) * m.sqrt_det_g(x);
        }
        s += acc * hd * g.dt;
    }
    return std::pow(s, 1.0 / p);
}

}  // namespace wavelab
