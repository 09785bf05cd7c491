#include "wavelab/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace wavelab {

Metric Metric::flat(int dim) {
    Metric m;
    m.dim_ = dim;
    m.kind_ = MetricKind::Flat;
    m.base_ = {1.0, 1.0, 1.0};
    return m;
}

Metric Metric::diag_linear(int dim, const Vec3& base, const std::array<Vec3, 3>& slope) {
    Metric m;
    m.dim_ = dim;
    m.kind_ = MetricKind::DiagonalAnalytic;
    m.base_ = base;
    m.slope_ = slope;
    return m;
}

Metric Metric::sampled(int dim, const Vec3& origin, double h, const std::array<int, 3>& n,
                       std::vector<Vec3> gstar_diag) {
    Metric m;
    m.dim_ = dim;
    m.kind_ = MetricKind::SampledGrid;
    m.s_origin_ = origin;
    m.s_h_ = h;
    m.s_n_ = n;
    m.s_data_ = std::move(gstar_diag);
    std::size_t expect = 1;
    for (int i = 0; i < dim; ++i) expect *= static_cast<std::size_t>(n[i]);
    if (m.s_data_.size() != expect)
        throw ValidationError("sampled metric: data size does not match node counts");
    return m;
}

Vec3 Metric::sampled_interp(const Vec3& x) const {
    // Multilinear interpolation on the node grid.
    std::array<int, 3> i0{};
    Vec3 w{};
    for (int a = 0; a < dim_; ++a) {
        double s = (x[a] - s_origin_[a]) / s_h_;
        if (s < 0.0 || s > s_n_[a] - 1)
            throw OutOfDomain("point outside the sampled-metric bounding box");
        int i = std::min(static_cast<int>(s), s_n_[a] - 2);
        i = std::max(i, 0);
        i0[a] = i;
        w[a] = s - i;
    }
    auto node = [&](int di, int dj, int dk) -> const Vec3& {
        std::size_t idx = static_cast<std::size_t>(i0[0] + di);
        if (dim_ >= 2) idx += static_cast<std::size_t>(s_n_[0]) * (i0[1] + dj);
        if (dim_ >= 3)
            idx += static_cast<std::size_t>(s_n_[0]) * s_n_[1] * (i0[2] + dk);
        return s_data_[idx];
    };
    Vec3 out{};
    const int kmax = (dim_ >= 3) ? 1 : 0;
    const int jmax = (dim_ >= 2) ? 1 : 0;
    for (int k = 0; k <= kmax; ++k)
        for (int j = 0; j <= jmax; ++j)
            for (int i = 0; i <= 1; ++i) {
                double wt = (i ? w[0] : 1 - w[0]);
                if (dim_ >= 2) wt *= (j ? w[1] : 1 - w[1]);
                if (dim_ >= 3) wt *= (k ? w[2] : 1 - w[2]);
                const Vec3& v = node(i, j, k);
                for (int a = 0; a < dim_; ++a) out[a] += wt * v[a];
            }
    return out;
}

Vec3 Metric::g_star_diag(const Vec3& x) const {
    switch (kind_) {
        case MetricKind::Flat: {
            Vec3 r{};
            for (int i = 0; i < dim_; ++i) r[i] = 1.0;
            return r;
        }
        case MetricKind::DiagonalAnalytic: {
            Vec3 r{};
            for (int i = 0; i < dim_; ++i) r[i] = base_[i] + dot(slope_[i], x, dim_);
            return r;
        }
        case MetricKind::SampledGrid:
            return sampled_interp(x);
    }
    return {};
}

Vec3 Metric::g_diag(const Vec3& x) const {
    Vec3 gs = g_star_diag(x);
    Vec3 r{};
    for (int i = 0; i < dim_; ++i) r[i] = 1.0 / gs[i];
    return r;
}

double Metric::sqrt_det_g(const Vec3& x) const {
    Vec3 gs = g_star_diag(x);
    double det = 1.0;
    for (int i = 0; i < dim_; ++i) det *= gs[i];
    return 1.0 / std::sqrt(det);
}

Vec3 Metric::d_gstar_diag(const Vec3& x, int axis) const {
    switch (kind_) {
        case MetricKind::Flat:
            return {};
        case MetricKind::DiagonalAnalytic: {
            Vec3 r{};
            for (int i = 0; i < dim_; ++i) r[i] = slope_[i][axis];
            return r;
        }
        case MetricKind::SampledGrid: {
            // Centered differences with the metric grid spacing.
            Vec3 xp = x, xm = x;
            xp[axis] += s_h_;
            xm[axis] -= s_h_;
            Vec3 gp = sampled_interp(xp);
            Vec3 gm = sampled_interp(xm);
            Vec3 r{};
            for (int i = 0; i < dim_; ++i) r[i] = (gp[i] - gm[i]) / (2.0 * s_h_);
            return r;
        }
    }
    return {};
}

double Metric::gstar_quad(const Vec3& x, const Vec3& xi, const Vec3& eta) const {
    Vec3 gs = g_star_diag(x);
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += gs[i] * xi[i] * eta[i];
    return s;
}

double Metric::g_quad(const Vec3& x, const Vec3& v, const Vec3& w) const {
    Vec3 gd = g_diag(x);
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += gd[i] * v[i] * w[i];
    return s;
}

double Metric::lorentz_dual(const Vec3& x, const Covector& z1, const Covector& z2) const {
    return -z1.tau * z2.tau + gstar_quad(x, z1.xi, z2.xi);
}

double Metric::hat_dual_sq(const Vec3& x, const Covector& z) const {
    return z.tau * z.tau + gstar_quad(x, z.xi, z.xi);
}

double Metric::lorentz_tangent_sq(const Vec3& x, const SpacetimeVec& v) const {
    return -v.t * v.t + g_quad(x, v.x, v.x);
}

std::array<Vec3, 3> Metric::g_matrix(const Vec3& x) const {
    std::array<Vec3, 3> m{};
    Vec3 d = g_diag(x);
    for (int i = 0; i < dim_; ++i) m[i][i] = d[i];
    return m;
}

std::array<Vec3, 3> Metric::g_star_matrix(const Vec3& x) const {
    std::array<Vec3, 3> m{};
    Vec3 d = g_star_diag(x);
    for (int i = 0; i < dim_; ++i) m[i][i] = d[i];
    return m;
}

double Metric::c_max_over_box(const Vec3& lo, const Vec3& hi) const {
    if (kind_ == MetricKind::Flat) return 1.0;
    const int ns = 17;
    double cmax = 0.0;
    auto probe = [&](const Vec3& x) {
        Vec3 gs = g_star_diag(x);
        for (int i = 0; i < dim_; ++i) cmax = std::max(cmax, gs[i]);
    };
    if (dim_ == 2) {
        for (int i = 0; i < ns; ++i)
            for (int j = 0; j < ns; ++j)
                probe({lo[0] + (hi[0] - lo[0]) * i / (ns - 1),
                       lo[1] + (hi[1] - lo[1]) * j / (ns - 1), 0.0});
    } else {
        for (int i = 0; i < ns; ++i)
            for (int j = 0; j < ns; ++j)
                for (int k = 0; k < ns; ++k)
                    probe({lo[0] + (hi[0] - lo[0]) * i / (ns - 1),
                           lo[1] + (hi[1] - lo[1]) * j / (ns - 1),
                           lo[2] + (hi[2] - lo[2]) * k / (ns - 1)});
    }
    return std::sqrt(cmax);
}

double symbol_p(const Metric& m, const PhasePoint& pp) {
    return -pp.zeta.tau * pp.zeta.tau + m.gstar_quad(pp.x.x, pp.zeta.xi, pp.zeta.xi);
}

HamiltonRate hamiltonian_field(const Metric& m, const PhasePoint& pp) {
    HamiltonRate r;
    const int d = m.dim();
    const Vec3& xi = pp.zeta.xi;
    Vec3 gs = m.g_star_diag(pp.x.x);
    r.dx.t = -2.0 * pp.zeta.tau;
    for (int i = 0; i < d; ++i) r.dx.x[i] = 2.0 * gs[i] * xi[i];
    r.dzeta.tau = 0.0;  // time-independent metric
    for (int a = 0; a < d; ++a) {
        Vec3 dg = m.d_gstar_diag(pp.x.x, a);
        double s = 0.0;
        for (int i = 0; i < d; ++i) s += dg[i] * xi[i] * xi[i];
        r.dzeta.xi[a] = -s;
    }
    return r;
}

PhasePoint null_lift(const Metric& m, const SpacetimePoint& x, const Vec3& xi,
                     Orientation orientation) {
    const int d = m.dim();
    if (norm2(xi, d) == 0.0) throw ZeroCovector();
    double speed = std::sqrt(m.gstar_quad(x.x, xi, xi));
    PhasePoint pp;
    pp.x = x;
    pp.zeta.xi = xi;
    // dt/dtheta = -2 tau, so forward-in-time means tau < 0.
    pp.zeta.tau = (orientation == Orientation::Forward) ? -speed : speed;
    return pp;
}

}  // namespace wavelab
