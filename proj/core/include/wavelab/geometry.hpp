#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "wavelab/errors.hpp"

namespace wavelab {

/// Spatial vector/covector, dimension 2 or 3; unused components stay zero.
using Vec3 = std::array<double, 3>;

struct SpacetimePoint {
    double t = 0.0;
    Vec3 x{};
};

struct SpacetimeVec {
    double t = 0.0;
    Vec3 x{};
};

struct Covector {
    double tau = 0.0;
    Vec3 xi{};
};

/// A point in phase space: spacetime position plus nonzero covector.
struct PhasePoint {
    SpacetimePoint x;
    Covector zeta;
};

enum class MetricKind { Flat, DiagonalAnalytic, SampledGrid };

/// Spatial Riemannian metric g with dual g*. All supported kinds are
/// diagonal in the grid coordinates; the Lorentzian companion -dt^2+g and
/// the Riemannian companion dt^2+g are exposed through the quadratic forms
/// below.
class Metric {
  public:
    /// Defaults to the flat metric in dimension 2.
    Metric() = default;

    static Metric flat(int dim);
    /// g*_ii(x) = base_i + slope_i . x (must stay positive on the domain of use).
    static Metric diag_linear(int dim, const Vec3& base, const std::array<Vec3, 3>& slope);
    /// Diagonal g* sampled on a uniform spatial grid, multilinear interpolation.
    static Metric sampled(int dim, const Vec3& origin, double h, const std::array<int, 3>& n,
                          std::vector<Vec3> gstar_diag);

    int dim() const { return dim_; }
    MetricKind kind() const { return kind_; }

    /// Diagonal of g*(x) (inverse metric).
    Vec3 g_star_diag(const Vec3& x) const;
    /// Diagonal of g(x).
    Vec3 g_diag(const Vec3& x) const;
    double sqrt_det_g(const Vec3& x) const;
    /// d/dx_axis of the diagonal of g*.
    Vec3 d_gstar_diag(const Vec3& x, int axis) const;

    /// xi^T g*(x) eta
    double gstar_quad(const Vec3& x, const Vec3& xi, const Vec3& eta) const;
    /// v^T g(x) w
    double g_quad(const Vec3& x, const Vec3& v, const Vec3& w) const;

    /// Lorentzian dual pairing: tilde-g*(z1, z2) = -tau1 tau2 + xi1^T g* xi2.
    double lorentz_dual(const Vec3& x, const Covector& z1, const Covector& z2) const;
    /// Riemannian dual norm^2: hat-g*(z, z) = tau^2 + xi^T g* xi.
    double hat_dual_sq(const Vec3& x, const Covector& z) const;
    /// Lorentzian quadratic form on tangent vectors: tilde-g(v, v) = -v_t^2 + v_x^T g v_x.
    double lorentz_tangent_sq(const Vec3& x, const SpacetimeVec& v) const;

    /// Full matrices (diagonal), for invariant checks.
    std::array<Vec3, 3> g_matrix(const Vec3& x) const;
    std::array<Vec3, 3> g_star_matrix(const Vec3& x) const;

    /// sup over the box of sqrt(largest eigenvalue of g*), sampled.
    double c_max_over_box(const Vec3& lo, const Vec3& hi) const;

  private:
    Vec3 sampled_interp(const Vec3& x) const;

    int dim_ = 2;
    MetricKind kind_ = MetricKind::Flat;
    // diag-linear parameters
    Vec3 base_{1.0, 1.0, 1.0};
    std::array<Vec3, 3> slope_{};
    // sampled-grid parameters
    Vec3 s_origin_{};
    double s_h_ = 1.0;
    std::array<int, 3> s_n_{};
    std::vector<Vec3> s_data_;
};

/// Principal symbol p(x, zeta) = -tau^2 + xi^T g*(x) xi.
double symbol_p(const Metric& m, const PhasePoint& pp);

struct HamiltonRate {
    SpacetimeVec dx;
    Covector dzeta;
};

/// Hamilton vector field of p: dx = (dp/dtau, dp/dxi), dzeta = -(dp/dt, dp/dx).
HamiltonRate hamiltonian_field(const Metric& m, const PhasePoint& pp);

enum class Orientation { Forward, Backward };

/// Lifts (x, xi) to the null covector (x, (tau, xi)) with tau chosen so the
/// Hamiltonian flow moves forward (resp. backward) in t.
PhasePoint null_lift(const Metric& m, const SpacetimePoint& x, const Vec3& xi,
                     Orientation orientation);

// Small vector helpers shared across modules.
inline double dot(const Vec3& a, const Vec3& b, int dim) {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) s += a[i] * b[i];
    return s;
}
inline Vec3 axpy(double a, const Vec3& x, const Vec3& y, int dim) {
    Vec3 r{};
    for (int i = 0; i < dim; ++i) r[i] = a * x[i] + y[i];
    return r;
}
inline Vec3 scaled(double a, const Vec3& x, int dim) {
    Vec3 r{};
    for (int i = 0; i < dim; ++i) r[i] = a * x[i];
    return r;
}
inline double norm2(const Vec3& a, int dim) { return dot(a, a, dim); }

}  // namespace wavelab
