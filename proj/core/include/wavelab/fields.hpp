#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "wavelab/geometry.hpp"
#include "wavelab/raytrace.hpp"

namespace wavelab {

/// Uniform spacetime grid. All spatial axes share one spacing h; the time
/// step is tied to h through the CFL number and the fastest wave speed.
struct GridSpec {
    int dim = 2;
    Vec3 origin{};
    Vec3 extent{};
    std::array<int, 3> n{};
    double h = 0.0;
    double cfl = 0.45;
    double t_end = 1.0;
    double dt = 0.0;
    int n_t = 0;

    static GridSpec make(int dim, const Vec3& origin, const Vec3& extent,
                         const std::array<int, 3>& n, double t_end, double cfl, const Metric& m);

    std::size_t cells() const;
    /// Cell-center coordinate of the flat index.
    Vec3 cell_center(std::size_t idx) const;
    std::size_t index(int i, int j, int k = 0) const;
    DomainBox box() const;
    /// Nearest cell index of a spatial point, or nullopt if outside.
    std::optional<std::array<int, 3>> locate(const Vec3& x) const;
};

/// Spacetime-sampled scalar field: full time history of grid slices.
struct WaveField {
    GridSpec grid;
    std::vector<std::vector<double>> slices;
    std::string metadata;
    bool blow_up = false;

    double max_abs() const;
};

enum class CoeffProfile { Jump, MollifiedJump, Power };

/// Specification of the nonlinear coefficient a(t,x) = alpha * profile(phi)
/// and the optional potential q with the same interface structure.
struct CoefficientSpec {
    InterfaceSpec iface;
    double alpha = 0.0;
    CoeffProfile profile = CoeffProfile::Jump;
    double mollify_width = 0.0;  // collar width w for mollified-jump
    double power_kappa = 1.0;    // exponent for the power profile

    bool potential_enabled = false;
    double potential_strength = 0.0;  // the delta parameter multiplies this at run time
    CoeffProfile potential_profile = CoeffProfile::Jump;
};

/// Distorted-plane-wave pulse launched as Cauchy data at t = 0.
struct SourceSpec {
    SpacetimePoint p_launch;
    Covector zeta;          // null covector for the configured metric
    double s0 = 0.1;        // beam width (covector aperture)
    double t0 = 0.0;        // emission time
    double omega = 60.0;    // carrier frequency, rad/length
    double sigma = 0.08;    // envelope width, length
    double amplitude = 1.0;
    double mu_proxy = 1.0;  // profile smoothness knob (qualitative)
};

/// Samples the coefficient profile at cell centers (jump: alpha where phi<0).
std::vector<double> build_coefficient(const GridSpec& grid, const CoefficientSpec& spec);
/// Same shape for the potential, at unit delta (strength only).
std::vector<double> build_potential(const GridSpec& grid, const CoefficientSpec& spec);

struct CauchyData {
    std::vector<double> u0;  // displacement
    std::vector<double> u1;  // velocity
};

/// One-way modulated plane pulse with lateral beam cutoff.
CauchyData build_pulse(const GridSpec& grid, const Metric& m, const SourceSpec& src);

enum class NormKind { L2, L4, EnergySeminorm };

struct Box {
    Vec3 lo{}, hi{};
    double t_lo = -1e300, t_hi = 1e300;
};

/// Riemann-sum spacetime norm (L2/L4) or final-slice energy seminorm.
double field_norm(const WaveField& field, NormKind kind, const Metric& m,
                  const std::optional<Box>& region = std::nullopt);

/// Spatial L2 norm of a single slice.
double slice_l2(const GridSpec& grid, const Metric& m, const std::vector<double>& slice);

/// Energy seminorm at slice k (centered u_t), optionally restricted to a box.
double energy_at_slice(const WaveField& field, const Metric& m, int k,
                       const std::optional<Box>& region = std::nullopt);

}  // namespace wavelab
