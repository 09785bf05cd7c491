#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wavelab/geometry.hpp"

namespace wavelab {

/// A null bicharacteristic sampled along the flow parameter.
struct Ray {
    std::vector<PhasePoint> samples;
    double theta_step = 0.0;
    double p_drift = 0.0;  // max |symbol_p| along the ray
    bool left_domain = false;
};

struct DomainBox {
    Vec3 lo{};
    Vec3 hi{};
    bool contains(const Vec3& x, int dim) const {
        for (int i = 0; i < dim; ++i)
            if (x[i] < lo[i] || x[i] > hi[i]) return false;
        return true;
    }
};

/// Time-independent level-set interface S0 = {phi = 0}.
class InterfaceSpec {
  public:
    enum class Shape { Plane, Sphere };

    /// phi(x) = normal . x - offset
    static InterfaceSpec plane(const Vec3& normal, double offset, int dim);
    /// phi(x) = |x - center| - radius  (bounded region Omega = {phi < 0})
    static InterfaceSpec sphere(const Vec3& center, double radius, int dim);

    double phi(const Vec3& x) const;
    /// Spacetime conormal (s, beta) = d phi at x; s = 0 for time-independent phi.
    Covector conormal(const Vec3& x) const;
    /// Relative margin |s^2 - g*(beta,beta)| / g*(beta,beta); must stay >= 1e-6.
    double noncharacteristic_margin(const Metric& m, const Vec3& x) const;

    Shape shape() const { return shape_; }
    const Vec3& normal_param() const { return a_; }
    double scalar_param() const { return b_; }

  private:
    Shape shape_ = Shape::Plane;
    int dim_ = 2;
    Vec3 a_{};    // plane normal or sphere center
    double b_ = 0.0;  // plane offset or sphere radius
};

/// RK4 integration of the Hamiltonian flow until t >= t_end or domain exit.
Ray trace(const Metric& m, const PhasePoint& start, double t_end, double step,
          const DomainBox* box = nullptr);

/// Interface reflection: normalizes zeta_in to (1, alpha), solves
/// p((1,alpha) + b (s,beta)) = 0 for the nonzero root b, and returns the
/// reflected covector rescaled by the incident tau.
Covector reflect_at_interface(const Metric& m, const SpacetimePoint& p, const Covector& zeta_in,
                              const InterfaceSpec& iface);

/// Null covectors at p0 annihilating the supplied tangent vectors of the
/// interaction set, parameterized uniformly in angle; tau < 0 (forward).
std::vector<PhasePoint> cone_covectors(const Metric& m, const SpacetimePoint& p0,
                                       const std::vector<SpacetimeVec>& tangents, int n_samples);

struct SurfaceSample {
    SpacetimePoint p;
    SpacetimeVec tangent;  // unit ray velocity
    SpacetimeVec normal;   // conormal raised by hat-g, unit
};

struct Surface {
    std::string id;
    std::vector<SurfaceSample> samples;
};

struct PredictedSupport {
    Surface transmitted_1, transmitted_2;
    Surface reflected_1, reflected_2;
    Surface cone;
    bool has_interaction = false;
    bool on_interface = false;
    SpacetimePoint p0;
};

struct RayParams {
    double step = 1e-3;
    int fan_count = 32;
    int cone_count = 64;
    double d_hit = 0.02;             // closest-approach threshold (2 grid cells)
    double grazing_angle_deg = 5.0;  // drop fan rays this close to tangential
    double sample_spacing = 0.01;    // target spacing of stored surface samples
    int threads = 1;
};

/// Flow-out surface of the interaction cone from p0, traced from the
/// covectors of cone_covectors and sampled like the predicted surfaces.
/// Usable as a measurement tube whether or not p0 lies on the interface.
Surface cone_flowout(const Metric& m, const DomainBox& box, double t_end,
                     const SpacetimePoint& p0, const std::vector<SpacetimeVec>& tangents,
                     const RayParams& prm);

/// Traces the two central rays, locates their interaction point, and builds
/// the predicted singular support: transmitted bundles, one-bounce
/// reflections at the interface, and the cone flow-out when p0 lies on S0.
PredictedSupport predict_support(const Metric& m, const DomainBox& box, double t_end,
                                 const PhasePoint& launch1, double s0_1,
                                 const PhasePoint& launch2, double s0_2,
                                 const InterfaceSpec& iface, const RayParams& prm);

}  // namespace wavelab
