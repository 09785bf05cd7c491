#pragma once

#include "wavelab/response.hpp"

namespace wavelab {

struct DetectionConfig {
    double radius = 0.0;         // tube radius; defaults to 3h when <= 0
    double snr_threshold = 5.0;
    double highpass_cut = 1.0;   // <= 0 disables the high-pass stage
    double background_shift = 6.0;  // background tube offset in radii
    // The transmitted and reflected rays pass through the crossing point, so
    // their wavefronts lie on the measurement cone; cells within this many
    // radii of those bundles are excluded from the cone tube (and its
    // background) to isolate the genuinely new signal. <= 0 disables.
    double exclusion_radius = 2.0;
};

struct DetectionReport {
    std::string surface_id;
    double tube_energy = 0.0;
    double background_energy = 0.0;
    double snr = 0.0;
    bool detected = false;
    bool empty_tube = false;
};

/// Mean squared value of the (optionally high-passed) field over all
/// spacetime cells within `radius` of the sampled surface.
double tube_energy(const WaveField& field, const Surface& surface, double radius,
                   double highpass_cut);

/// Tube-restricted L2 pairing of two fields on the same grid (no high-pass).
double tube_pairing(const WaveField& a, const WaveField& b, const Surface& surface,
                    double radius);

/// One report per predicted surface; the background tube is the surface
/// translated along its spacetime normal and clipped to the grid.
std::vector<DetectionReport> detect_surfaces(const WaveField& field,
                                             const PredictedSupport& pred,
                                             const DetectionConfig& cfg);

struct LocateResult {
    bool on_interface = false;
    std::vector<double> s0_ladder;
    std::vector<DetectionReport> cone_reports;  // one per ladder rung
};

/// Membership test: the interaction cone must be detected at every beam width
/// in the (decreasing) ladder for the crossing point to lie on the interface.
LocateResult locate_interface(const Problem& prob, const RayParams& ray_prm,
                              const std::vector<double>& s0_ladder, double eps,
                              const DetectionConfig& det);

struct JumpEstimate {
    double alpha_hat = 0.0;
    double reference_alpha = 0.0;
    double residual = 0.0;
    std::string method;  // "born-oracle" or "nonlinear-cross"
};

/// Recovers the coefficient jump by tube-restricted projection of the observed
/// cross response onto a reference response with known jump.
JumpEstimate recover_jump(const WaveField& observed, const WaveField& reference,
                          double alpha_ref, const Surface& cone, double radius,
                          const std::string& method);

struct ScalingProbeResult {
    std::vector<double> omegas;
    std::vector<double> amplitudes;  // cone tube RMS amplitude per carrier
    PowerFit fit;
};

/// Cone-tube amplitude of the cross response across a carrier-frequency
/// ladder, with the fitted amplitude-vs-frequency power law.
ScalingProbeResult frequency_scaling_probe(const Problem& prob, const RayParams& ray_prm,
                                           const std::vector<double>& omega_ladder, double eps,
                                           const DetectionConfig& det);

}  // namespace wavelab
