#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wavelab/inversion.hpp"

namespace wavelab {

/// Experiment knobs shared by the higher-level drivers.
struct ExperimentParams {
    double eps = 0.03125;  // working amplitude for cross/invert runs
    double delta = 0.05;   // potential strength multiplier
    std::vector<double> eps_ladder;    // decreasing, for the defect slope
    std::vector<double> s0_ladder;     // decreasing beam widths
    std::vector<double> omega_ladder;  // increasing carriers
    double alpha_ref = 1.0;            // reference jump for recovery
};

/// Full experiment description, round-trippable through JSON.
struct SceneConfig {
    // metric
    std::string metric_kind = "flat";  // "flat", "diag-linear", "sampled"
    Vec3 metric_base{1.0, 1.0, 1.0};
    std::array<Vec3, 3> metric_slope{};
    std::vector<std::string> metric_files;  // sampled g* diagonal, one file per axis

    int dim = 2;
    Vec3 origin{};
    Vec3 extent{};
    std::array<int, 3> n{};
    double t_end = 1.0;
    double cfl = 0.45;

    SourceSpec src1, src2;
    Vec3 xi1{}, xi2{};  // spatial codirections; zeta is the forward null lift

    CoefficientSpec coeff;
    SolverConfig solver;
    RayParams rays;
    DetectionConfig detection;
    ExperimentParams experiment;
    std::uint64_t rng_seed = 0;

    static SceneConfig from_json_text(const std::string& text);
    static SceneConfig load(const std::string& path);
    std::string to_json_text() const;

    /// Cross-field consistency checks beyond per-field parsing.
    void validate() const;

    Metric build_metric() const;
    GridSpec build_grid(const Metric& m) const;
    /// Problem with sources lifted to null covectors for the built metric.
    Problem build_problem() const;

    /// FNV-1a hash of the canonical serialization, for manifests.
    std::uint64_t config_hash() const;
};

}  // namespace wavelab
