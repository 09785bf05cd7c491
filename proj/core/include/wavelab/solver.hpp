#pragma once

#include <functional>
#include <vector>

#include "wavelab/fields.hpp"

namespace wavelab {

struct SolverConfig {
    int sponge_width = 16;           // cells
    double sponge_strength = 40.0;   // 1/time at the outermost cell
    double blowup_factor = 1e6;      // cap = factor * max initial amplitude
    int picard_max_iter = 12;
    double picard_tol = 1e-10;
    enum class Boundary { Sponge, Periodic } boundary = Boundary::Sponge;
    int threads = 1;
};

/// out = flux-form divergence sum_a D-_a( avg(sqrt(det g) g^aa) D+_a u ) / sqrt(det g),
/// i.e. -Delta_g u in the positive Laplace-Beltrami convention.
void apply_laplacian_flux(const GridSpec& grid, const Metric& m, const SolverConfig& cfg,
                          const std::vector<double>& u, std::vector<double>& out);

/// Single leapfrog step; the spec-level stencil update exposed for tests.
std::vector<double> leapfrog_step(const std::vector<double>& u_prev,
                                  const std::vector<double>& u_curr,
                                  const std::vector<double>* a_grid,
                                  const std::vector<double>* q_grid, const double* f_slice,
                                  const GridSpec& grid, const Metric& m, const SolverConfig& cfg);

/// Low-level leapfrog engine with explicit slice seeding.
class Stepper {
  public:
    Stepper(const GridSpec& grid, const Metric& m, const SolverConfig& cfg);

    void set_nonlinear(const std::vector<double>* a) { a_ = a; }
    void set_potential(const std::vector<double>* q) { q_ = q; }

    /// Seeds from Cauchy data (u, u_t) at t = 0 with a second-order start.
    void seed_cauchy(const std::vector<double>& u0, const std::vector<double>& v0,
                     const double* f0 = nullptr);
    /// Seeds the first two slices directly (e.g. for time reversal).
    void seed_slices(std::vector<double> s0, std::vector<double> s1);

    /// Advances one step with optional source slice at the current time level.
    const std::vector<double>& advance(const double* f = nullptr);

    const std::vector<double>& curr() const { return curr_; }
    const std::vector<double>& prev() const { return prev_; }
    int step_index() const { return k_; }

  private:
    void precompute();
    void check_blowup(const std::vector<double>& u, int step);

    const GridSpec& grid_;
    const Metric& metric_;
    SolverConfig cfg_;
    const std::vector<double>* a_ = nullptr;
    const std::vector<double>* q_ = nullptr;
    std::vector<double> prev_, curr_, next_;
    std::vector<std::vector<double>> face_w_;  // per-axis sqrt(det g) g^aa / h^2 at centers
    std::vector<double> inv_sqrtg_;
    std::vector<double> sponge_;
    double cap_ = 0.0;  // 0 = not yet determined
    int k_ = 0;
};

/// Source history: slice pointer at time level k, or nullptr for none.
using SourceFn = std::function<const double*(int)>;

/// Zero-data or Cauchy linear solve; realizes the causal inverse Q when the
/// initial data is zero and the source is causal.
WaveField solve_linear(const GridSpec& grid, const Metric& m, const SolverConfig& cfg,
                       const CauchyData* initial, const SourceFn& source = nullptr,
                       const std::vector<double>* q_grid = nullptr);

/// Scene-level problem bundle shared by the solver/response/inversion layers.
struct Problem {
    GridSpec grid;
    Metric metric;
    SolverConfig cfg;
    SourceSpec src1, src2;
    CoefficientSpec coeff;
};

/// Full nonlinear evolution with initial data eps1*pulse1 + eps2*pulse2.
WaveField solve_semilinear(const Problem& prob, double eps1, double eps2);

struct PicardResult {
    WaveField field;
    std::vector<double> B;  // L4 increments per iteration
};

/// Successive-approximation solve: each iterate is a linear solve with the
/// previous iterate's squared field as source.
PicardResult picard_solve(const Problem& prob, double eps1, double eps2);

/// (max - min) / mean of the energy seminorm over the time window.
double energy_drift(const WaveField& field, const Metric& m, double t_lo, double t_hi,
                    const std::optional<Box>& region = std::nullopt);

}  // namespace wavelab
