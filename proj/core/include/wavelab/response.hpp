#pragma once

#include "wavelab/solver.hpp"

namespace wavelab {

/// Second-order source terms of the small-amplitude expansion, each a
/// zero-data causal solve driven by a pointwise product of linear histories.
struct BornTerms {
    WaveField X1;   // response to a * v1^2
    WaveField X2;   // response to a * v2^2
    WaveField X12;  // response to a * v1 * v2
};

BornTerms born_terms(const WaveField& v1, const WaveField& v2, const std::vector<double>& a_grid,
                     const Metric& m, const SolverConfig& cfg);

/// Single Born solve for an arbitrary product source a * w1 * w2.
WaveField born_single(const WaveField& w1, const WaveField& w2, const std::vector<double>& a_grid,
                      const Metric& m, const SolverConfig& cfg);

/// L2 norm of u(eps) - eps*v + eps^2 * Q(a v^2) where u is the nonlinear run
/// with data eps*(pulse1 + pulse2) and v the matching linear run.
double expansion_defect(const Problem& prob, double eps);

struct CrossResponse {
    WaveField field;  // estimate of the mixed second eps-derivative at 0
    double eps1 = 0.0, eps2 = 0.0;
};

/// Four-corner finite difference [u(e1,e2) - u(e1,0) - u(0,e2) + u(0,0)]/(e1 e2).
/// Converges to -2 Q(a v1 v2) as the amplitudes shrink.
CrossResponse cross_difference(const Problem& prob, double eps1, double eps2);

struct PerturbationSplit {
    WaveField V_est;  // first-order response to the potential, from linear runs
    WaveField W_est;  // mixed nonlinear response per unit potential strength
};

/// Splits the response to a small potential delta*q into the linear part V and
/// the nonlinear interaction part W. V uses two linear runs with a forced to
/// zero; W is the cross difference (a and q both on) divided by delta.
PerturbationSplit perturbation_split(const Problem& prob, double delta, double eps);

/// Least-squares slope of log(y) vs log(x) with its R^2.
struct PowerFit {
    double exponent = 0.0;
    double r2 = 0.0;
};
PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace wavelab
