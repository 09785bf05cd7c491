#include "wavelab/response.hpp"

#include <cmath>

namespace wavelab {

WaveField born_single(const WaveField& w1, const WaveField& w2, const std::vector<double>& a_grid,
                      const Metric& m, const SolverConfig& cfg) {
    const GridSpec& g = w1.grid;
    if (w2.grid.cells() != g.cells() || w2.slices.size() != w1.slices.size())
        throw ValidationError("born source histories on mismatched grids");
    std::vector<double> src(g.cells());
    SourceFn fn = [&](int k) -> const double* {
        const auto& s1 = w1.slices[static_cast<std::size_t>(k)];
        const auto& s2 = w2.slices[static_cast<std::size_t>(k)];
        for (std::size_t c = 0; c < src.size(); ++c) src[c] = a_grid[c] * s1[c] * s2[c];
        return src.data();
    };
    return solve_linear(g, m, cfg, nullptr, fn);
}

BornTerms born_terms(const WaveField& v1, const WaveField& v2, const std::vector<double>& a_grid,
                     const Metric& m, const SolverConfig& cfg) {
    BornTerms out;
    out.X1 = born_single(v1, v1, a_grid, m, cfg);
    out.X2 = born_single(v2, v2, a_grid, m, cfg);
    out.X12 = born_single(v1, v2, a_grid, m, cfg);
    return out;
}

namespace {

CauchyData summed_pulses(const Problem& prob) {
    CauchyData p1 = build_pulse(prob.grid, prob.metric, prob.src1);
    CauchyData p2 = build_pulse(prob.grid, prob.metric, prob.src2);
    for (std::size_t c = 0; c < p1.u0.size(); ++c) {
        p1.u0[c] += p2.u0[c];
        p1.u1[c] += p2.u1[c];
    }
    return p1;
}

}  // namespace

double expansion_defect(const Problem& prob, double eps) {
    std::vector<double> a = build_coefficient(prob.grid, prob.coeff);
    std::vector<double> q = build_potential(prob.grid, prob.coeff);
    const std::vector<double>* qp = prob.coeff.potential_enabled ? &q : nullptr;

    CauchyData unit = summed_pulses(prob);
    WaveField v = solve_linear(prob.grid, prob.metric, prob.cfg, &unit, nullptr, qp);
    WaveField X = born_single(v, v, a, prob.metric, prob.cfg);

    // Nonlinear run seeded with the scaled copy of the same data so that the
    // linear part cancels to round-off.
    CauchyData scaled;
    scaled.u0.resize(unit.u0.size());
    scaled.u1.resize(unit.u1.size());
    for (std::size_t c = 0; c < unit.u0.size(); ++c) {
        scaled.u0[c] = eps * unit.u0[c];
        scaled.u1[c] = eps * unit.u1[c];
    }
    Stepper st(prob.grid, prob.metric, prob.cfg);
    st.set_nonlinear(&a);
    if (qp) st.set_potential(qp);
    st.seed_cauchy(scaled.u0, scaled.u1);

    WaveField r;
    r.grid = prob.grid;
    r.slices.reserve(prob.grid.n_t + 1);
    const double e2 = eps * eps;
    auto push_defect = [&](const std::vector<double>& u, int k) {
        std::vector<double> d(u.size());
        const auto& vk = v.slices[static_cast<std::size_t>(k)];
        const auto& xk = X.slices[static_cast<std::size_t>(k)];
        for (std::size_t c = 0; c < u.size(); ++c) d[c] = u[c] - eps * vk[c] + e2 * xk[c];
        r.slices.push_back(std::move(d));
    };
    push_defect(st.prev(), 0);
    push_defect(st.curr(), 1);
    for (int k = 1; k < prob.grid.n_t; ++k) push_defect(st.advance(), k + 1);
    return field_norm(r, NormKind::L2, prob.metric);
}

CrossResponse cross_difference(const Problem& prob, double eps1, double eps2) {
    CrossResponse out;
    out.eps1 = eps1;
    out.eps2 = eps2;
    out.field.grid = prob.grid;
    const double inv = 1.0 / (eps1 * eps2);

    const double corners[4][3] = {
        {eps1, eps2, +inv}, {eps1, 0.0, -inv}, {0.0, eps2, -inv}, {0.0, 0.0, +inv}};
    for (const auto& c : corners) {
        WaveField u = solve_semilinear(prob, c[0], c[1]);
        if (out.field.slices.empty()) {
            out.field.slices.assign(u.slices.size(),
                                    std::vector<double>(prob.grid.cells(), 0.0));
        }
        for (std::size_t k = 0; k < u.slices.size(); ++k)
            for (std::size_t i = 0; i < u.slices[k].size(); ++i)
                out.field.slices[k][i] += c[2] * u.slices[k][i];
    }
    return out;
}

PerturbationSplit perturbation_split(const Problem& prob, double delta, double eps) {
    if (delta == 0.0) throw ValidationError("delta must be nonzero", "delta");
    PerturbationSplit out;

    // Linear part: a off, potential at delta vs zero, unit pulse amplitudes.
    CauchyData unit = summed_pulses(prob);
    std::vector<double> q_unit = build_potential(prob.grid, prob.coeff);
    std::vector<double> q_delta(q_unit.size());
    for (std::size_t c = 0; c < q_unit.size(); ++c) q_delta[c] = delta * q_unit[c];
    WaveField u_q = solve_linear(prob.grid, prob.metric, prob.cfg, &unit, nullptr, &q_delta);
    WaveField u_0 = solve_linear(prob.grid, prob.metric, prob.cfg, &unit, nullptr, nullptr);
    out.V_est.grid = prob.grid;
    out.V_est.slices.resize(u_q.slices.size());
    for (std::size_t k = 0; k < u_q.slices.size(); ++k) {
        out.V_est.slices[k].resize(u_q.slices[k].size());
        for (std::size_t c = 0; c < u_q.slices[k].size(); ++c)
            out.V_est.slices[k][c] = (u_q.slices[k][c] - u_0.slices[k][c]) / delta;
    }

    // Nonlinear part: both a and the delta-scaled potential on.
    Problem pd = prob;
    pd.coeff.potential_enabled = true;
    pd.coeff.potential_strength = prob.coeff.potential_strength * delta;
    CrossResponse cr = cross_difference(pd, eps, eps);
    out.W_est = std::move(cr.field);
    for (auto& slice : out.W_est.slices)
        for (auto& v : slice) v /= delta;
    return out;
}

PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw ValidationError("power-law fit needs at least two matched samples");
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (x[i] <= 0.0 || y[i] <= 0.0)
            throw ValidationError("power-law fit requires positive samples");
        double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        syy += ly * ly;
    }
    const double dn = static_cast<double>(n);
    double cov = sxy - sx * sy / dn;
    double varx = sxx - sx * sx / dn;
    double vary = syy - sy * sy / dn;
    PowerFit fit;
    fit.exponent = cov / varx;
    fit.r2 = (vary > 0.0) ? (cov * cov) / (varx * vary) : 1.0;
    return fit;
}

}  // namespace wavelab
