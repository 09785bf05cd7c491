#include <benchmark/benchmark.h>

#include <cmath>

#include "wavelab/solver.hpp"

using namespace wavelab;

namespace {

/// One leapfrog step on an n x n flat grid with a jump coefficient.
void BM_LeapfrogStep(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Metric m = Metric::flat(2);
    GridSpec g = GridSpec::make(2, {-1, -1, 0}, {2, 2, 0}, {n, n, 1}, 1.0, 0.45, m);
    SolverConfig cfg;
    cfg.threads = static_cast<int>(state.range(1));

    CoefficientSpec spec;
    spec.iface = InterfaceSpec::plane({1, 0, 0}, 0.0, 2);
    spec.alpha = 1.0;
    std::vector<double> a = build_coefficient(g, spec);

    Stepper st(g, m, cfg);
    st.set_nonlinear(&a);
    std::vector<double> u0(g.cells()), v0(g.cells(), 0.0);
    for (std::size_t c = 0; c < u0.size(); ++c) {
        Vec3 x = g.cell_center(c);
        u0[c] = 0.01 * std::exp(-20.0 * (x[0] * x[0] + x[1] * x[1]));
    }
    st.seed_cauchy(u0, v0);

    for (auto _ : state) {
        benchmark::DoNotOptimize(st.advance().data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.cells()));
}

void BM_LaplacianFlux(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Metric m = Metric::flat(2);
    GridSpec g = GridSpec::make(2, {-1, -1, 0}, {2, 2, 0}, {n, n, 1}, 1.0, 0.45, m);
    SolverConfig cfg;
    std::vector<double> u(g.cells());
    for (std::size_t c = 0; c < u.size(); ++c) {
        Vec3 x = g.cell_center(c);
        u[c] = std::sin(3.0 * x[0]) * std::cos(2.0 * x[1]);
    }
    std::vector<double> out;
    for (auto _ : state) {
        apply_laplacian_flux(g, m, cfg, u, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.cells()));
}

}  // namespace

BENCHMARK(BM_LeapfrogStep)->Args({128, 1})->Args({128, 4})->Args({256, 1})->Args({256, 4});
BENCHMARK(BM_LaplacianFlux)->Arg(128)->Arg(256)->Arg(512);
