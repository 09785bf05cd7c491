#include <benchmark/benchmark.h>

#include <cmath>

#include "wavelab/inversion.hpp"

using namespace wavelab;

namespace {

void BM_TubeEnergy(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Metric m = Metric::flat(2);
    GridSpec g = GridSpec::make(2, {-1, -1, 0}, {2, 2, 0}, {n, n, 1}, 0.4, 0.45, m);
    WaveField f;
    f.grid = g;
    for (int k = 0; k <= g.n_t; ++k) {
        std::vector<double> slice(g.cells());
        for (std::size_t c = 0; c < slice.size(); ++c) {
            Vec3 x = g.cell_center(c);
            slice[c] = std::cos(30.0 * x[0]) * std::exp(-4.0 * x[1] * x[1]);
        }
        f.slices.push_back(std::move(slice));
    }
    Surface s;
    s.id = "line";
    for (double t = 0.0; t <= g.n_t * g.dt; t += g.dt)
        for (double y = -0.6; y <= 0.6; y += 0.02) {
            SurfaceSample ss;
            ss.p = {t, {0.0, y, 0.0}};
            ss.tangent = {1.0, {0.0, 0.0, 0.0}};
            ss.normal = {0.0, {1.0, 0.0, 0.0}};
            s.samples.push_back(ss);
        }
    for (auto _ : state) {
        double e = tube_energy(f, s, 3 * g.h, 1.0);
        benchmark::DoNotOptimize(e);
    }
}

}  // namespace

BENCHMARK(BM_TubeEnergy)->Arg(96)->Arg(192);
