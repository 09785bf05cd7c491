#include <benchmark/benchmark.h>

#include "wavelab/raytrace.hpp"

using namespace wavelab;

namespace {

Metric bumpy() {
    std::array<Vec3, 3> slope{};
    slope[0] = {0.2, 0.1, 0.0};
    slope[1] = {-0.1, 0.05, 0.0};
    return Metric::diag_linear(2, {1.0, 1.5, 1.0}, slope);
}

void BM_TraceRay(benchmark::State& state) {
    Metric m = bumpy();
    PhasePoint start = null_lift(m, SpacetimePoint{0.0, {-0.4, 0.1, 0.0}},
                                 {1.0, 0.3, 0.0}, Orientation::Forward);
    const double step = 1.0 / static_cast<double>(state.range(0));
    for (auto _ : state) {
        Ray r = trace(m, start, 1.0, step);
        benchmark::DoNotOptimize(r.samples.data());
    }
}

void BM_PredictSupport(benchmark::State& state) {
    Metric m = Metric::flat(2);
    DomainBox box{{-1, -1, 0}, {1, 1, 0}};
    InterfaceSpec iface = InterfaceSpec::plane({1, 0, 0}, 0.0, 2);
    PhasePoint l1 = null_lift(m, SpacetimePoint{0.0, {-0.45, -0.2, 0.0}}, {2.0, 1.0, 0.0},
                              Orientation::Forward);
    PhasePoint l2 = null_lift(m, SpacetimePoint{0.0, {-0.45, 0.2, 0.0}}, {2.0, -1.0, 0.0},
                              Orientation::Forward);
    RayParams prm;
    prm.fan_count = static_cast<int>(state.range(0));
    prm.threads = static_cast<int>(state.range(1));
    for (auto _ : state) {
        PredictedSupport p = predict_support(m, box, 1.0, l1, 0.04, l2, 0.04, iface, prm);
        benchmark::DoNotOptimize(p.cone.samples.data());
    }
}

}  // namespace

BENCHMARK(BM_TraceRay)->Arg(1000)->Arg(10000);
BENCHMARK(BM_PredictSupport)->Args({17, 1})->Args({33, 1})->Args({33, 4});
