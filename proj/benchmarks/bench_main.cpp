#include <benchmark/benchmark.h>

#include "glasscav/coupling.hpp"
#include "glasscav/dynamics.hpp"
#include "glasscav/frft.hpp"
#include "glasscav/glass.hpp"
#include "glasscav/greens.hpp"
#include "glasscav/imaging.hpp"
#include "glasscav/rng.hpp"

using namespace glasscav;

namespace {

ComplexFieldImage synth_fixture(int n_px) {
    CavityGeometry g;
    Rng rng(1);
    Eigen::VectorXd raw(16);
    for (int i = 0; i < 16; ++i) raw(i) = rng.normal() > 0 ? 1.0 : -1.0;
    SpinConfiguration c;
    c.raw_amplitudes = raw;
    c.s = raw.normalized();
    SynthesisOptions so;
    so.grid.n_px = n_px;
    return synthesize_field(c, j1_fixture(), g, so);
}

}  // namespace

static void MehlerKernel(benchmark::State& state) {
    const Vec2 r{0.3, -0.2}, rp{0.6, 0.4};
    for (auto _ : state) {
        benchmark::DoNotOptimize(mehler_kernel(r, rp, Complex(0.05, 0.3)));
    }
}
BENCHMARK(MehlerKernel);

static void Greens47(benchmark::State& state) {
    CavityGeometry g;
    const Vec2 r{40.0, -20.0}, rp{-60.0, 10.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(greens_47_nonlocal(r, rp, g));
    }
}
BENCHMARK(Greens47);

static void AssembleJ16(benchmark::State& state) {
    CavityGeometry g;
    const auto sites = j1_fixture();
    for (auto _ : state) {
        benchmark::DoNotOptimize(assemble_J(sites, g));
    }
}
BENCHMARK(AssembleJ16);

static void FrftApply(benchmark::State& state) {
    const ComplexFieldImage img = synth_fixture(static_cast<int>(state.range(0)));
    FrftOptions opts;
    opts.warn_on_aliasing = false;
    for (auto _ : state) {
        benchmark::DoNotOptimize(frft_apply(img, 4.0 * 3.14159265358979 / 7.0, opts));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(FrftApply)->Arg(256)->Arg(384)->Arg(512)->Complexity();

static void SynthesizeField(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(synth_fixture(384));
    }
}
BENCHMARK(SynthesizeField);

static void EvolveReplica(benchmark::State& state) {
    CavityGeometry g;
    const CouplingMatrix Jm = assemble_J(j1_fixture(), g);
    PhysicalParams phys;
    RampSchedule sched;
    sched.t_ramp_s = 1e-3 * state.range(0);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(evolve_replica(Jm, phys, sched, Engine::semiclassical, seed++));
    }
}
BENCHMARK(EvolveReplica)->Arg(1)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

static void KCorrelator200(benchmark::State& state) {
    Rng rng(3);
    Eigen::MatrixXd rows(200, 16);
    for (int a = 0; a < 200; ++a)
        for (int i = 0; i < 16; ++i) rows(a, i) = (rng.normal() > 0 ? 1.0 : -1.0) / 4.0;
    const OverlapMatrix q = overlap_matrix(rows);
    for (auto _ : state) {
        benchmark::DoNotOptimize(k_correlator(q));
    }
    state.SetItemsProcessed(state.iterations() * 200 * 199 * 198 / 6);
}
BENCHMARK(KCorrelator200)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
