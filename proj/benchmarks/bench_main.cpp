#include <benchmark/benchmark.h>

#include "kbound/growth.hpp"
#include "kbound/lattice.hpp"
#include "kbound/loop_select.hpp"
#include "kbound/scenarios.hpp"
#include "kbound/strip_analysis.hpp"

using namespace kbound;

namespace {

const FermiStrip& strip() {
    static const FermiStrip s = build_fermi_strip(two_hole_domain(), single_hole_loop(), 0.5);
    return s;
}

void BM_LpStripIntegrals(benchmark::State& state) {
    const auto s = static_cast<std::size_t>(state.range(0));
    const auto S = place_punctures(Strategy::on_strip_random, s, strip(), 1);
    const double ps[] = {1.0, 1.5, 1.9, 1.99};
    for (auto _ : state) benchmark::DoNotOptimize(lp_strip_integrals(strip(), S, ps));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_LpStripIntegrals)->RangeMultiplier(4)->Range(4, 1024)->Unit(benchmark::kMillisecond);

void BM_SelectU0(benchmark::State& state) {
    const auto s = static_cast<std::size_t>(state.range(0));
    const auto S = place_punctures(Strategy::on_loop_equispaced, s, strip(), 1);
    for (auto _ : state) benchmark::DoNotOptimize(select_u0(strip(), S, p_schedule(s)));
}
BENCHMARK(BM_SelectU0)->RangeMultiplier(4)->Range(4, 1024)->Unit(benchmark::kMillisecond);

void BM_CountDisplacement(benchmark::State& state) {
    const auto L = TorusLattice::standard(2);
    const double H = static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(count_displacement(L, H));
}
BENCHMARK(BM_CountDisplacement)->RangeMultiplier(2)->Range(16, 256);

}  // namespace
BENCHMARK_MAIN();
