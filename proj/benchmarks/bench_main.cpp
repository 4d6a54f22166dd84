#include <benchmark/benchmark.h>

#include "walkbounds/bounds.hpp"
#include "walkbounds/exact.hpp"
#include "walkbounds/generators.hpp"
#include "walkbounds/simulate.hpp"

namespace wb = walkbounds;

namespace {

wb::GridSpec grid_spec(int side) {
    wb::GridSpec spec;
    spec.width = side;
    spec.height = side;
    spec.laziness = 0.2;
    spec.inner_radius = 2;
    spec.outer_radius = 4;
    return spec;
}

void BM_GreensSolverGrid(benchmark::State& state) {
    const wb::Generated g = wb::grid_annulus(grid_spec(static_cast<int>(state.range(0))));
    std::vector<int> ab = g.partition.a_states();
    ab.insert(ab.end(), g.partition.b_states().begin(), g.partition.b_states().end());
    const int probe = ab.front();
    for (auto _ : state) {
        wb::GreensSolver solver(g.chain, ab);
        benchmark::DoNotOptimize(solver.entry(probe, probe));
    }
    state.SetLabel(std::to_string(g.chain.size()) + " states");
}
BENCHMARK(BM_GreensSolverGrid)->Arg(11)->Arg(21)->Arg(41)->Unit(benchmark::kMillisecond);

void BM_SampledReportGrid(benchmark::State& state) {
    const wb::Generated g = wb::grid_annulus(grid_spec(static_cast<int>(state.range(0))));
    wb::ReportOptions options;
    options.sample = 50;
    options.sample_seed = 7;
    for (auto _ : state) {
        benchmark::DoNotOptimize(wb::full_report(g.chain, g.partition, options));
    }
    state.SetLabel(std::to_string(g.chain.size()) + " states, 50 rows");
}
BENCHMARK(BM_SampledReportGrid)->Arg(21)->Arg(41)->Unit(benchmark::kMillisecond);

void BM_ExcursionStats(benchmark::State& state) {
    const wb::Generated g = wb::punctured_annulus(grid_spec(static_cast<int>(state.range(0))), 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(wb::excursion_stats(g.chain, g.partition));
    }
}
BENCHMARK(BM_ExcursionStats)->Arg(11)->Arg(21)->Arg(41)->Unit(benchmark::kMillisecond);

void BM_HittingTimePaths(benchmark::State& state) {
    const auto [chain, partition] = wb::triad();
    const auto to_c = wb::StoppingSpec::of(chain, partition.c_states());
    wb::SimOptions opt;
    opt.n_paths = state.range(0);
    opt.seed = 99;
    for (auto _ : state) {
        benchmark::DoNotOptimize(wb::estimate_hitting_time(chain, to_c, 0, opt));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_HittingTimePaths)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
