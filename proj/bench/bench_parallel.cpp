// Parallel kernels against their serial references.

#include "qreset/jaynes_cummings.hpp"
#include "qreset/montecarlo.hpp"

#include <benchmark/benchmark.h>

#include <vector>

namespace {

qreset::TrajectoryConfig ensemble_config(unsigned workers)
{
    qreset::TrajectoryConfig cfg(qreset::make_jc_hamiltonian(0.1, 37), qreset::Scheme::One,
                                 qreset::make_exponential(0.8));
    cfg.n_trajectories = 100000;
    cfg.workers = workers;
    return cfg;
}

std::vector<double> time_grid(std::size_t n)
{
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i)
        t[i] = 60.0 * static_cast<double>(i) / static_cast<double>(n - 1);
    return t;
}

void BM_EnsembleSerial(benchmark::State& state)
{
    const auto cfg = ensemble_config(1);
    for (auto _ : state)
        benchmark::DoNotOptimize(qreset::run_ensemble_serial(cfg).mean);
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.n_trajectories));
}

void BM_EnsembleParallel(benchmark::State& state)
{
    const auto cfg = ensemble_config(static_cast<unsigned>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(qreset::run_ensemble(cfg).mean);
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.n_trajectories));
}

void BM_PdfGridSerial(benchmark::State& state)
{
    const auto sector = qreset::make_jc_sector(0.1, 37, 0.8);
    const auto t = time_grid(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(qreset::pdf_grid_serial(sector, qreset::Scheme::One, t).data());
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_PdfGridParallel(benchmark::State& state)
{
    const auto sector = qreset::make_jc_sector(0.1, 37, 0.8);
    const auto t = time_grid(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(qreset::pdf_grid(sector, qreset::Scheme::One, t).data());
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

} // namespace

BENCHMARK(BM_EnsembleSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnsembleParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PdfGridSerial)->Arg(1000)->Arg(100000);
BENCHMARK(BM_PdfGridParallel)->Arg(1000)->Arg(100000);

BENCHMARK_MAIN();
