#include <benchmark/benchmark.h>

#include "tempdisagg/covariance.hpp"
#include "tempdisagg/dgp.hpp"
#include "tempdisagg/gls.hpp"
#include "tempdisagg/sparse.hpp"

using namespace tempdisagg;

namespace {

DgpOutput instance(Eigen::Index n_low, Eigen::Index d) {
    DgpConfig cfg;
    cfg.n_low = n_low;
    cfg.n_high = 4 * n_low;
    cfg.d = d;
    cfg.rho = 0.8;
    cfg.seed = 1;
    return generate(cfg);
}

void BM_Ar1Shape(benchmark::State& state) {
    const auto p = static_cast<Eigen::Index>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(build_ar1_shape(0.7, p));
}
BENCHMARK(BM_Ar1Shape)->Arg(68)->Arg(200)->Arg(800);

void BM_LittermanShape(benchmark::State& state) {
    const auto p = static_cast<Eigen::Index>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(build_litterman_shape(0.7, p));
}
BENCHMARK(BM_LittermanShape)->Arg(68)->Arg(200)->Arg(800);

void BM_LarsPath(benchmark::State& state) {
    const DgpOutput data = instance(state.range(0), state.range(1));
    const Eigen::MatrixXd x_q = aggregate_columns(data.x, data.spec);
    for (auto _ : state) benchmark::DoNotOptimize(lars_path(data.y_low, x_q));
}
BENCHMARK(BM_LarsPath)->Args({17, 100})->Args({40, 20})->Args({100, 300});

void BM_ChowLin(benchmark::State& state) {
    const DgpOutput data = instance(state.range(0), 3);
    const std::vector<double> grid = default_rho_grid();
    for (auto _ : state) benchmark::DoNotOptimize(disaggregate(data.y_low, data.x, data.spec, Method::ChowLin, grid));
}
BENCHMARK(BM_ChowLin)->Arg(17)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_SpTd(benchmark::State& state) {
    const DgpOutput data = instance(state.range(0), state.range(1));
    const std::vector<double> grid = default_rho_grid();
    for (auto _ : state) benchmark::DoNotOptimize(disaggregate(data.y_low, data.x, data.spec, Method::SpTD, grid));
}
BENCHMARK(BM_SpTd)->Args({17, 100})->Args({40, 20})->Unit(benchmark::kMillisecond);

void BM_AdaptiveSpTd(benchmark::State& state) {
    const DgpOutput data = instance(17, 100);
    const std::vector<double> grid = default_rho_grid();
    for (auto _ : state)
        benchmark::DoNotOptimize(disaggregate(data.y_low, data.x, data.spec, Method::AdaptiveSpTD, grid));
}
BENCHMARK(BM_AdaptiveSpTd)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
