//! Microbenchmarks for the hot paths of one replicate.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "lifsel/design.hpp"
#include "lifsel/dwt.hpp"
#include "lifsel/functional.hpp"
#include "lifsel/functional_spec.hpp"
#include "lifsel/observation.hpp"
#include "lifsel/selector.hpp"
#include "lifsel/wavelet.hpp"

using namespace lifsel;

namespace {

std::vector<double> noise(std::size_t n)
{
    std::mt19937_64 gen(1);
    std::normal_distribution<double> normal;
    std::vector<double> x(n);
    for (auto& v : x)
        v = normal(gen);
    return x;
}

void periodic_dwt_d20(benchmark::State& state)
{
    const auto x = noise(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(periodic_dwt(x, daubechies20_filter(), 2));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(periodic_dwt_d20)->RangeMultiplier(4)->Range(256, 65536)->Complexity(benchmark::oN);

void cascade_d20(benchmark::State& state)
{
    for (auto _ : state)
        benchmark::DoNotOptimize(CascadeTable(daubechies20_filter(), static_cast<int>(state.range(0))));
}
BENCHMARK(cascade_d20)->DenseRange(10, 16, 2);

void crit_and_select(benchmark::State& state)
{
    const auto size = static_cast<Eigen::Index>(state.range(0));
    const auto est = noise(static_cast<std::size_t>(size));
    std::vector<double> pen(static_cast<std::size_t>(size), 0.1);
    const Eigen::MatrixXd H = Eigen::MatrixXd::Constant(size, size, 0.2);
    for (auto _ : state) {
        const auto crit = crit_hat(est, H, pen);
        benchmark::DoNotOptimize(select_m_hat(crit, 256));
    }
}
BENCHMARK(crit_and_select)->Arg(8)->Arg(16)->Arg(64);

void bank_estimate(benchmark::State& state, BasisFamily basis)
{
    const std::size_t n = 256;
    const auto model = NoiseModel::regression(n, 0.2);
    const auto chain = ModelChain::dyadic(basis, 1, 8);
    const auto rep = build_functional_rep(FunctionalSpec::point(0.25), chain, model);
    const CoefficientDesign design(chain, model);
    const EstimatorBank bank(rep, design);
    const auto y = noise(n);
    for (auto _ : state)
        benchmark::DoNotOptimize(bank.estimate_all(y));
}
BENCHMARK_CAPTURE(bank_estimate, haar, BasisFamily::haar());
BENCHMARK_CAPTURE(bank_estimate, d20, BasisFamily::daubechies20());

} // namespace

BENCHMARK_MAIN();
