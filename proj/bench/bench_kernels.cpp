#include <benchmark/benchmark.h>

#include "lcsnav/kernels.hpp"
#include "lcsnav/learning.hpp"

using namespace lcsnav;

namespace {

std::vector<Gene> population(std::size_t count, std::size_t n) {
    Rng rng(42);
    GeneInit init;
    std::vector<Gene> genes;
    for (std::size_t i = 0; i < count; ++i) genes.push_back(random_gene(rng, n, init));
    return genes;
}

std::vector<double> observation(std::size_t n) {
    Rng rng(7);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(-1.0, 1.0);
    return v;
}

void BM_ConditionsSerial(benchmark::State& state) {
    const auto genes = population(static_cast<std::size_t>(state.range(0)), 140);
    const auto values = observation(140);
    std::vector<double> out(genes.size());
    for (auto _ : state) {
        kernels::conditions_serial(genes, values, out);
        benchmark::DoNotOptimize(out.data());
    }
}

void BM_ConditionsParallel(benchmark::State& state) {
    const auto genes = population(static_cast<std::size_t>(state.range(0)), 140);
    const auto values = observation(140);
    std::vector<double> out(genes.size());
    for (auto _ : state) {
        kernels::conditions_parallel(genes, values, out);
        benchmark::DoNotOptimize(out.data());
    }
}

DomainEnsemble suite() {
    std::vector<GridDomain> d;
    for (int i = 0; i < 8; ++i) d.push_back(generate_office_map(100 + i, 60, 60));
    return DomainEnsemble::uniform(std::move(d));
}

void BM_EvaluateSerial(benchmark::State& state) {
    static const DomainEnsemble e = suite();
    const PredicateRegistry reg = build_registry({});
    Rng rng(1);
    const GeneSet G = initial_population(reg, {}, rng);
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_policy_serial(e, G, reg, {}).mean);
}

void BM_EvaluateParallel(benchmark::State& state) {
    static const DomainEnsemble e = suite();
    const PredicateRegistry reg = build_registry({});
    Rng rng(1);
    const GeneSet G = initial_population(reg, {}, rng);
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_policy(e, G, reg, {}).mean);
}

}  // namespace

BENCHMARK(BM_ConditionsSerial)->Arg(200)->Arg(2000)->Arg(20000);
BENCHMARK(BM_ConditionsParallel)->Arg(200)->Arg(2000)->Arg(20000);
BENCHMARK(BM_EvaluateSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvaluateParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
