// Serial reference vs OpenMP replica execution on the same experiment.

#include <benchmark/benchmark.h>

#include "pingd/harness.hpp"
#include "pingd/verifier.hpp"

namespace {

pingd::ExperimentConfig bench_config(std::int64_t replicas) {
    pingd::ExperimentConfig c;
    c.function_id = "euclid";
    c.dim = 5;
    c.epsilon = 0.25;
    c.delta = 0.05;
    c.replicas = static_cast<std::uint64_t>(replicas);
    c.master_seed = 11;
    return c;
}

void BM_ReplicasSerial(benchmark::State& state) {
    const auto config = bench_config(state.range(0));
    const auto problem = pingd::make_problem(config);
    for (auto _ : state) {
        auto out = pingd::run_replicas(config, problem, pingd::Execution::Serial);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ReplicasOpenMP(benchmark::State& state) {
    const auto config = bench_config(state.range(0));
    const auto problem = pingd::make_problem(config);
    for (auto _ : state) {
        auto out = pingd::run_replicas(config, problem, pingd::Execution::OpenMP);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_CertifyEuclid(benchmark::State& state) {
    const auto fn = pingd::make_euclid(5);
    const pingd::Vector x(5, 0.01);
    for (auto _ : state) {
        pingd::RngStream rng(3, 0);
        auto cert = pingd::certify(*fn, x, 0.25, 0.05, static_cast<std::size_t>(state.range(0)), rng);
        benchmark::DoNotOptimize(cert.min_norm_value);
    }
}

}  // namespace

BENCHMARK(BM_ReplicasSerial)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ReplicasOpenMP)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CertifyEuclid)->Arg(100)->Arg(500)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
