// Serial reference vs OpenMP kernels for graph construction and Viterbi
// relaxation. Run with --benchmark_time_unit=ms.
#include <benchmark/benchmark.h>

#include "retailopt/discrete_opt.hpp"
#include "retailopt/rng.hpp"
#include "retailopt/synth.hpp"
#include "retailopt/tape.hpp"

using namespace retailopt;

namespace {

Environment shelf_env() {
    ScenarioConfig cfg;
    return generate_environment(cfg);
}

std::vector<PlanePoint> random_vertices(int n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<PlanePoint> v;
    v.reserve(n);
    for (int i = 0; i < n; ++i) v.push_back({rng.uniform(), rng.uniform()});
    return v;
}

ProjectionGraph sample_graph(int n_samples) {
    const Environment env = shelf_env();
    const std::vector<PlanePoint> qp = random_vertices(32, 3);
    ViterbiConfig cfg;
    cfg.n_samples = n_samples;
    cfg.rng_seed = 9;
    return build_graph(qp, env, cfg);
}

void BM_AdjacencySerial(benchmark::State& state) {
    const Environment env = shelf_env();
    const auto vertices = random_vertices(static_cast<int>(state.range(0)), 1);
    for (auto _ : state) benchmark::DoNotOptimize(adjacency_rows_serial(vertices, env));
}

void BM_AdjacencyParallel(benchmark::State& state) {
    const Environment env = shelf_env();
    const auto vertices = random_vertices(static_cast<int>(state.range(0)), 1);
    for (auto _ : state) benchmark::DoNotOptimize(adjacency_rows_parallel(vertices, env));
}

void BM_ViterbiRelaxSerial(benchmark::State& state) {
    const ProjectionGraph g = sample_graph(static_cast<int>(state.range(0)));
    Rng rng(4);
    std::vector<double> prev(g.num_vertices());
    for (auto& c : prev) c = rng.uniform();
    std::vector<double> cost(g.num_vertices());
    std::vector<int> backptr(g.num_vertices());
    for (auto _ : state) {
        viterbi_relax_serial(g, prev, cost, backptr);
        benchmark::DoNotOptimize(cost.data());
    }
}

void BM_ViterbiRelaxParallel(benchmark::State& state) {
    const ProjectionGraph g = sample_graph(static_cast<int>(state.range(0)));
    Rng rng(4);
    std::vector<double> prev(g.num_vertices());
    for (auto& c : prev) c = rng.uniform();
    std::vector<double> cost(g.num_vertices());
    std::vector<int> backptr(g.num_vertices());
    for (auto _ : state) {
        viterbi_relax_parallel(g, prev, cost, backptr);
        benchmark::DoNotOptimize(cost.data());
    }
}

void BM_Gemm(benchmark::State& state) {
    Rng rng(5);
    const int n = static_cast<int>(state.range(0));
    Tensor a(n, 35), b(35, 64), c(n, 64);
    for (auto& x : a.v) x = rng.uniform();
    for (auto& x : b.v) x = rng.uniform();
    for (auto _ : state) {
        gemm(a, false, b, false, c, false);
        benchmark::DoNotOptimize(c.v.data());
    }
}

}  // namespace

BENCHMARK(BM_AdjacencySerial)->Arg(250)->Arg(1000);
BENCHMARK(BM_AdjacencyParallel)->Arg(250)->Arg(1000);
BENCHMARK(BM_ViterbiRelaxSerial)->Arg(500)->Arg(1000);
BENCHMARK(BM_ViterbiRelaxParallel)->Arg(500)->Arg(1000);
BENCHMARK(BM_Gemm)->Arg(600)->Arg(1200);

BENCHMARK_MAIN();
