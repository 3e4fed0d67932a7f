#include <benchmark/benchmark.h>

#include <numeric>
#include <random>

#include "pcskm/evaluation.hpp"

namespace {

using namespace pcskm;

LabeledDataset bench_data(benchmark::State& state) {
    return generate_brodinova({3, static_cast<int>(state.range(0)), 5, 5, 6.0}, 1);
}

ConstraintSet bench_constraints(const LabeledDataset& ds, double fraction) {
    std::vector<std::size_t> all(ds.matrix.n());
    std::iota(all.begin(), all.end(), 0);
    return sample_constraints(build_constraint_pool(*ds.labels, all), fraction, KindFilter::both, 3);
}

void BM_Lloyd(benchmark::State& state) {
    const auto ds = bench_data(state);
    const auto init = dkmpp_init(ds.matrix, 3);
    for (auto _ : state) benchmark::DoNotOptimize(run_lkm(ds.matrix, init));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ds.matrix.n()));
}
BENCHMARK(BM_Lloyd)->Arg(40)->Arg(400)->Arg(4000);

void BM_SparseKMeans(benchmark::State& state) {
    const auto ds = bench_data(state);
    const auto init = dkmpp_init(ds.matrix, 3);
    for (auto _ : state) benchmark::DoNotOptimize(run_skm(ds.matrix, init, 1.5));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ds.matrix.n()));
}
BENCHMARK(BM_SparseKMeans)->Arg(40)->Arg(400)->Arg(4000);

void BM_PCSKM(benchmark::State& state) {
    const auto ds = bench_data(state);
    const auto cs = bench_constraints(ds, 0.01);
    const auto init = seeded_init(ds.matrix, 3, cs);
    for (auto _ : state) benchmark::DoNotOptimize(run_pcskm(ds.matrix, init, 1.5, cs));
    state.counters["constraints"] = static_cast<double>(cs.size());
}
BENCHMARK(BM_PCSKM)->Arg(40)->Arg(400);

void BM_MPCKM(benchmark::State& state) {
    const auto ds = bench_data(state);
    const auto cs = bench_constraints(ds, 0.01);
    const auto init = dkmpp_init(ds.matrix, 3);
    for (auto _ : state) benchmark::DoNotOptimize(run_mpckm(ds.matrix, init, cs));
}
BENCHMARK(BM_MPCKM)->Arg(40)->Arg(400);

void BM_UpdateWeights(benchmark::State& state) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    FeatureScores scores;
    scores.gamma.resize(static_cast<std::size_t>(state.range(0)));
    for (auto& g : scores.gamma) g = u(rng);
    for (auto _ : state) benchmark::DoNotOptimize(update_weights(scores, 1.5));
}
BENCHMARK(BM_UpdateWeights)->Arg(10)->Arg(100)->Arg(1000);

void BM_PairwiseF(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(4);
    std::vector<int> a(n), l(n);
    for (auto& x : a) x = static_cast<int>(rng() % 5);
    for (auto& x : l) x = static_cast<int>(rng() % 3);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (auto _ : state) benchmark::DoNotOptimize(pairwise_f_score(a, l, idx));
}
BENCHMARK(BM_PairwiseF)->Arg(15)->Arg(1500);

void BM_Initialization(benchmark::State& state) {
    const auto ds = bench_data(state);
    const auto method = static_cast<InitMethod>(state.range(1));
    for (auto _ : state) benchmark::DoNotOptimize(initialize(method, ds.matrix, 3, ConstraintSet(ds.matrix.n())));
    state.SetLabel(std::string(to_string(method)));
}
BENCHMARK(BM_Initialization)->ArgsProduct({{40, 400}, {0, 1, 2}});

}  // namespace

BENCHMARK_MAIN();
