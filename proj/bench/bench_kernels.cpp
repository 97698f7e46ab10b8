// Serial versus OpenMP round kernels on a synthetic network.
//   bench_kernels --benchmark_filter=assign
#include <map>
#include <random>

#include <benchmark/benchmark.h>

#include "dgc/engine.hpp"
#include "dgc/init.hpp"
#include "dgc/kernels.hpp"

namespace {

struct Workload {
  std::vector<dgc::LocalDataset> data;
  dgc::Topology topo;
  std::vector<dgc::Matrix> centers;
  dgc::Assignments assignments;
  std::vector<dgc::Inbox> inboxes;
};

// m users on a ring, n samples each, d features, K centers.
const Workload& workload(std::size_t m, std::size_t n) {
  static std::map<std::pair<std::size_t, std::size_t>, Workload> cache;
  auto it = cache.find({m, n});
  if (it != cache.end()) return it->second;

  constexpr std::size_t d = 8, K = 10;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  dgc::GlobalDataset global;
  global.samples = dgc::Matrix(m * n, d);
  for (double& v : global.samples.values()) v = normal(rng) * 5.0;
  dgc::PartitionSpec spec;
  spec.users = m;
  Workload w{dgc::partition(global, spec), dgc::build_topology(dgc::TopologyKind::ring, m), {}, {}, {}};
  dgc::InitConfig init;
  init.scheme = dgc::InitScheme::random;
  w.centers = dgc::initialize_network(w.data, w.topo, K, init);
  w.assignments = dgc::assign_clusters(w.centers, w.data);
  w.inboxes = dgc::exchange_centers(w.topo, w.centers);
  return cache.emplace(std::pair{m, n}, std::move(w)).first->second;
}

template <bool Parallel>
void BM_assign(benchmark::State& state) {
  const auto& w = workload(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  dgc::Assignments out;
  for (auto _ : state) {
    if constexpr (Parallel)
      dgc::kernels::parallel::assign(w.centers, w.data, out);
    else
      dgc::kernels::serial::assign(w.centers, w.data, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}

template <bool Parallel>
void BM_update(benchmark::State& state) {
  const auto& w = workload(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  const auto loss = dgc::kmeans_loss();
  std::vector<dgc::Matrix> out;
  for (auto _ : state) {
    if constexpr (Parallel)
      dgc::kernels::parallel::update(w.centers, w.inboxes, w.data, w.assignments, *loss, 0.01, 10.0, out);
    else
      dgc::kernels::serial::update(w.centers, w.inboxes, w.data, w.assignments, *loss, 0.01, 10.0, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}

void sizes(benchmark::internal::Benchmark* b) {
  b->Args({10, 1000})->Args({50, 2000})->Args({200, 500})->Unit(benchmark::kMicrosecond)->UseRealTime();
}

}  // namespace

BENCHMARK(BM_assign<false>)->Name("assign/serial")->Apply(sizes);
BENCHMARK(BM_assign<true>)->Name("assign/parallel")->Apply(sizes);
BENCHMARK(BM_update<false>)->Name("update/serial")->Apply(sizes);
BENCHMARK(BM_update<true>)->Name("update/parallel")->Apply(sizes);

BENCHMARK_MAIN();
