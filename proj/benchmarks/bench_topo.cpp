#include <benchmark/benchmark.h>

#include "common.hpp"
#include "hetbandit/topo_init.hpp"

namespace {

using namespace hetbandit;

void bm_anchored_propagation(benchmark::State& state) {
  const Dataset& ds = bench::small_dataset();
  const HeteroGraph& g = ds.graph;
  const int hops = static_cast<int>(state.range(0));
  const int d = 64;
  Rng rng(9);
  nk::Matrix x(g.num_nodes(), d);
  std::vector<bool> observed(static_cast<std::size_t>(g.num_nodes()), false);
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = rng.gauss();
  for (int t = 0; t < g.num_types(); ++t) {
    if (!g.schema().types[static_cast<std::size_t>(t)].attributed) continue;
    for (int i = 0; i < g.type_count(t); ++i)
      observed[static_cast<std::size_t>(g.type_offset(t) + i)] = true;
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(anchored_propagation(g, x, observed, hops));
  }
}
BENCHMARK(bm_anchored_propagation)->Arg(1)->Arg(3);

void bm_degree_descriptors(benchmark::State& state) {
  const Dataset& ds = bench::small_dataset();
  for (auto _ : state) {
    benchmark::DoNotOptimize(degree_descriptors(ds.graph));
  }
}
BENCHMARK(bm_degree_descriptors);

}  // namespace
