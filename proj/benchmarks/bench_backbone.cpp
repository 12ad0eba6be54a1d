#include <benchmark/benchmark.h>

#include "common.hpp"
#include "hetbandit/backbone.hpp"
#include "hetbandit/model.hpp"

namespace {

using namespace hetbandit;

void bm_rgcn_layer(benchmark::State& state) {
  const Dataset& ds = bench::small_dataset();
  const HeteroGraph& g = ds.graph;
  const int d = static_cast<int>(state.range(0));
  Rng rng(7);
  ModelState model = ModelState::init(g.schema(), d, 1, rng);
  nk::Matrix h(g.num_nodes(), d);
  for (Eigen::Index i = 0; i < h.rows(); ++i)
    for (Eigen::Index j = 0; j < h.cols(); ++j) h(i, j) = rng.gauss();

  for (auto _ : state) {
    nk::Tape tape;
    nk::Var hv = tape.leaf(h, true);
    std::vector<nk::Var> ws, wr;
    for (auto& m : model.W_self[0]) ws.push_back(tape.leaf(m, true));
    for (auto& m : model.W_rel[0]) wr.push_back(tape.leaf(m, true));
    nk::Var out = rgcn_layer(g, hv, ws, wr, Activation::relu);
    benchmark::DoNotOptimize(out.value().sum());
  }
}
BENCHMARK(bm_rgcn_layer)->Arg(16)->Arg(64);

}  // namespace
