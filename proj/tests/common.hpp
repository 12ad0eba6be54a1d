#pragma once

// Shared fixtures for the unit tests: a small labeled three-type graph with
// one attribute-free (target) type and two attributed types, plus a compact
// synthetic dataset for trainer-level tests.

#include <utility>
#include <vector>

#include "hetbandit/dataset.hpp"
#include "hetbandit/graph.hpp"
#include "hetbandit/rng.hpp"
#include "hetbandit/tensor.hpp"

namespace testutil {

using namespace hetbandit;

inline GraphSchema toy_schema(int authors = 10, int papers = 12, int venues = 8,
                              int paper_dim = 5, int venue_dim = 3, int num_classes = 3) {
  GraphSchema s;
  s.types = {
      {"author", authors, false, 0},
      {"paper", papers, true, paper_dim},
      {"venue", venues, true, venue_dim},
  };
  s.relations = {
      {"writes", 0, 1},
      {"published_in", 1, 2},
  };
  s.target_type = 0;
  s.num_classes = num_classes;
  return s;
}

// Deterministic random edges: every paper gets one author and one venue, plus
// `extra` author-paper edges.
inline HeteroGraph toy_graph(const GraphSchema& s, std::uint64_t seed = 11, int extra = 8) {
  Rng rng(seed);
  const int a = s.types[0].count, p = s.types[1].count, v = s.types[2].count;
  std::vector<std::vector<std::pair<int, int>>> edges(2);
  for (int i = 0; i < p; ++i) {
    edges[0].push_back({static_cast<int>(rng.uniform_int(a)), i});
    edges[1].push_back({i, static_cast<int>(rng.uniform_int(v))});
  }
  for (int i = 0; i < extra; ++i)
    edges[0].push_back({static_cast<int>(rng.uniform_int(a)), static_cast<int>(rng.uniform_int(p))});
  return HeteroGraph::build(s, std::move(edges));
}

inline Dataset toy_dataset(std::uint64_t seed = 11) {
  Dataset ds;
  GraphSchema s = toy_schema();
  ds.graph = toy_graph(s, seed);
  Rng rng(hetbandit::splitmix64(seed));
  for (std::size_t t = 0; t < s.types.size(); ++t) {
    if (!s.types[t].attributed) continue;
    nk::Matrix x(s.types[t].count, s.types[t].feature_dim);
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = rng.gauss();
    ds.features[static_cast<int>(t)] = std::move(x);
  }
  const int targets = s.types[0].count;
  ds.labels.resize(targets);
  for (int i = 0; i < targets; ++i)
    ds.labels[static_cast<std::size_t>(i)] = static_cast<int>(rng.uniform_int(s.num_classes));
  for (int i = 0; i < targets; ++i) {
    if (i < targets * 6 / 10)
      ds.train_idx.push_back(i);
    else if (i < targets * 8 / 10)
      ds.val_idx.push_back(i);
    else
      ds.test_idx.push_back(i);
  }
  return ds;
}

// Small synthetic benchmark instance for trainer tests.
inline SynthResult tiny_synth(std::uint64_t seed = 3) {
  SynthSpec spec;
  spec.target_count = 60;
  spec.signal_count = 50;
  spec.distractor_count = 40;
  spec.feature_dim = 8;
  spec.num_classes = 3;
  spec.seed = seed;
  return generate_synthetic(spec);
}

}  // namespace testutil
