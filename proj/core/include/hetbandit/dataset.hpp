#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hetbandit/graph.hpp"
#include "hetbandit/tensor.hpp"

namespace hetbandit {

struct Dataset {
  HeteroGraph graph;
  std::map<int, nk::Matrix> features;  // attributed type id -> count x feature_dim
  std::vector<int> labels;             // per target-type local index, -1 = unlabeled
  std::vector<int> train_idx, val_idx, test_idx;  // local target indices

  int target_type() const { return graph.schema().target_type; }
  int num_classes() const { return graph.schema().num_classes; }
};

// Directory layout: schema.json, edges_<relation>.csv ("src,dst", 0-based
// within each endpoint type), features_<type>.csv for attributed types,
// labels_<target>.csv ("node_id,label"), splits.json. Errors carry
// file/line diagnostics in std::runtime_error.
Dataset load_dataset(const std::string& dir);
void save_dataset(const Dataset& ds, const std::string& dir);

// Consistency report; empty means clean. Covers feature shape and finiteness,
// split ranges/disjointness, labels on split members, label ranges.
std::vector<std::string> validate_dataset(const Dataset& ds);

// Three types: target (attribute-missing), signal (attributed, class-bearing
// features), distractor (attributed, pure noise). Each target node's label is
// the argmax over class prototypes of its mean signal-neighbor feature,
// corrupted with probability `noise`. Deterministic under seed.
struct SynthSpec {
  int target_count = 2000;
  int signal_count = 2000;
  int distractor_count = 2000;
  int feature_dim = 32;
  int num_classes = 4;
  int signal_edges_per_target = 5;
  int distractor_edges_per_target = 5;
  int signal_type = 1;  // index of the class-bearing type in the generated schema
  double noise = 0.1;
  double signal_scale = 3.0;  // prototype magnitude; keeps the signal type's feature norms dominant
  double signal_feature_noise = 0.3;
  double distractor_scale = 0.5;
  double train_frac = 0.2;
  double val_frac = 0.2;
  std::uint64_t seed = 0;
};

struct SynthResult {
  Dataset dataset;
  nk::Matrix prototypes;         // num_classes x feature_dim
  std::vector<int> clean_labels; // pre-corruption labels
};

SynthResult generate_synthetic(const SynthSpec& spec);

// Label a target node by its true mean signal-neighbor feature; the reference
// predictor used to calibrate the generator.
std::vector<int> synthetic_reference_predictions(const Dataset& ds, const nk::Matrix& prototypes);

}  // namespace hetbandit
