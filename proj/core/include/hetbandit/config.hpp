#pragma once

#include <cstdint>
#include <string>

namespace hetbandit {

struct TrainConfig {
  double learning_rate = 5e-3;
  double weight_decay = 5e-4;
  int max_epochs = 300;
  int patience = 50;
  double lambda = 0.4;          // completion loss weight
  double p_min = 0.1;
  int context_budget = 20;      // N, per-type base budget
  int update_period = 5;        // policy update every this many epochs
  int hidden_dim = 64;
  int num_layers = 2;
  int num_heads = 4;            // accepted for interface parity; unused by this backbone
  double dropout = 0.5;
  std::string pretrain_method = "hybrid";  // none | degree | feature_prop | hybrid
  int pretrain_epochs = 50;
  int propagation_hops = 3;
  double rho = 0.5;             // hybrid mix coefficient
  std::string sampling_mode = "adaptive";  // adaptive | uniform | proportional | epsilon_greedy
  std::string reward_mode = "norm";
  bool policy_scaling = true;
  bool sampling_context = true;
  bool completion = true;
  double mask_ratio = 0.3;
  bool topology_only = false;
  bool backbone_only = false;
  std::uint64_t seed = 0;
  bool deterministic = false;

  // scheduled policy rounds; the step size always derives from the schedule,
  // not from realized epochs
  int total_rounds() const;
  double eta(int num_types) const;
  void validate() const;  // range checks independent of any dataset
};

// Parses a JSON config file. Unknown keys are rejected; the key "eta" is
// rejected explicitly as a derived quantity.
TrainConfig parse_config(const std::string& path);
TrainConfig parse_config_text(const std::string& text, const std::string& origin);

// canonical resolved form (sorted keys, seed included)
std::string config_to_json(const TrainConfig& cfg);
// FNV-1a 64 over the canonical form with the seed field excluded
std::string config_hash(const TrainConfig& cfg);

}  // namespace hetbandit
