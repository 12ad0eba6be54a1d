#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hetbandit/bandit.hpp"
#include "hetbandit/config.hpp"
#include "hetbandit/dataset.hpp"
#include "hetbandit/model.hpp"

namespace hetbandit {

struct EpochStats {
  int epoch = 0;
  double loss_pred = 0.0;
  double loss_comp = 0.0;
  double loss_total = 0.0;
  double val_macro_f1 = 0.0;
};

struct RunRecord {
  int schema_version = 1;
  std::uint64_t seed = 0;
  std::string variant = "full";
  TrainConfig config;
  std::string config_hash;
  std::vector<std::string> type_names;
  std::vector<EpochStats> epochs;
  int realized_epochs = 0;
  int best_epoch = 0;
  double best_val_macro_f1 = 0.0;
  double test_macro_f1 = 0.0;
  double test_micro_f1 = 0.0;
  std::vector<double> final_weights;
  std::vector<double> final_distribution;
  int policy_updates = 0;
  double time_per_epoch_mean_s = 0.0;  // zeroed under deterministic mode
  double time_per_epoch_std_s = 0.0;
  std::int64_t peak_memory_bytes = 0;
  std::int64_t num_parameters = 0;
};

std::string run_record_to_json(const RunRecord& rec);
RunRecord run_record_from_json(const std::string& text);

// scalar total = pred + lambda * comp (comp may be an empty handle when the
// completion branch is off)
nk::Var total_loss(const nk::Var& pred_loss, const std::optional<nk::Var>& comp_loss,
                   double lambda);

// floor(ratio * |pool|) elements of pool, uniform without replacement, ascending
std::vector<int> make_completion_mask(const std::vector<int>& pool, double ratio, Rng& rng);

// One forward (and optionally backward) pass shared by training, evaluation,
// and the equivalence checks. All sampling decisions come from the plan; when
// fixed_samples is absent and a budget is positive the rows are drawn from
// plan.rng (type order).
struct ForwardPlan {
  std::vector<int> budgets;  // per type, already clipped to type sizes
  std::vector<double> p;     // policy distribution (alpha scaling)
  std::optional<std::vector<std::vector<int>>> fixed_samples;
  SampleMode within_mode = SampleMode::norm_proportional;
  std::vector<int> completion_mask;  // global node ids of attributed types
  bool train_mode = false;
  Rng* rng = nullptr;
};

struct ForwardOutput {
  double loss_pred = 0.0;
  double loss_comp = 0.0;
  double loss_total = 0.0;
  nk::Matrix h0;      // |V| x d fused front-end output
  nk::Matrix h_final; // |V| x d final backbone layer
  nk::Matrix logits;  // target block
  std::vector<std::vector<int>> samples_used;
  std::vector<nk::Matrix> grads;  // aligned with active_params(...) when requested
  std::size_t tape_bytes = 0;
};

std::vector<ModelState::ParamRef> active_params(ModelState& model, const TrainConfig& cfg);

ForwardOutput forward_pass(const Dataset& ds, const TrainConfig& cfg, ModelState& model,
                           const nk::Matrix& prior, const ForwardPlan& plan, bool want_grads);

// Deterministic pre-loop state: seeded parameters and the structural prior.
struct TrainerSetup {
  ModelState model;
  nk::Matrix prior;
  std::vector<double> pretrain_losses;
  double eta = 0.0;
};
TrainerSetup prepare(const Dataset& ds, const TrainConfig& cfg);

// per-epoch budget allocation honoring the sampling mode
std::vector<int> budgets_for_epoch(const TrainConfig& cfg, const std::vector<double>& p,
                                   const std::vector<int>& type_sizes,
                                   const std::vector<double>& last_reward, Rng& rng);

RunRecord train(const Dataset& ds, const TrainConfig& cfg);

// fixed variant catalogue; each applies exactly one config delta
const std::vector<std::string>& variant_names();
TrainConfig apply_variant(TrainConfig cfg, const std::string& variant);
RunRecord run_variant(const Dataset& ds, const TrainConfig& cfg, const std::string& variant);

}  // namespace hetbandit
