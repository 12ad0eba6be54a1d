#pragma once

#include <string>
#include <vector>

namespace hetbandit {

struct F1Result {
  double macro = 0.0;
  double micro = 0.0;
};

// Single-label multiclass F1. Classes absent from both labels and predictions
// contribute zero to the macro average; zero-denominator precision/recall
// terms are treated as zero.
F1Result f1_scores(const std::vector<int>& labels, const std::vector<int>& predictions,
                   int num_classes);

// Both arguments are orderings: position -> item, permutations of 0..K-1.
// tau = (concordant - discordant) / (K (K-1) / 2).
double kendall_tau(const std::vector<int>& rank_a, const std::vector<int>& rank_b);

// descending weight order, ties broken by smaller type id
std::vector<int> ranking_from_weights(const std::vector<double>& weights);

struct StabilityReport {
  int num_runs = 0;
  std::vector<std::string> type_names;
  std::vector<double> mean_final_weights;
  int top_type = -1;
  double min_mean_final_weight = 0.0;
  double max_mean_final_weight = 0.0;
  double mean_pairwise_kendall_tau = 1.0;
};

// Requires at least two runs; every run must carry one final weight per type.
StabilityReport stability_report(const std::vector<std::vector<double>>& final_weights_per_run,
                                 const std::vector<std::string>& type_names);

}  // namespace hetbandit
