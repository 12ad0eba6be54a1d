#include "hetbandit/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace hetbandit {

F1Result f1_scores(const std::vector<int>& labels, const std::vector<int>& predictions,
                   int num_classes) {
  if (labels.size() != predictions.size())
    throw std::invalid_argument("f1_scores: label/prediction length mismatch");
  if (num_classes < 1) throw std::invalid_argument("f1_scores: num_classes must be positive");
  std::vector<std::int64_t> tp(static_cast<std::size_t>(num_classes), 0);
  std::vector<std::int64_t> fp(static_cast<std::size_t>(num_classes), 0);
  std::vector<std::int64_t> fn(static_cast<std::size_t>(num_classes), 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int y = labels[i], yh = predictions[i];
    if (y < 0 || y >= num_classes || yh < 0 || yh >= num_classes)
      throw std::invalid_argument("f1_scores: class index out of range");
    if (y == yh) {
      ++tp[static_cast<std::size_t>(y)];
    } else {
      ++fp[static_cast<std::size_t>(yh)];
      ++fn[static_cast<std::size_t>(y)];
    }
  }
  double macro = 0.0;
  std::int64_t tp_total = 0;
  for (int c = 0; c < num_classes; ++c) {
    const auto i = static_cast<std::size_t>(c);
    tp_total += tp[i];
    const double pden = static_cast<double>(tp[i] + fp[i]);
    const double rden = static_cast<double>(tp[i] + fn[i]);
    const double prec = pden > 0.0 ? tp[i] / pden : 0.0;
    const double rec = rden > 0.0 ? tp[i] / rden : 0.0;
    macro += (prec + rec) > 0.0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
  }
  F1Result res;
  res.macro = macro / num_classes;
  res.micro = labels.empty() ? 0.0 : static_cast<double>(tp_total) / labels.size();
  return res;
}

double kendall_tau(const std::vector<int>& rank_a, const std::vector<int>& rank_b) {
  const std::size_t k = rank_a.size();
  if (rank_b.size() != k) throw std::invalid_argument("kendall_tau: length mismatch");
  auto positions = [k](const std::vector<int>& order) {
    std::vector<int> pos(k, -1);
    for (std::size_t i = 0; i < k; ++i) {
      const int item = order[i];
      if (item < 0 || static_cast<std::size_t>(item) >= k || pos[static_cast<std::size_t>(item)] != -1)
        throw std::invalid_argument("kendall_tau: argument is not a permutation");
      pos[static_cast<std::size_t>(item)] = static_cast<int>(i);
    }
    return pos;
  };
  if (k < 2) return 1.0;
  const std::vector<int> pa = positions(rank_a), pb = positions(rank_b);
  std::int64_t concordant = 0, discordant = 0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) {
      const int da = pa[i] - pa[j];
      const int db = pb[i] - pb[j];
      if ((da < 0) == (db < 0))
        ++concordant;
      else
        ++discordant;
    }
  const double pairs = static_cast<double>(k) * (static_cast<double>(k) - 1.0) / 2.0;
  return static_cast<double>(concordant - discordant) / pairs;
}

std::vector<int> ranking_from_weights(const std::vector<double>& weights) {
  std::vector<int> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&weights](int a, int b) {
    if (weights[static_cast<std::size_t>(a)] != weights[static_cast<std::size_t>(b)])
      return weights[static_cast<std::size_t>(a)] > weights[static_cast<std::size_t>(b)];
    return a < b;
  });
  return order;
}

StabilityReport stability_report(const std::vector<std::vector<double>>& final_weights_per_run,
                                 const std::vector<std::string>& type_names) {
  StabilityReport rep;
  rep.type_names = type_names;
  rep.num_runs = static_cast<int>(final_weights_per_run.size());
  if (rep.num_runs < 2)
    throw std::invalid_argument("stability_report: needs at least two runs");
  const std::size_t k = type_names.size();
  rep.mean_final_weights.assign(k, 0.0);
  for (const auto& run : final_weights_per_run) {
    if (run.size() != k) throw std::invalid_argument("stability_report: weight length mismatch");
    for (std::size_t i = 0; i < k; ++i) rep.mean_final_weights[i] += run[i];
  }
  for (std::size_t i = 0; i < k; ++i) rep.mean_final_weights[i] /= rep.num_runs;
  rep.top_type = 0;
  rep.min_mean_final_weight = rep.mean_final_weights.empty() ? 0.0 : rep.mean_final_weights[0];
  rep.max_mean_final_weight = rep.min_mean_final_weight;
  for (std::size_t i = 1; i < k; ++i) {
    if (rep.mean_final_weights[i] > rep.mean_final_weights[static_cast<std::size_t>(rep.top_type)])
      rep.top_type = static_cast<int>(i);
    rep.min_mean_final_weight = std::min(rep.min_mean_final_weight, rep.mean_final_weights[i]);
    rep.max_mean_final_weight = std::max(rep.max_mean_final_weight, rep.mean_final_weights[i]);
  }
  double acc = 0.0;
  int count = 0;
  for (std::size_t a = 0; a < final_weights_per_run.size(); ++a)
    for (std::size_t b = a + 1; b < final_weights_per_run.size(); ++b) {
      acc += kendall_tau(ranking_from_weights(final_weights_per_run[a]),
                         ranking_from_weights(final_weights_per_run[b]));
      ++count;
    }
  rep.mean_pairwise_kendall_tau = acc / count;
  return rep;
}

}  // namespace hetbandit
