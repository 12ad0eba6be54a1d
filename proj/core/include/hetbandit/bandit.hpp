#pragma once

#include <vector>

#include "hetbandit/graph.hpp"
#include "hetbandit/rng.hpp"
#include "hetbandit/tensor.hpp"

namespace hetbandit {

// Smoothed multiplicative-weights policy over node types. Weights stay
// positive and are renormalized to sum 1 after every update; the smoothed
// distribution p_k = (1 - K p_min) w_k / sum(w) + p_min keeps every type's
// probability at least p_min.
struct PolicyState {
  std::vector<double> w;

  static PolicyState uniform(int num_types);
  int num_types() const { return static_cast<int>(w.size()); }
};

// eta = (p_min / 2) sqrt(log(N) / (K T_total)), natural log. Derived, never
// read from configuration.
double step_size(double p_min, int context_budget, int num_types, int total_rounds);

// errors when p_min >= 1/K or p_min < 0
std::vector<double> policy_distribution(const std::vector<double>& w, double p_min);

// mean final-layer embedding norm per type; empty types score 0
std::vector<double> reward_proxy(const HeteroGraph& g, const nk::Matrix& h_final);

// r_k / (sum_j r_j + eps)
std::vector<double> normalize_rewards(const std::vector<double>& r, double eps = 1e-8);

// w'_k proportional to w_k exp(eta (r_k + 1/p_k)), computed in log space with
// max subtraction, then renormalized to sum 1
std::vector<double> update_weights(const std::vector<double>& w, const std::vector<double>& r_bar,
                                   const std::vector<double>& p, double eta);

// B_k = min(|V_k|, max(0, round(K N p_k))), round half away from zero
std::vector<int> allocate_budget(const std::vector<double>& p, int context_budget,
                                 const std::vector<int>& type_sizes);

enum class SampleMode { norm_proportional, uniform };

// Without-replacement draw of `budget` indices from [0, pool_size), ascending.
// norm_proportional weights by `norms` via exponential keys and falls back to
// uniform when every norm is zero. budget == 0 and budget == pool_size
// short-circuit without consuming the generator; budget > pool_size is an
// error (callers clip budgets via allocate_budget).
std::vector<int> sample_representatives(int pool_size, int budget, SampleMode mode,
                                        const std::vector<double>& norms, Rng& rng);

// mean of the sampled rows of one type's fused block
nk::Var type_context(const nk::Var& h_block, const std::vector<int>& sample);

// h + beta * sigmoid([h || c] W_s) * (c - h), rows of one type
nk::Var fuse_context(const nk::Var& h_block, const nk::Var& context, const nk::Var& W_s,
                     const nk::Var& beta);

// z = h * gamma * alpha with alpha = 0.5 + p_k (alpha forced to 1 when
// policy scaling is disabled; gamma always applies)
nk::Var apply_policy_scaling(const nk::Var& h_block, const nk::Var& gamma, double p_k,
                             bool scaling_enabled);

}  // namespace hetbandit
