#include "hetbandit/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace hetbandit {

PolicyState PolicyState::uniform(int num_types) {
  if (num_types < 1) throw std::invalid_argument("policy needs at least one type");
  PolicyState s;
  s.w.assign(static_cast<std::size_t>(num_types), 1.0 / static_cast<double>(num_types));
  return s;
}

double step_size(double p_min, int context_budget, int num_types, int total_rounds) {
  if (num_types < 1 || total_rounds < 1)
    throw std::invalid_argument("step_size: needs positive type count and round count");
  if (context_budget < 2)
    throw std::invalid_argument("step_size: per-type budget must be at least 2 (log N > 0)");
  const double inside =
      std::log(static_cast<double>(context_budget)) / (static_cast<double>(num_types) * total_rounds);
  return (p_min / 2.0) * std::sqrt(inside);
}

std::vector<double> policy_distribution(const std::vector<double>& w, double p_min) {
  const int k = static_cast<int>(w.size());
  if (k < 1) throw std::invalid_argument("policy_distribution: empty weights");
  if (p_min < 0.0) throw std::invalid_argument("policy_distribution: negative p_min");
  if (p_min * k >= 1.0)
    throw std::invalid_argument("policy_distribution: p_min must be below 1/K");
  double sum = 0.0;
  for (double x : w) {
    if (!(x > 0.0)) throw std::invalid_argument("policy_distribution: weights must be positive");
    sum += x;
  }
  std::vector<double> p(w.size());
  const double share = 1.0 - p_min * k;
  for (std::size_t i = 0; i < w.size(); ++i) p[i] = share * (w[i] / sum) + p_min;
  return p;
}

std::vector<double> reward_proxy(const HeteroGraph& g, const nk::Matrix& h_final) {
  if (h_final.rows() != g.num_nodes()) throw nk::ShapeError("reward_proxy: row/node mismatch");
  std::vector<double> r(static_cast<std::size_t>(g.num_types()), 0.0);
  for (int t = 0; t < g.num_types(); ++t) {
    const int off = g.type_offset(t), cnt = g.type_count(t);
    if (cnt == 0) continue;
    double acc = 0.0;
    for (int i = 0; i < cnt; ++i) acc += h_final.row(off + i).norm();
    r[static_cast<std::size_t>(t)] = acc / static_cast<double>(cnt);
  }
  return r;
}

std::vector<double> normalize_rewards(const std::vector<double>& r, double eps) {
  double sum = std::accumulate(r.begin(), r.end(), 0.0);
  std::vector<double> out(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) out[i] = r[i] / (sum + eps);
  return out;
}

std::vector<double> update_weights(const std::vector<double>& w, const std::vector<double>& r_bar,
                                   const std::vector<double>& p, double eta) {
  const std::size_t k = w.size();
  if (r_bar.size() != k || p.size() != k)
    throw std::invalid_argument("update_weights: size mismatch");
  for (double x : p)
    if (!(x > 0.0))
      throw std::invalid_argument("update_weights: sampling probabilities must be positive");
  std::vector<double> lw(k);
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < k; ++i) {
    lw[i] = std::log(w[i]) + eta * (r_bar[i] + 1.0 / p[i]);
    mx = std::max(mx, lw[i]);
  }
  std::vector<double> out(k);
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    out[i] = std::exp(lw[i] - mx);
    sum += out[i];
  }
  for (std::size_t i = 0; i < k; ++i) out[i] /= sum;
  return out;
}

std::vector<int> allocate_budget(const std::vector<double>& p, int context_budget,
                                 const std::vector<int>& type_sizes) {
  if (p.size() != type_sizes.size()) throw std::invalid_argument("allocate_budget: size mismatch");
  const double kn = static_cast<double>(p.size()) * context_budget;
  std::vector<int> b(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const long long raw = std::llround(kn * p[i]);
    b[i] = static_cast<int>(std::min<long long>(type_sizes[i], std::max<long long>(0, raw)));
  }
  return b;
}

std::vector<int> sample_representatives(int pool_size, int budget, SampleMode mode,
                                        const std::vector<double>& norms, Rng& rng) {
  if (pool_size < 0) throw std::invalid_argument("sample_representatives: negative pool");
  if (budget > pool_size)
    throw std::invalid_argument("sample_representatives: budget exceeds the pool");
  if (budget <= 0) return {};
  if (budget == pool_size) {
    std::vector<int> all(static_cast<std::size_t>(pool_size));
    std::iota(all.begin(), all.end(), 0);
    return all;
  }

  bool weighted = false;
  if (mode == SampleMode::norm_proportional) {
    if (norms.size() != static_cast<std::size_t>(pool_size))
      throw std::invalid_argument("sample_representatives: norm vector size mismatch");
    for (double x : norms)
      if (x > 0.0) {
        weighted = true;
        break;
      }
  }

  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(budget));
  if (!weighted) {
    // uniform without replacement, partial Fisher-Yates
    std::vector<int> idx(static_cast<std::size_t>(pool_size));
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < budget; ++i) {
      const std::uint64_t j =
          static_cast<std::uint64_t>(i) + rng.uniform_int(static_cast<std::uint64_t>(pool_size - i));
      std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
      out.push_back(idx[static_cast<std::size_t>(i)]);
    }
  } else {
    // exponential keys: larger log(u)/w wins; zero weights never beat positive ones
    std::vector<std::pair<double, int>> keys(static_cast<std::size_t>(pool_size));
    for (int i = 0; i < pool_size; ++i) {
      double u = rng.uniform01();
      while (u == 0.0) u = rng.uniform01();
      const double w = norms[static_cast<std::size_t>(i)];
      const double key =
          w > 0.0 ? std::log(u) / w : -std::numeric_limits<double>::infinity();
      keys[static_cast<std::size_t>(i)] = {key, i};
    }
    std::partial_sort(keys.begin(), keys.begin() + budget, keys.end(),
                      [](const auto& a, const auto& b) {
                        if (a.first != b.first) return a.first > b.first;
                        return a.second < b.second;
                      });
    for (int i = 0; i < budget; ++i) out.push_back(keys[static_cast<std::size_t>(i)].second);
  }
  std::sort(out.begin(), out.end());
  return out;
}

nk::Var type_context(const nk::Var& h_block, const std::vector<int>& sample) {
  if (sample.empty()) throw std::invalid_argument("type_context: empty sample");
  nk::Var rows = nk::gather_rows(h_block, sample);
  std::vector<int> seg(sample.size(), 0);
  return nk::segment_mean(rows, std::move(seg), 1);
}

nk::Var fuse_context(const nk::Var& h_block, const nk::Var& context, const nk::Var& W_s,
                     const nk::Var& beta) {
  const int n = static_cast<int>(h_block.rows());
  nk::Var c = nk::broadcast_rows(context, n);
  nk::Var gate = nk::sigmoid(nk::matmul(nk::concat_cols(h_block, c), W_s));
  nk::Var delta = nk::mul(gate, nk::sub(c, h_block));
  return nk::add(h_block, nk::mul(delta, beta));
}

nk::Var apply_policy_scaling(const nk::Var& h_block, const nk::Var& gamma, double p_k,
                             bool scaling_enabled) {
  const double alpha = scaling_enabled ? 0.5 + p_k : 1.0;
  return nk::scale(nk::mul(h_block, gamma), alpha);
}

}  // namespace hetbandit
