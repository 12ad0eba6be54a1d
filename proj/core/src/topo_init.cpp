#include "hetbandit/topo_init.hpp"

#include <cmath>
#include <stdexcept>

namespace hetbandit {

TopoParams TopoParams::init(int num_types, int m, int d, Rng& rng) {
  TopoParams p;
  p.W.resize(static_cast<std::size_t>(num_types));
  p.b.resize(static_cast<std::size_t>(num_types));
  const double bound = m > 0 ? 1.0 / std::sqrt(static_cast<double>(m)) : 0.0;
  for (int t = 0; t < num_types; ++t) {
    nk::Matrix w(m, d);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < d; ++j) w(i, j) = (2.0 * rng.uniform01() - 1.0) * bound;
    p.W[static_cast<std::size_t>(t)] = std::move(w);
    p.b[static_cast<std::size_t>(t)] = nk::Matrix::Zero(1, d);
  }
  return p;
}

nk::Matrix normalize_per_type(const HeteroGraph& g, const nk::Matrix& x, double eps) {
  if (x.rows() != g.num_nodes()) throw nk::ShapeError("normalize_per_type: row/node mismatch");
  nk::Matrix out(x.rows(), x.cols());
  for (int t = 0; t < g.num_types(); ++t) {
    const int off = g.type_offset(t), cnt = g.type_count(t);
    if (cnt == 0) continue;
    auto block = x.middleRows(off, cnt);
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const double mean = block.col(j).mean();
      const double var = (block.col(j).array() - mean).square().sum() / cnt;
      const double inv = 1.0 / std::sqrt(var + eps);
      out.block(off, j, cnt, 1) = (block.col(j).array() - mean).matrix() * inv;
    }
  }
  return out;
}

nk::Matrix degree_descriptors(const HeteroGraph& g) {
  const int n = g.num_nodes(), m = g.num_relations();
  nk::Matrix s(n, m);
  for (int v = 0; v < n; ++v)
    for (int r = 0; r < m; ++r) s(v, r) = std::log1p(static_cast<double>(g.degree(v, r)));
  return normalize_per_type(g, s);
}

nk::Matrix degree_embed(const HeteroGraph& g, const nk::Matrix& s, const TopoParams& params) {
  if (params.W.size() != static_cast<std::size_t>(g.num_types()))
    throw nk::ShapeError("degree_embed: parameter/type count mismatch");
  const Eigen::Index d = params.W.empty() ? 0 : params.W[0].cols();
  nk::Matrix raw(g.num_nodes(), d);
  for (int t = 0; t < g.num_types(); ++t) {
    const int off = g.type_offset(t), cnt = g.type_count(t);
    if (cnt == 0) continue;
    raw.middleRows(off, cnt) =
        (s.middleRows(off, cnt) * params.W[static_cast<std::size_t>(t)]).rowwise() +
        params.b[static_cast<std::size_t>(t)].row(0);
  }
  return normalize_per_type(g, raw);
}

nk::Matrix anchored_propagation(const HeteroGraph& g, const nk::Matrix& x_full,
                                const std::vector<bool>& observed, int hops) {
  const int n = g.num_nodes();
  const Eigen::Index d = x_full.cols();
  if (hops < 1) throw std::invalid_argument("anchored_propagation: hop count must be positive");
  if (x_full.rows() != n) throw nk::ShapeError("anchored_propagation: row/node mismatch");
  if (observed.size() != static_cast<std::size_t>(n))
    throw nk::ShapeError("anchored_propagation: observed mask size mismatch");

  nk::Matrix mean_row = nk::Matrix::Zero(1, d);
  std::int64_t obs_count = 0;
  for (int v = 0; v < n; ++v)
    if (observed[static_cast<std::size_t>(v)]) {
      mean_row += x_full.row(v);
      ++obs_count;
    }
  if (obs_count > 0) mean_row /= static_cast<double>(obs_count);

  nk::Matrix u0(n, d);
  for (int v = 0; v < n; ++v) {
    if (observed[static_cast<std::size_t>(v)])
      u0.row(v) = x_full.row(v);
    else
      u0.row(v) = mean_row.row(0);
  }

  std::vector<double> inv_sqrt(static_cast<std::size_t>(n), 0.0);
  for (int v = 0; v < n; ++v) {
    const std::int64_t dv = g.collapsed_degree(v);
    if (dv > 0) inv_sqrt[static_cast<std::size_t>(v)] = 1.0 / std::sqrt(static_cast<double>(dv));
  }

  nk::Matrix u = u0;
  nk::Matrix su(n, d);
  for (int h = 0; h < hops; ++h) {
    su.setZero();
    for (int r = 0; r < g.num_relations(); ++r) {
      const auto& src = g.message_sources(r);
      const auto& dst = g.message_targets(r);
      for (std::size_t i = 0; i < src.size(); ++i) {
        const int v = dst[i], w = src[i];
        su.row(v) += u.row(w) * (inv_sqrt[static_cast<std::size_t>(v)] *
                                 inv_sqrt[static_cast<std::size_t>(w)]);
      }
    }
    for (int v = 0; v < n; ++v) {
      if (observed[static_cast<std::size_t>(v)])
        u.row(v) = u0.row(v);
      else
        u.row(v) = su.row(v);
    }
  }
  return u;
}

nk::Matrix hybrid_mix(const nk::Matrix& t_deg, const nk::Matrix& t_prop, double rho) {
  if (t_deg.rows() != t_prop.rows() || t_deg.cols() != t_prop.cols())
    throw nk::ShapeError("hybrid_mix: shape mismatch");
  return rho * t_deg + (1.0 - rho) * t_prop;
}

std::vector<double> pretrain_degree_embed(const HeteroGraph& g, const nk::Matrix& s,
                                          const nk::Matrix& x_full,
                                          const std::vector<bool>& observed, TopoParams& params,
                                          int epochs, double lr) {
  if (epochs < 0) throw std::invalid_argument("pretrain_degree_embed: negative epochs");

  // observed rows grouped by type, global order preserved within each type
  std::vector<std::vector<int>> local_rows(static_cast<std::size_t>(g.num_types()));
  std::int64_t total = 0;
  for (int t = 0; t < g.num_types(); ++t) {
    const int off = g.type_offset(t), cnt = g.type_count(t);
    for (int i = 0; i < cnt; ++i)
      if (observed[static_cast<std::size_t>(off + i)]) {
        local_rows[static_cast<std::size_t>(t)].push_back(i);
        ++total;
      }
  }
  if (total == 0) return std::vector<double>(static_cast<std::size_t>(epochs) + 1, 0.0);

  nk::Matrix target(total, x_full.cols());
  std::vector<nk::Matrix> s_obs(static_cast<std::size_t>(g.num_types()));
  {
    Eigen::Index row = 0;
    for (int t = 0; t < g.num_types(); ++t) {
      const auto& rows = local_rows[static_cast<std::size_t>(t)];
      nk::Matrix sb(static_cast<Eigen::Index>(rows.size()), s.cols());
      const int off = g.type_offset(t);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        sb.row(static_cast<Eigen::Index>(i)) = s.row(off + rows[i]);
        target.row(row++) = x_full.row(off + rows[i]);
      }
      s_obs[static_cast<std::size_t>(t)] = std::move(sb);
    }
  }

  std::vector<int> all_rows(static_cast<std::size_t>(total));
  for (std::int64_t i = 0; i < total; ++i) all_rows[static_cast<std::size_t>(i)] = static_cast<int>(i);

  std::vector<double> losses;
  losses.reserve(static_cast<std::size_t>(epochs) + 1);
  for (int e = 0; e <= epochs; ++e) {
    const bool last = (e == epochs);
    nk::Tape tape;
    std::vector<nk::Var> w_vars(static_cast<std::size_t>(g.num_types()));
    std::vector<nk::Var> b_vars(static_cast<std::size_t>(g.num_types()));
    std::vector<nk::Var> parts;
    for (int t = 0; t < g.num_types(); ++t) {
      if (local_rows[static_cast<std::size_t>(t)].empty()) continue;
      w_vars[static_cast<std::size_t>(t)] =
          tape.leaf(params.W[static_cast<std::size_t>(t)], !last);
      b_vars[static_cast<std::size_t>(t)] =
          tape.leaf(params.b[static_cast<std::size_t>(t)], !last);
      nk::Var sv = tape.leaf(s_obs[static_cast<std::size_t>(t)]);
      parts.push_back(nk::add(nk::matmul(sv, w_vars[static_cast<std::size_t>(t)]),
                              b_vars[static_cast<std::size_t>(t)]));
    }
    nk::Var pred = parts.size() == 1 ? parts[0] : nk::concat_rows(parts);
    nk::Var loss = nk::masked_mse(pred, target, all_rows);
    losses.push_back(loss.value()(0, 0));
    if (last) break;
    tape.backward(loss);
    for (int t = 0; t < g.num_types(); ++t) {
      if (local_rows[static_cast<std::size_t>(t)].empty()) continue;
      params.W[static_cast<std::size_t>(t)] -= lr * tape.grad(w_vars[static_cast<std::size_t>(t)]);
      params.b[static_cast<std::size_t>(t)] -= lr * tape.grad(b_vars[static_cast<std::size_t>(t)]);
    }
  }
  return losses;
}

TopoPrior build_topo_prior(const HeteroGraph& g, const nk::Matrix& x_full,
                           const std::vector<bool>& observed, TopoParams& params,
                           const std::string& method, int hops, double rho, int pretrain_epochs,
                           double lr) {
  TopoPrior out;
  if (method == "none") {
    const Eigen::Index d = params.W.empty() ? x_full.cols() : params.W[0].cols();
    out.t = nk::Matrix::Zero(g.num_nodes(), d);
    return out;
  }
  if (method == "degree" || method == "hybrid") {
    const nk::Matrix s = degree_descriptors(g);
    if (pretrain_epochs > 0)
      out.pretrain_losses = pretrain_degree_embed(g, s, x_full, observed, params,
                                                  pretrain_epochs, lr);
    nk::Matrix t_deg = degree_embed(g, s, params);
    if (method == "degree") {
      out.t = std::move(t_deg);
      return out;
    }
    nk::Matrix t_prop = anchored_propagation(g, x_full, observed, hops);
    out.t = hybrid_mix(t_deg, t_prop, rho);
    return out;
  }
  if (method == "feature_prop") {
    out.t = anchored_propagation(g, x_full, observed, hops);
    return out;
  }
  throw std::invalid_argument("unknown pretrain method '" + method + "'");
}

}  // namespace hetbandit
