#include "hetbandit/model.hpp"

#include <cmath>
#include <stdexcept>

namespace hetbandit {

namespace {

nk::Matrix uniform_init(int rows, int cols, Rng& rng) {
  const double bound = rows > 0 ? 1.0 / std::sqrt(static_cast<double>(rows)) : 0.0;
  nk::Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = (2.0 * rng.uniform01() - 1.0) * bound;
  return m;
}

}  // namespace

ModelState ModelState::init(const GraphSchema& schema, int hidden_dim, int num_layers, Rng& rng) {
  schema.validate();
  if (hidden_dim < 1 || num_layers < 1)
    throw std::invalid_argument("model init: hidden_dim and num_layers must be positive");
  const int K = schema.num_types();
  const int R = schema.num_relations();
  const int d = hidden_dim;

  ModelState m;
  // Draw order is fixed: projections, topology parameters, gates, contexts,
  // backbone layers, classifier, decoders. Biases, gamma, and beta never
  // consume the generator.
  m.W_proj.resize(static_cast<std::size_t>(K));
  m.b_proj.resize(static_cast<std::size_t>(K));
  for (int t = 0; t < K; ++t) {
    const auto& ts = schema.types[static_cast<std::size_t>(t)];
    if (!ts.attributed) continue;
    m.W_proj[static_cast<std::size_t>(t)] = uniform_init(ts.feature_dim, d, rng);
    m.b_proj[static_cast<std::size_t>(t)] = nk::Matrix::Zero(1, d);
  }
  m.topo = TopoParams::init(K, R, d, rng);
  m.W_gate.resize(static_cast<std::size_t>(K));
  m.b_gate.resize(static_cast<std::size_t>(K));
  for (int t = 0; t < K; ++t) {
    m.W_gate[static_cast<std::size_t>(t)] = uniform_init(2 * d, d, rng);
    m.b_gate[static_cast<std::size_t>(t)] = nk::Matrix::Zero(1, d);
  }
  m.W_ctx.resize(static_cast<std::size_t>(K));
  m.beta.resize(static_cast<std::size_t>(K));
  m.gamma.resize(static_cast<std::size_t>(K));
  for (int t = 0; t < K; ++t) {
    m.W_ctx[static_cast<std::size_t>(t)] = uniform_init(2 * d, d, rng);
    m.beta[static_cast<std::size_t>(t)] = nk::Matrix::Constant(1, 1, 0.1);
    m.gamma[static_cast<std::size_t>(t)] = nk::Matrix::Ones(1, d);
  }
  m.W_self.resize(static_cast<std::size_t>(num_layers));
  m.W_rel.resize(static_cast<std::size_t>(num_layers));
  for (int l = 0; l < num_layers; ++l) {
    auto& ws = m.W_self[static_cast<std::size_t>(l)];
    auto& wr = m.W_rel[static_cast<std::size_t>(l)];
    ws.resize(static_cast<std::size_t>(K));
    wr.resize(static_cast<std::size_t>(R));
    for (int t = 0; t < K; ++t) ws[static_cast<std::size_t>(t)] = uniform_init(d, d, rng);
    for (int r = 0; r < R; ++r) wr[static_cast<std::size_t>(r)] = uniform_init(d, d, rng);
  }
  m.W_cls = uniform_init(d, schema.num_classes, rng);
  m.b_cls = nk::Matrix::Zero(1, schema.num_classes);
  m.W_dec.resize(static_cast<std::size_t>(K));
  m.b_dec.resize(static_cast<std::size_t>(K));
  for (int t = 0; t < K; ++t) {
    const auto& ts = schema.types[static_cast<std::size_t>(t)];
    if (!ts.attributed) continue;
    m.W_dec[static_cast<std::size_t>(t)] = uniform_init(d, d, rng);
    m.b_dec[static_cast<std::size_t>(t)] = nk::Matrix::Zero(1, d);
  }
  return m;
}

std::vector<ModelState::ParamRef> ModelState::params(bool include_topo) {
  std::vector<ParamRef> out;
  auto push = [&out](const std::string& name, nk::Matrix& mat, bool decay) {
    if (mat.size() == 0) return;
    out.push_back(ParamRef{name, &mat, decay});
  };
  auto idx = [](const std::string& base, std::size_t i) {
    return base + "." + std::to_string(i);
  };
  for (std::size_t t = 0; t < W_proj.size(); ++t) {
    push(idx("W_proj", t), W_proj[t], true);
    push(idx("b_proj", t), b_proj[t], false);
  }
  if (include_topo) {
    for (std::size_t t = 0; t < topo.W.size(); ++t) {
      push(idx("topo.W", t), topo.W[t], true);
      push(idx("topo.b", t), topo.b[t], false);
    }
  }
  for (std::size_t t = 0; t < W_gate.size(); ++t) {
    push(idx("W_gate", t), W_gate[t], true);
    push(idx("b_gate", t), b_gate[t], false);
  }
  for (std::size_t t = 0; t < W_ctx.size(); ++t) push(idx("W_ctx", t), W_ctx[t], true);
  for (std::size_t t = 0; t < beta.size(); ++t) push(idx("beta", t), beta[t], false);
  for (std::size_t t = 0; t < gamma.size(); ++t) push(idx("gamma", t), gamma[t], false);
  for (std::size_t l = 0; l < W_self.size(); ++l) {
    for (std::size_t t = 0; t < W_self[l].size(); ++t)
      push("W_self." + std::to_string(l) + "." + std::to_string(t), W_self[l][t], true);
    for (std::size_t r = 0; r < W_rel[l].size(); ++r)
      push("W_rel." + std::to_string(l) + "." + std::to_string(r), W_rel[l][r], true);
  }
  push("W_cls", W_cls, true);
  push("b_cls", b_cls, false);
  for (std::size_t t = 0; t < W_dec.size(); ++t) {
    push(idx("W_dec", t), W_dec[t], true);
    push(idx("b_dec", t), b_dec[t], false);
  }
  return out;
}

std::int64_t ModelState::num_parameters() const {
  auto& self = const_cast<ModelState&>(*this);
  std::int64_t n = 0;
  for (const auto& p : self.params(true)) n += static_cast<std::int64_t>(p.mat->size());
  return n;
}

AdamW::AdamW(double lr, double weight_decay, double beta1, double beta2, double eps)
    : lr_(lr), wd_(weight_decay), b1_(beta1), b2_(beta2), eps_(eps) {}

void AdamW::step(const std::vector<ModelState::ParamRef>& params,
                 const std::vector<nk::Matrix>& grads) {
  if (params.size() != grads.size()) throw std::invalid_argument("AdamW: grad count mismatch");
  if (m_.empty()) {
    m_.reserve(params.size());
    v_.reserve(params.size());
    for (const auto& p : params) {
      m_.push_back(nk::Matrix::Zero(p.mat->rows(), p.mat->cols()));
      v_.push_back(nk::Matrix::Zero(p.mat->rows(), p.mat->cols()));
    }
  }
  if (m_.size() != params.size()) throw std::invalid_argument("AdamW: parameter set changed");
  ++t_;
  const double bc1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    nk::Matrix& p = *params[i].mat;
    const nk::Matrix& g = grads[i];
    if (g.rows() != p.rows() || g.cols() != p.cols())
      throw std::invalid_argument("AdamW: grad shape mismatch for " + params[i].name);
    m_[i] = b1_ * m_[i] + (1.0 - b1_) * g;
    v_[i] = b2_ * v_[i] + (1.0 - b2_) * g.cwiseProduct(g);
    const nk::Matrix mhat = m_[i] / bc1;
    const nk::Matrix vhat = v_[i] / bc2;
    nk::Matrix update =
        (mhat.array() / (vhat.array().sqrt() + eps_)).matrix();
    if (params[i].decay) update += wd_ * p;
    p -= lr_ * update;
  }
}

}  // namespace hetbandit
