#include "hetbandit/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace hetbandit::nk {

const Matrix& Var::value() const {
  if (!valid()) throw std::logic_error("Var: value() on empty handle");
  return tape_->node(id_).value;
}

int Tape::add_node(Matrix value, bool requires_grad, std::function<void(Tape&)> backprop,
                   const char* op) {
  if (!value.allFinite()) throw NonFiniteError(op);
  bytes_ += static_cast<std::size_t>(value.size()) * sizeof(double);
  nodes_.push_back(Node{std::move(value), Matrix(), requires_grad, std::move(backprop)});
  return static_cast<int>(nodes_.size()) - 1;
}

Var Tape::leaf(Matrix value, bool requires_grad) {
  return Var(this, add_node(std::move(value), requires_grad, nullptr, "leaf"));
}

void Tape::accumulate(int id, const Matrix& g) {
  Node& n = nodes_[static_cast<std::size_t>(id)];
  if (!n.requires_grad) return;
  if (n.grad.size() == 0) {
    n.grad = Matrix::Zero(n.value.rows(), n.value.cols());
    bytes_ += static_cast<std::size_t>(n.grad.size()) * sizeof(double);
  }
  if (g.rows() != n.grad.rows() || g.cols() != n.grad.cols())
    throw ShapeError("gradient accumulation shape mismatch");
  n.grad += g;
}

Matrix& Tape::grad_ref(int id) {
  Node& n = nodes_[static_cast<std::size_t>(id)];
  if (n.grad.size() == 0) {
    n.grad = Matrix::Zero(n.value.rows(), n.value.cols());
    bytes_ += static_cast<std::size_t>(n.grad.size()) * sizeof(double);
  }
  return n.grad;
}

void Tape::backward(const Var& loss) {
  if (backward_done_) throw std::logic_error("backward: tape already consumed");
  if (loss.tape() != this) throw std::logic_error("backward: loss from another tape");
  const Node& ln = node(loss.id());
  if (ln.value.rows() != 1 || ln.value.cols() != 1)
    throw ShapeError("backward: loss must be a 1x1 scalar");
  if (!ln.requires_grad)
    throw std::logic_error("backward: loss does not depend on any gradient-requiring leaf");
  backward_done_ = true;
  grad_ref(loss.id())(0, 0) = 1.0;
  for (int id = static_cast<int>(nodes_.size()) - 1; id >= 0; --id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (!n.requires_grad || n.grad.size() == 0 || !n.backprop) continue;
    n.backprop(*this);
  }
  for (const auto& n : nodes_)
    if (n.grad.size() != 0 && !n.grad.allFinite()) throw NonFiniteError("backward");
}

Matrix Tape::grad(const Var& v) const {
  const Node& n = node(v.id());
  if (n.grad.size() == 0) return Matrix::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

namespace {

Tape& tape_of(const Var& a) {
  if (!a.valid()) throw std::logic_error("op on empty Var handle");
  return *a.tape();
}

void same_tape(const Var& a, const Var& b) {
  if (a.tape() != b.tape()) throw std::logic_error("op on vars from different tapes");
}

enum class Bcast { same, row, scalar };

Bcast classify(const Var& a, const Var& b, const char* op) {
  if (b.rows() == a.rows() && b.cols() == a.cols()) return Bcast::same;
  if (b.rows() == 1 && b.cols() == 1) return Bcast::scalar;
  if (b.rows() == 1 && b.cols() == a.cols()) return Bcast::row;
  throw ShapeError(std::string(op) + ": incompatible shapes " + std::to_string(a.rows()) + "x" +
                   std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                   std::to_string(b.cols()));
}

Matrix reduce_like(const Matrix& g, Bcast how) {
  if (how == Bcast::same) return g;
  if (how == Bcast::scalar) {
    Matrix r(1, 1);
    r(0, 0) = g.sum();
    return r;
  }
  return g.colwise().sum();
}

}  // namespace

Var matmul(const Var& a, const Var& b) {
  Tape& t = tape_of(a);
  same_tape(a, b);
  if (a.cols() != b.rows()) throw ShapeError("matmul: inner dimensions differ");
  Matrix out = a.value() * b.value();
  const bool rg = t.wants_grad(a) || t.wants_grad(b);
  const int ia = a.id(), ib = b.id();
  const int id = t.add_node(std::move(out), rg, nullptr, "matmul");
  if (rg) {
    t.node(id).backprop = [ia, ib, id](Tape& tp) {
      const Matrix& g = tp.node(id).grad;
      if (tp.node(ia).requires_grad) tp.accumulate(ia, g * tp.node(ib).value.transpose());
      if (tp.node(ib).requires_grad) tp.accumulate(ib, tp.node(ia).value.transpose() * g);
    };
  }
  return Var(&t, id);
}

Var add(const Var& a, const Var& b) {
  Tape& t = tape_of(a);
  same_tape(a, b);
  const Bcast how = classify(a, b, "add");
  Matrix out;
  if (how == Bcast::same) out = a.value() + b.value();
  else if (how == Bcast::scalar) out = a.value().array() + b.value()(0, 0);
  else out = a.value().rowwise() + b.value().row(0);
  const bool rg = t.wants_grad(a) || t.wants_grad(b);
  const int ia = a.id(), ib = b.id();
  int id = t.add_node(std::move(out), rg, nullptr, "add");
  if (rg) {
    t.node(id).backprop = [ia, ib, id, how](Tape& tp) {
      const Matrix& g = tp.node(id).grad;
      if (tp.node(ia).requires_grad) tp.accumulate(ia, g);
      if (tp.node(ib).requires_grad) tp.accumulate(ib, reduce_like(g, how));
    };
  }
  return Var(&t, id);
}

Var sub(const Var& a, const Var& b) {
  Tape& t = tape_of(a);
  same_tape(a, b);
  const Bcast how = classify(a, b, "sub");
  Matrix out;
  if (how == Bcast::same) out = a.value() - b.value();
  else if (how == Bcast::scalar) out = a.value().array() - b.value()(0, 0);
  else out = a.value().rowwise() - b.value().row(0);
  const bool rg = t.wants_grad(a) || t.wants_grad(b);
  const int ia = a.id(), ib = b.id();
  int id = t.add_node(std::move(out), rg, nullptr, "sub");
  if (rg) {
    t.node(id).backprop = [ia, ib, id, how](Tape& tp) {
      const Matrix& g = tp.node(id).grad;
      if (tp.node(ia).requires_grad) tp.accumulate(ia, g);
      if (tp.node(ib).requires_grad) tp.accumulate(ib, -reduce_like(g, how));
    };
  }
  return Var(&t, id);
}

Var mul(const Var& a, const Var& b) {
  Tape& t = tape_of(a);
  same_tape(a, b);
  const Bcast how = classify(a, b, "mul");
  Matrix out;
  if (how == Bcast::same) out = a.value().array() * b.value().array();
  else if (how == Bcast::scalar) out = a.value().array() * b.value()(0, 0);
  else out = a.value().array().rowwise() * b.value().row(0).array();
  const bool rg = t.wants_grad(a) || t.wants_grad(b);
  const int ia = a.id(), ib = b.id();
  int id = t.add_node(std::move(out), rg, nullptr, "mul");
  if (rg) {
    t.node(id).backprop = [ia, ib, id, how](Tape& tp) {
      const Matrix& g = tp.node(id).grad;
      const Matrix& av = tp.node(ia).value;
      const Matrix& bv = tp.node(ib).value;
      if (tp.node(ia).requires_grad) {
        if (how == Bcast::same) tp.accumulate(ia, (g.array() * bv.array()).matrix());
        else if (how == Bcast::scalar) tp.accumulate(ia, (g.array() * bv(0, 0)).matrix());
        else tp.accumulate(ia, (g.array().rowwise() * bv.row(0).array()).matrix());
      }
      if (tp.node(ib).requires_grad)
        tp.accumulate(ib, reduce_like((g.array() * av.array()).matrix(), how));
    };
  }
  return Var(&t, id);
}

Var scale_add(const Var& a, double m, double c) {
  Tape& t = tape_of(a);
  Matrix out = (a.value().array() * m + c).matrix();
  const bool rg = t.wants_grad(a);
  const int ia = a.id();
  int id = t.add_node(std::move(out), rg, nullptr, "scale_add");
  if (rg) {
    t.node(id).backprop = [ia, id, m](Tape& tp) {
      tp.accumulate(ia, (tp.node(id).grad.array() * m).matrix());
    };
  }
  return Var(&t, id);
}

Var sigmoid(const Var& a) {
  Tape& t = tape_of(a);
  const Matrix& x = a.value();
  Matrix out(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double v = x.data()[i];
    out.data()[i] = v >= 0.0 ? 1.0 / (1.0 + std::exp(-v))
                             : std::exp(v) / (1.0 + std::exp(v));
  }
  const bool rg = t.wants_grad(a);
  const int ia = a.id();
  int id = t.add_node(std::move(out), rg, nullptr, "sigmoid");
  if (rg) {
    t.node(id).backprop = [ia, id](Tape& tp) {
      const Matrix& s = tp.node(id).value;
      tp.accumulate(ia,
                    (tp.node(id).grad.array() * s.array() * (1.0 - s.array())).matrix());
    };
  }
  return Var(&t, id);
}

Var relu(const Var& a) {
  Tape& t = tape_of(a);
  Matrix out = a.value().cwiseMax(0.0);
  const bool rg = t.wants_grad(a);
  const int ia = a.id();
  int id = t.add_node(std::move(out), rg, nullptr, "relu");
  if (rg) {
    t.node(id).backprop = [ia, id](Tape& tp) {
      const Matrix& x = tp.node(ia).value;
      tp.accumulate(ia, (tp.node(id).grad.array() * (x.array() > 0.0).cast<double>()).matrix());
    };
  }
  return Var(&t, id);
}

Var log_e(const Var& a) {
  Tape& t = tape_of(a);
  Matrix out = a.value().array().log().matrix();
  const bool rg = t.wants_grad(a);
  const int ia = a.id();
  int id = t.add_node(std::move(out), rg, nullptr, "log");
  if (rg) {
    t.node(id).backprop = [ia, id](Tape& tp) {
      tp.accumulate(ia, (tp.node(id).grad.array() / tp.node(ia).value.array()).matrix());
    };
  }
  return Var(&t, id);
}

Var exp_e(const Var& a) {
  Tape& t = tape_of(a);
  Matrix out = a.value().array().exp().matrix();
  const bool rg = t.wants_grad(a);
  const int ia = a.id();
  int id = t.add_node(std::move(out), rg, nullptr, "exp");
  if (rg) {
    t.node(id).backprop = [ia, id](Tape& tp) {
      tp.accumulate(ia, (tp.node(id).grad.array() * tp.node(id).value.array()).matrix());
    };
  }
  return Var(&t, id);
}

Var row_l2_norm(const Var& a) {
  Tape& t = tape_of(a);
  Matrix out(a.rows(), 1);
  for (Eigen::Index i = 0; i < a.rows(); ++i) out(i, 0) = a.value().row(i).norm();
  const bool rg = t.wants_grad(a);
  const int ia = a.id();
  int id = t.add_node(std::move(out), rg, nullptr, "row_l2_norm");
  if (rg) {
    t.node(id).backprop = [ia, id](Tape& tp) {
      const Matrix& x = tp.node(ia).value;
      const Matrix& n = tp.node(id).value;
      const Matrix& g = tp.node(id).grad;
      Matrix dx = Matrix::Zero(x.rows(), x.cols());
      for (Eigen::Index i = 0; i < x.rows(); ++i)
        if (n(i, 0) > 0.0) dx.row(i) = g(i, 0) / n(i, 0) * x.row(i);
      tp.accumulate(ia, dx);
    };
  }
  return Var(&t, id);
}

Var concat_cols(const Var& a, const Var& b) {
  Tape& t = tape_of(a);
  same_tape(a, b);
  if (a.rows() != b.rows()) throw ShapeError("concat_cols: row counts differ");
  Matrix out(a.rows(), a.cols() + b.cols());
  out.leftCols(a.cols()) = a.value();
  out.rightCols(b.cols()) = b.value();
  const bool rg = t.wants_grad(a) || t.wants_grad(b);
  const int ia = a.id(), ib = b.id();
  const Eigen::Index ca = a.cols(), cb = b.cols();
  int id = t.add_node(std::move(out), rg, nullptr, "concat_cols");
  if (rg) {
    t.node(id).backprop = [ia, ib, id, ca, cb](Tape& tp) {
      const Matrix& g = tp.node(id).grad;
      if (tp.node(ia).requires_grad) tp.accumulate(ia, g.leftCols(ca));
      if (tp.node(ib).requires_grad) tp.accumulate(ib, g.rightCols(cb));
    };
  }
  return Var(&t, id);
}

Var concat_rows(const std::vector<Var>& parts) {
  if (parts.empty()) throw ShapeError("concat_rows: no parts");
  Tape& t = tape_of(parts[0]);
  Eigen::Index rows = 0;
  const Eigen::Index cols = parts[0].cols();
  for (const Var& p : parts) {
    same_tape(parts[0], p);
    if (p.cols() != cols) throw ShapeError("concat_rows: column counts differ");
    rows += p.rows();
  }
  Matrix out(rows, cols);
  bool rg = false;
  std::vector<int> ids;
  std::vector<Eigen::Index> begins;
  Eigen::Index at = 0;
  for (const Var& p : parts) {
    out.middleRows(at, p.rows()) = p.value();
    begins.push_back(at);
    at += p.rows();
    ids.push_back(p.id());
    rg = rg || t.wants_grad(p);
  }
  int id = t.add_node(std::move(out), rg, nullptr, "concat_rows");
  if (rg) {
    auto sids = std::make_shared<std::vector<int>>(std::move(ids));
    auto sbeg = std::make_shared<std::vector<Eigen::Index>>(std::move(begins));
    t.node(id).backprop = [sids, sbeg, id](Tape& tp) {
      const Matrix& g = tp.node(id).grad;
      for (std::size_t k = 0; k < sids->size(); ++k) {
        const int pid = (*sids)[k];
        if (!tp.node(pid).requires_grad) continue;
        tp.accumulate(pid, g.middleRows((*sbeg)[k], tp.node(pid).value.rows()));
      }
    };
  }
  return Var(&t, id);
}

Var slice_rows(const Var& a, int begin, int count) {
  Tape& t = tape_of(a);
  if (begin < 0 || count < 0 || begin + count > a.rows())
    throw ShapeError("slice_rows: range out of bounds");
  Matrix out = a.value().middleRows(begin, count);
  const bool rg = t.wants_grad(a);
  const int ia = a.id();
  int id = t.add_node(std::move(out), rg, nullptr, "slice_rows");
  if (rg) {
    t.node(id).backprop = [ia, id, begin, count](Tape& tp) {
      Matrix dx = Matrix::Zero(tp.node(ia).value.rows(), tp.node(ia).value.cols());
      dx.middleRows(begin, count) = tp.node(id).grad;
      tp.accumulate(ia, dx);
    };
  }
  return Var(&t, id);
}

Var gather_rows(const Var& a, std::vector<int> idx) {
  Tape& t = tape_of(a);
  for (int i : idx)
    if (i < 0 || i >= a.rows()) throw ShapeError("gather_rows: index out of range");
  Matrix out(static_cast<Eigen::Index>(idx.size()), a.cols());
  for (std::size_t k = 0; k < idx.size(); ++k)
    out.row(static_cast<Eigen::Index>(k)) = a.value().row(idx[k]);
  const bool rg = t.wants_grad(a);
  const int ia = a.id();
  int id = t.add_node(std::move(out), rg, nullptr, "gather_rows");
  if (rg) {
    auto sidx = std::make_shared<std::vector<int>>(std::move(idx));
    t.node(id).backprop = [ia, id, sidx](Tape& tp) {
      const Matrix& g = tp.node(id).grad;
      Matrix dx = Matrix::Zero(tp.node(ia).value.rows(), tp.node(ia).value.cols());
      for (std::size_t k = 0; k < sidx->size(); ++k)
        dx.row((*sidx)[k]) += g.row(static_cast<Eigen::Index>(k));
      tp.accumulate(ia, dx);
    };
  }
  return Var(&t, id);
}

Var segment_mean(const Var& a, std::vector<int> segments, int num_segments) {
  Tape& t = tape_of(a);
  if (static_cast<Eigen::Index>(segments.size()) != a.rows())
    throw ShapeError("segment_mean: one segment id per row required");
  if (num_segments < 0) throw ShapeError("segment_mean: negative segment count");
  for (int s : segments)
    if (s < 0 || s >= num_segments) throw ShapeError("segment_mean: segment id out of range");
  auto counts = std::make_shared<std::vector<double>>(static_cast<std::size_t>(num_segments), 0.0);
  for (int s : segments) (*counts)[static_cast<std::size_t>(s)] += 1.0;
  Matrix out = Matrix::Zero(num_segments, a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    out.row(segments[static_cast<std::size_t>(i)]) += a.value().row(i);
  for (int s = 0; s < num_segments; ++s)
    if ((*counts)[static_cast<std::size_t>(s)] > 0.0) out.row(s) /= (*counts)[static_cast<std::size_t>(s)];
  const bool rg = t.wants_grad(a);
  const int ia = a.id();
  int id = t.add_node(std::move(out), rg, nullptr, "segment_mean");
  if (rg) {
    auto sseg = std::make_shared<std::vector<int>>(std::move(segments));
    t.node(id).backprop = [ia, id, sseg, counts](Tape& tp) {
      const Matrix& g = tp.node(id).grad;
      Matrix dx(tp.node(ia).value.rows(), tp.node(ia).value.cols());
      for (Eigen::Index i = 0; i < dx.rows(); ++i) {
        const int s = (*sseg)[static_cast<std::size_t>(i)];
        dx.row(i) = g.row(s) / (*counts)[static_cast<std::size_t>(s)];
      }
      tp.accumulate(ia, dx);
    };
  }
  return Var(&t, id);
}

Var broadcast_rows(const Var& row, int n) {
  Tape& t = tape_of(row);
  if (row.rows() != 1) throw ShapeError("broadcast_rows: input must be 1 x c");
  if (n < 0) throw ShapeError("broadcast_rows: negative row count");
  Matrix out = row.value().replicate(n, 1);
  const bool rg = t.wants_grad(row);
  const int ia = row.id();
  int id = t.add_node(std::move(out), rg, nullptr, "broadcast_rows");
  if (rg) {
    t.node(id).backprop = [ia, id](Tape& tp) {
      tp.accumulate(ia, tp.node(id).grad.colwise().sum());
    };
  }
  return Var(&t, id);
}

Var softmax_cross_entropy(const Var& logits, const std::vector<int>& labels) {
  Tape& t = tape_of(logits);
  const Eigen::Index n = logits.rows(), c = logits.cols();
  if (n == 0) throw ShapeError("softmax_cross_entropy: no rows");
  if (static_cast<Eigen::Index>(labels.size()) != n)
    throw ShapeError("softmax_cross_entropy: one label per row required");
  for (int y : labels)
    if (y < 0 || y >= c) throw ShapeError("softmax_cross_entropy: label out of range");
  auto probs = std::make_shared<Matrix>(n, c);
  double total = 0.0;
  const Matrix& x = logits.value();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double m = x.row(i).maxCoeff();
    double z = 0.0;
    for (Eigen::Index j = 0; j < c; ++j) z += std::exp(x(i, j) - m);
    const double lse = m + std::log(z);
    total += lse - x(i, labels[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < c; ++j) (*probs)(i, j) = std::exp(x(i, j) - m) / z;
  }
  Matrix out(1, 1);
  out(0, 0) = total / static_cast<double>(n);
  const bool rg = t.wants_grad(logits);
  const int ia = logits.id();
  int id = t.add_node(std::move(out), rg, nullptr, "softmax_cross_entropy");
  if (rg) {
    auto slab = std::make_shared<std::vector<int>>(labels);
    t.node(id).backprop = [ia, id, probs, slab, n](Tape& tp) {
      const double go = tp.node(id).grad(0, 0);
      Matrix dx = *probs;
      for (Eigen::Index i = 0; i < n; ++i) dx(i, (*slab)[static_cast<std::size_t>(i)]) -= 1.0;
      tp.accumulate(ia, (dx.array() * (go / static_cast<double>(n))).matrix());
    };
  }
  return Var(&t, id);
}

Var masked_mse(const Var& pred, const Matrix& target, const std::vector<int>& rows) {
  Tape& t = tape_of(pred);
  if (rows.empty()) throw ShapeError("masked_mse: empty row set");
  if (target.rows() != pred.rows() || target.cols() != pred.cols())
    throw ShapeError("masked_mse: target shape differs from prediction");
  for (int v : rows)
    if (v < 0 || v >= pred.rows()) throw ShapeError("masked_mse: row index out of range");
  double total = 0.0;
  for (int v : rows) total += (pred.value().row(v) - target.row(v)).squaredNorm();
  Matrix out(1, 1);
  out(0, 0) = total / static_cast<double>(rows.size());
  const bool rg = t.wants_grad(pred);
  const int ia = pred.id();
  int id = t.add_node(std::move(out), rg, nullptr, "masked_mse");
  if (rg) {
    auto srows = std::make_shared<std::vector<int>>(rows);
    auto stgt = std::make_shared<Matrix>(target);
    t.node(id).backprop = [ia, id, srows, stgt](Tape& tp) {
      const double go = tp.node(id).grad(0, 0);
      const Matrix& p = tp.node(ia).value;
      Matrix dx = Matrix::Zero(p.rows(), p.cols());
      const double w = 2.0 * go / static_cast<double>(srows->size());
      for (int v : *srows) dx.row(v) += w * (p.row(v) - stgt->row(v));
      tp.accumulate(ia, dx);
    };
  }
  return Var(&t, id);
}

Var dropout(const Var& a, double rate, bool train, Rng& rng) {
  if (rate < 0.0 || rate >= 1.0) throw std::invalid_argument("dropout: rate must be in [0, 1)");
  if (!train || rate == 0.0) return a;
  Tape& t = tape_of(a);
  auto mask = std::make_shared<Matrix>(a.rows(), a.cols());
  const double keep = 1.0 - rate;
  const double inv = 1.0 / keep;
  for (Eigen::Index i = 0; i < mask->size(); ++i)
    mask->data()[i] = rng.bernoulli(keep) ? inv : 0.0;
  Matrix out = (a.value().array() * mask->array()).matrix();
  const bool rg = t.wants_grad(a);
  const int ia = a.id();
  int id = t.add_node(std::move(out), rg, nullptr, "dropout");
  if (rg) {
    t.node(id).backprop = [ia, id, mask](Tape& tp) {
      tp.accumulate(ia, (tp.node(id).grad.array() * mask->array()).matrix());
    };
  }
  return Var(&t, id);
}

Var standardize_cols(const Var& a, double eps) {
  Tape& t = tape_of(a);
  const Matrix& x = a.value();
  const Eigen::Index n = x.rows(), c = x.cols();
  if (n == 0) return t.leaf(Matrix::Zero(0, c), false);
  Matrix mu = x.colwise().mean();
  Matrix centered = x.rowwise() - mu.row(0);
  Matrix var = centered.array().square().matrix().colwise().mean();
  auto inv_std = std::make_shared<Matrix>(1, c);
  for (Eigen::Index j = 0; j < c; ++j) inv_std->operator()(0, j) = 1.0 / std::sqrt(var(0, j) + eps);
  Matrix out = (centered.array().rowwise() * inv_std->row(0).array()).matrix();
  const bool rg = t.wants_grad(a);
  const int ia = a.id();
  int id = t.add_node(std::move(out), rg, nullptr, "standardize_cols");
  if (rg) {
    t.node(id).backprop = [ia, id, inv_std, n](Tape& tp) {
      const Matrix& g = tp.node(id).grad;
      const Matrix& z = tp.node(id).value;
      const double invn = 1.0 / static_cast<double>(n);
      Matrix gbar = g.colwise().sum() * invn;                        // 1 x c
      Matrix gz = (g.array() * z.array()).matrix().colwise().sum() * invn;  // 1 x c
      Matrix dx = g;
      dx.array().rowwise() -= gbar.row(0).array();
      dx.array() -= z.array().rowwise() * gz.row(0).array();
      dx.array().rowwise() *= inv_std->row(0).array();
      tp.accumulate(ia, dx);
    };
  }
  return Var(&t, id);
}

FdReport finite_difference_check(
    const std::function<double()>& eval_loss,
    const std::vector<std::pair<std::string, Matrix*>>& params,
    const std::vector<Matrix>& analytic, double h, int max_entries_per_group,
    double denom_floor) {
  if (params.size() != analytic.size())
    throw std::invalid_argument("finite_difference_check: params/analytic size mismatch");
  FdReport report;
  for (std::size_t p = 0; p < params.size(); ++p) {
    Matrix* w = params[p].second;
    const Matrix& a = analytic[p];
    if (a.rows() != w->rows() || a.cols() != w->cols())
      throw std::invalid_argument("finite_difference_check: gradient shape mismatch for '" +
                                  params[p].first + "'");
    FdGroupReport gr;
    gr.name = params[p].first;
    const Eigen::Index total = w->size();
    Eigen::Index stride = 1;
    if (max_entries_per_group > 0 && total > max_entries_per_group)
      stride = (total + max_entries_per_group - 1) / max_entries_per_group;
    for (Eigen::Index k = 0; k < total; k += stride) {
      const double orig = w->data()[k];
      w->data()[k] = orig + h;
      const double lp = eval_loss();
      w->data()[k] = orig - h;
      const double lm = eval_loss();
      w->data()[k] = orig;
      const double fd = (lp - lm) / (2.0 * h);
      const double an = a.data()[k];
      const double rel = std::abs(an - fd) / std::max({std::abs(an), std::abs(fd), denom_floor});
      gr.max_rel_err = std::max(gr.max_rel_err, rel);
      ++gr.entries_checked;
    }
    report.max_rel_err = std::max(report.max_rel_err, gr.max_rel_err);
    report.groups.push_back(std::move(gr));
  }
  return report;
}

}  // namespace hetbandit::nk
