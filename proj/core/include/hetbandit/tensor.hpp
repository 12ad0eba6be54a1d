#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "hetbandit/rng.hpp"

namespace hetbandit::nk {

// Dense rank<=2 doubles; scalars are 1x1. Row-major so that per-row gathers
// and segment reductions touch contiguous memory.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class NonFiniteError : public std::runtime_error {
 public:
  explicit NonFiniteError(const std::string& op)
      : std::runtime_error("non-finite value produced by op '" + op + "'") {}
};

class ShapeError : public std::invalid_argument {
 public:
  explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

class Tape;

// Lightweight handle into a tape node. Valid only while its tape is alive.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}
  const Matrix& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  bool valid() const { return tape_ != nullptr; }
  Tape* tape() const { return tape_; }
  int id() const { return id_; }

 private:
  Tape* tape_ = nullptr;
  int id_ = -1;
};

// Reverse-mode tape. Ops append nodes; creation order is a topological order,
// so backward() walks the nodes once in reverse. Each tape supports exactly
// one backward pass. Every forward primitive checks its result for
// non-finite values and throws NonFiniteError instead of propagating them.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var leaf(Matrix value, bool requires_grad = false);

  // loss must be 1x1 and require grad
  void backward(const Var& loss);
  bool backward_done() const { return backward_done_; }

  // zero matrix of the leaf's shape when the loss never touched it
  Matrix grad(const Var& v) const;

  // bytes currently allocated for values and gradients (memory accounting)
  std::size_t bytes() const { return bytes_; }

  // --- internals shared with the op implementations ---
  struct Node {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    std::function<void(Tape&)> backprop;
  };
  int add_node(Matrix value, bool requires_grad, std::function<void(Tape&)> backprop,
               const char* op);
  Node& node(int id) { return nodes_[static_cast<std::size_t>(id)]; }
  const Node& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
  bool wants_grad(const Var& v) const { return node(v.id()).requires_grad; }
  // accumulate into a node's gradient, allocating zeros on first touch
  void accumulate(int id, const Matrix& g);
  Matrix& grad_ref(int id);

 private:
  std::deque<Node> nodes_;
  std::size_t bytes_ = 0;
  bool backward_done_ = false;
};

// ---- primitives ----
Var matmul(const Var& a, const Var& b);
// b may match a's shape, be a 1 x cols row (broadcast over rows), or be 1x1
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
// m * a + c with plain double coefficients
Var scale_add(const Var& a, double m, double c = 0.0);
inline Var scale(const Var& a, double m) { return scale_add(a, m, 0.0); }
Var sigmoid(const Var& a);
Var relu(const Var& a);
Var log_e(const Var& a);
Var exp_e(const Var& a);
// n x d -> n x 1 Euclidean row norms
Var row_l2_norm(const Var& a);
Var concat_cols(const Var& a, const Var& b);
Var concat_rows(const std::vector<Var>& parts);
Var slice_rows(const Var& a, int begin, int count);
Var gather_rows(const Var& a, std::vector<int> idx);
// rows grouped by segment id; empty segments yield zero rows
Var segment_mean(const Var& a, std::vector<int> segments, int num_segments);
Var broadcast_rows(const Var& row, int n);
// mean cross-entropy with integer targets, fused stable softmax
Var softmax_cross_entropy(const Var& logits, const std::vector<int>& labels);
// (1/|rows|) * sum over rows of squared L2 distance; target is a constant
Var masked_mse(const Var& pred, const Matrix& target, const std::vector<int>& rows);
// inverted dropout; identity when train is false or rate == 0
Var dropout(const Var& a, double rate, bool train, Rng& rng);
// per-column standardization over rows: (x - mean) / sqrt(var + eps),
// biased variance; constant columns map to zero
Var standardize_cols(const Var& a, double eps);

// ---- finite-difference gradient checking ----
struct FdGroupReport {
  std::string name;
  double max_rel_err = 0.0;
  int entries_checked = 0;
};
struct FdReport {
  std::vector<FdGroupReport> groups;
  double max_rel_err = 0.0;
  bool pass(double tol) const { return max_rel_err < tol; }
};

// eval_loss re-evaluates the scalar loss at the parameters' current values;
// analytic[i] holds dLoss/dparam for params[i] at the unperturbed point.
// Central differences with step h; relative error is |a - f| / max(|a|, |f|, floor).
FdReport finite_difference_check(
    const std::function<double()>& eval_loss,
    const std::vector<std::pair<std::string, Matrix*>>& params,
    const std::vector<Matrix>& analytic, double h = 1e-5,
    int max_entries_per_group = 0, double denom_floor = 1e-3);

}  // namespace hetbandit::nk
