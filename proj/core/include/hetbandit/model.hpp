#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hetbandit/graph.hpp"
#include "hetbandit/rng.hpp"
#include "hetbandit/tensor.hpp"
#include "hetbandit/topo_init.hpp"

namespace hetbandit {

// All learnable state. Weight matrices are initialized uniformly in
// [-1/sqrt(fan_in), 1/sqrt(fan_in)] in a fixed documented order; biases start
// at zero, gamma at one, beta at 0.1. Indexed per type / relation / layer.
struct ModelState {
  std::vector<nk::Matrix> W_proj, b_proj;  // per type; empty for missing types
  std::vector<nk::Matrix> W_gate, b_gate;  // per type
  TopoParams topo;                         // per type
  std::vector<nk::Matrix> W_ctx;           // per type, 2d x d
  std::vector<nk::Matrix> beta;            // per type, 1 x 1
  std::vector<nk::Matrix> gamma;           // per type, 1 x d
  std::vector<std::vector<nk::Matrix>> W_self;  // [layer][type]
  std::vector<std::vector<nk::Matrix>> W_rel;   // [layer][relation]
  nk::Matrix W_cls, b_cls;
  std::vector<nk::Matrix> W_dec, b_dec;    // per type; empty for missing types

  static ModelState init(const GraphSchema& schema, int hidden_dim, int num_layers, Rng& rng);

  struct ParamRef {
    std::string name;
    nk::Matrix* mat;
    bool decay;  // weight decay applies to matrices only, not biases/gamma/beta
  };
  // stable ordering; excludes empty (unused) slots and the stage-trained topo
  // parameters unless requested
  std::vector<ParamRef> params(bool include_topo);
  std::int64_t num_parameters() const;
};

// Decoupled-weight-decay Adam. lr == 0 leaves parameters bitwise unchanged.
class AdamW {
 public:
  AdamW(double lr, double weight_decay, double beta1 = 0.9, double beta2 = 0.999,
        double eps = 1e-8);
  void step(const std::vector<ModelState::ParamRef>& params, const std::vector<nk::Matrix>& grads);

 private:
  double lr_, wd_, b1_, b2_, eps_;
  std::int64_t t_ = 0;
  std::vector<nk::Matrix> m_, v_;
};

}  // namespace hetbandit
