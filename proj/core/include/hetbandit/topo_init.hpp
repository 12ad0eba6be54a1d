#pragma once

#include <string>
#include <vector>

#include "hetbandit/graph.hpp"
#include "hetbandit/rng.hpp"
#include "hetbandit/tensor.hpp"

namespace hetbandit {

struct TopoParams {
  std::vector<nk::Matrix> W;  // per type, m x d
  std::vector<nk::Matrix> b;  // per type, 1 x d

  static TopoParams init(int num_types, int m, int d, Rng& rng);
};

// Per-type column standardization: within each type's row block each column
// is centered and scaled by sqrt(var + eps), biased variance. Constant
// columns map to zero.
nk::Matrix normalize_per_type(const HeteroGraph& g, const nk::Matrix& x, double eps = 1e-8);

// |V| x m matrix of log1p relation degrees, standardized per type.
nk::Matrix degree_descriptors(const HeteroGraph& g);

// Per-type affine map of the descriptors, standardized per type.
nk::Matrix degree_embed(const HeteroGraph& g, const nk::Matrix& s, const TopoParams& params);

// Anchored propagation over the collapsed graph. U0 equals x on observed rows
// and the observed-row mean elsewhere; each step recomputes
// U <- M U0 + (I - M) Sbar U with Sbar = D^{-1/2} A D^{-1/2} summed over all
// relations. Observed rows are reassigned from U0 every step, so they stay
// bitwise equal to x; isolated nodes get zero Sbar rows.
nk::Matrix anchored_propagation(const HeteroGraph& g, const nk::Matrix& x_full,
                                const std::vector<bool>& observed, int hops);

nk::Matrix hybrid_mix(const nk::Matrix& t_deg, const nk::Matrix& t_prop, double rho);

// Full-batch gradient descent fitting s_v W + b to x_full rows of observed
// nodes (mean squared error over all observed nodes). Returns the loss before
// each step plus the final loss (size epochs + 1); epochs == 0 leaves the
// parameters untouched.
std::vector<double> pretrain_degree_embed(const HeteroGraph& g, const nk::Matrix& s,
                                          const nk::Matrix& x_full,
                                          const std::vector<bool>& observed, TopoParams& params,
                                          int epochs, double lr);

struct TopoPrior {
  nk::Matrix t;  // |V| x d structural prior
  std::vector<double> pretrain_losses;
};

// method: "none" (zero prior), "degree", "feature_prop", or "hybrid".
// The degree branch trains `params` in place when pretrain_epochs > 0.
TopoPrior build_topo_prior(const HeteroGraph& g, const nk::Matrix& x_full,
                           const std::vector<bool>& observed, TopoParams& params,
                           const std::string& method, int hops, double rho, int pretrain_epochs,
                           double lr);

}  // namespace hetbandit
