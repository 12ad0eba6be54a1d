#pragma once

#include <vector>

#include "hetbandit/graph.hpp"
#include "hetbandit/tensor.hpp"

namespace hetbandit {

enum class Activation { relu, identity };

// h'_v = act(W_self[type(v)] h_v + sum_r W_rel[r] mean_{u in N_r(v)} h_u).
// Relations are symmetric-accessible and share one weight per relation;
// empty relation neighborhoods contribute zero.
nk::Var rgcn_layer(const HeteroGraph& g, const nk::Var& h, const std::vector<nk::Var>& W_self,
                   const std::vector<nk::Var>& W_rel, Activation act);

// logits for the target-type block
nk::Var classify(const HeteroGraph& g, const nk::Var& h, const nk::Var& W_cls,
                 const nk::Var& b_cls);

// reconstruction head for one attributed type's block
nk::Var decode_block(const nk::Var& h_block, const nk::Var& W_dec, const nk::Var& b_dec);

}  // namespace hetbandit
