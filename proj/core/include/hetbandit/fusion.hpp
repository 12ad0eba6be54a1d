#pragma once

#include <vector>

#include "hetbandit/tensor.hpp"

namespace hetbandit {

// Front-end building blocks, composed per node type on an autodiff tape.

// x W + b for one type's observed feature block (x enters as a constant leaf)
nk::Var project_block(nk::Tape& tape, const nk::Matrix& x, const nk::Var& W, const nk::Var& b);

// flat mean over all attributed nodes' projected rows (the warm-start vector)
nk::Var warm_start_mean(const std::vector<nk::Var>& attributed_blocks);

// g = sigmoid([x_tilde || t] W_g + b_g); h0 = g * x_tilde + (1 - g) * t
nk::Var gated_fuse_block(const nk::Var& x_tilde, const nk::Var& t, const nk::Var& W_g,
                         const nk::Var& b_g);

}  // namespace hetbandit
