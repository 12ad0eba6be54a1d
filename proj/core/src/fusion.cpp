#include "hetbandit/fusion.hpp"

namespace hetbandit {

nk::Var project_block(nk::Tape& tape, const nk::Matrix& x, const nk::Var& W, const nk::Var& b) {
  nk::Var xv = tape.leaf(x);
  return nk::add(nk::matmul(xv, W), b);
}

nk::Var warm_start_mean(const std::vector<nk::Var>& attributed_blocks) {
  if (attributed_blocks.empty())
    throw nk::ShapeError("warm_start_mean: needs at least one attributed block");
  nk::Var all = attributed_blocks.size() == 1 ? attributed_blocks[0]
                                              : nk::concat_rows(attributed_blocks);
  std::vector<int> seg(static_cast<std::size_t>(all.rows()), 0);
  return nk::segment_mean(all, std::move(seg), 1);
}

nk::Var gated_fuse_block(const nk::Var& x_tilde, const nk::Var& t, const nk::Var& W_g,
                         const nk::Var& b_g) {
  nk::Var gate = nk::sigmoid(nk::add(nk::matmul(nk::concat_cols(x_tilde, t), W_g), b_g));
  return nk::add(nk::mul(gate, x_tilde), nk::mul(nk::scale_add(gate, -1.0, 1.0), t));
}

}  // namespace hetbandit
