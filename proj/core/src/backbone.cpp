#include "hetbandit/backbone.hpp"

namespace hetbandit {

nk::Var rgcn_layer(const HeteroGraph& g, const nk::Var& h, const std::vector<nk::Var>& W_self,
                   const std::vector<nk::Var>& W_rel, Activation act) {
  if (static_cast<int>(W_self.size()) != g.num_types())
    throw nk::ShapeError("rgcn_layer: one self weight per type required");
  if (static_cast<int>(W_rel.size()) != g.num_relations())
    throw nk::ShapeError("rgcn_layer: one relation weight per relation required");
  if (h.rows() != g.num_nodes()) throw nk::ShapeError("rgcn_layer: row/node mismatch");

  std::vector<nk::Var> self_parts;
  self_parts.reserve(static_cast<std::size_t>(g.num_types()));
  for (int t = 0; t < g.num_types(); ++t) {
    nk::Var block = nk::slice_rows(h, g.type_offset(t), g.type_count(t));
    self_parts.push_back(nk::matmul(block, W_self[static_cast<std::size_t>(t)]));
  }
  nk::Var out = nk::concat_rows(self_parts);

  for (int r = 0; r < g.num_relations(); ++r) {
    nk::Var gathered = nk::gather_rows(h, g.message_sources(r));
    nk::Var agg = nk::segment_mean(gathered, g.message_targets(r), g.num_nodes());
    out = nk::add(out, nk::matmul(agg, W_rel[static_cast<std::size_t>(r)]));
  }
  return act == Activation::relu ? nk::relu(out) : out;
}

nk::Var classify(const HeteroGraph& g, const nk::Var& h, const nk::Var& W_cls,
                 const nk::Var& b_cls) {
  const int t = g.schema().target_type;
  nk::Var block = nk::slice_rows(h, g.type_offset(t), g.type_count(t));
  return nk::add(nk::matmul(block, W_cls), b_cls);
}

nk::Var decode_block(const nk::Var& h_block, const nk::Var& W_dec, const nk::Var& b_dec) {
  return nk::add(nk::matmul(h_block, W_dec), b_dec);
}

}  // namespace hetbandit
