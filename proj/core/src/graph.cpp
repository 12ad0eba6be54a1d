#include "hetbandit/graph.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace hetbandit {

int GraphSchema::type_id(const std::string& name) const {
  for (int i = 0; i < num_types(); ++i)
    if (types[i].name == name) return i;
  return -1;
}

int GraphSchema::relation_id(const std::string& name) const {
  for (int i = 0; i < num_relations(); ++i)
    if (relations[i].name == name) return i;
  return -1;
}

void GraphSchema::validate() const {
  if (types.empty()) throw std::invalid_argument("schema: no node types declared");
  std::unordered_set<std::string> seen;
  for (const auto& t : types) {
    if (t.name.empty()) throw std::invalid_argument("schema: node type with empty name");
    if (!seen.insert(t.name).second)
      throw std::invalid_argument("schema: duplicate node type name '" + t.name + "'");
    if (t.count < 0)
      throw std::invalid_argument("schema: node type '" + t.name + "' has negative count");
    if (t.attributed && t.feature_dim <= 0)
      throw std::invalid_argument("schema: attributed type '" + t.name +
                                  "' needs feature_dim >= 1");
  }
  seen.clear();
  for (const auto& r : relations) {
    if (r.name.empty()) throw std::invalid_argument("schema: relation with empty name");
    if (!seen.insert(r.name).second)
      throw std::invalid_argument("schema: duplicate relation name '" + r.name + "'");
    if (r.src_type < 0 || r.src_type >= num_types())
      throw std::invalid_argument("schema: relation '" + r.name + "' has unknown src type");
    if (r.dst_type < 0 || r.dst_type >= num_types())
      throw std::invalid_argument("schema: relation '" + r.name + "' has unknown dst type");
  }
  if (target_type < 0 || target_type >= num_types())
    throw std::invalid_argument("schema: target_type out of range");
  if (num_classes < 2) throw std::invalid_argument("schema: num_classes must be >= 2");
}

HeteroGraph HeteroGraph::build(GraphSchema schema,
                               std::vector<std::vector<std::pair<int, int>>> edges) {
  schema.validate();
  if (static_cast<int>(edges.size()) != schema.num_relations())
    throw std::invalid_argument("build: edge lists do not match declared relations");

  HeteroGraph g;
  g.schema_ = std::move(schema);
  const int nt = g.schema_.num_types();
  g.offsets_.assign(nt + 1, 0);
  for (int t = 0; t < nt; ++t) g.offsets_[t + 1] = g.offsets_[t] + g.schema_.types[t].count;
  g.num_nodes_ = g.offsets_[nt];

  const int nr = g.schema_.num_relations();
  g.adj_.resize(nr);
  g.msg_targets_.resize(nr);
  g.edge_counts_.assign(nr, 0);
  g.collapsed_deg_.assign(g.num_nodes_, 0);

  for (int r = 0; r < nr; ++r) {
    const auto& rel = g.schema_.relations[r];
    const int sc = g.schema_.types[rel.src_type].count;
    const int dc = g.schema_.types[rel.dst_type].count;
    const int so = g.offsets_[rel.src_type];
    const int dof = g.offsets_[rel.dst_type];

    std::vector<std::int64_t> deg(g.num_nodes_ + 1, 0);
    std::int64_t e = 0;
    for (const auto& [s, d] : edges[r]) {
      if (s < 0 || s >= sc)
        throw std::invalid_argument("relation '" + rel.name + "' edge " + std::to_string(e) +
                                    ": src index " + std::to_string(s) +
                                    " out of range for type '" +
                                    g.schema_.types[rel.src_type].name + "' (count " +
                                    std::to_string(sc) + ")");
      if (d < 0 || d >= dc)
        throw std::invalid_argument("relation '" + rel.name + "' edge " + std::to_string(e) +
                                    ": dst index " + std::to_string(d) +
                                    " out of range for type '" +
                                    g.schema_.types[rel.dst_type].name + "' (count " +
                                    std::to_string(dc) + ")");
      ++deg[so + s + 1];
      ++deg[dof + d + 1];
      ++e;
    }
    g.edge_counts_[r] = e;

    auto& csr = g.adj_[r];
    csr.offsets.assign(g.num_nodes_ + 1, 0);
    for (int v = 0; v < g.num_nodes_; ++v) csr.offsets[v + 1] = csr.offsets[v] + deg[v + 1];
    csr.neighbors.assign(static_cast<std::size_t>(csr.offsets[g.num_nodes_]), 0);

    std::vector<std::int64_t> fill(csr.offsets.begin(), csr.offsets.end() - 1);
    for (const auto& [s, d] : edges[r]) {
      const int a = so + s, b = dof + d;
      csr.neighbors[static_cast<std::size_t>(fill[a]++)] = b;
      csr.neighbors[static_cast<std::size_t>(fill[b]++)] = a;
    }
    for (int v = 0; v < g.num_nodes_; ++v)
      std::sort(csr.neighbors.begin() + csr.offsets[v], csr.neighbors.begin() + csr.offsets[v + 1]);

    auto& tgt = g.msg_targets_[r];
    tgt.assign(csr.neighbors.size(), 0);
    for (int v = 0; v < g.num_nodes_; ++v)
      for (std::int64_t k = csr.offsets[v]; k < csr.offsets[v + 1]; ++k)
        tgt[static_cast<std::size_t>(k)] = v;

    for (int v = 0; v < g.num_nodes_; ++v)
      g.collapsed_deg_[v] += csr.offsets[v + 1] - csr.offsets[v];
  }
  return g;
}

int HeteroGraph::global_id(int t, int local) const {
  if (t < 0 || t >= num_types()) throw std::out_of_range("global_id: bad type id");
  if (local < 0 || local >= type_count(t)) throw std::out_of_range("global_id: bad local index");
  return offsets_[t] + local;
}

int HeteroGraph::type_of(int v) const {
  check_node(v);
  int lo = 0, hi = num_types() - 1;
  while (lo < hi) {
    const int mid = (lo + hi) / 2;
    if (v < offsets_[mid + 1]) hi = mid; else lo = mid + 1;
  }
  return lo;
}

void HeteroGraph::check_node(int v) const {
  if (v < 0 || v >= num_nodes_) throw std::out_of_range("node id out of range");
}

void HeteroGraph::check_relation(int r) const {
  if (r < 0 || r >= num_relations()) throw std::out_of_range("relation id out of range");
}

int HeteroGraph::degree(int v, int r) const {
  check_node(v);
  check_relation(r);
  return static_cast<int>(adj_[r].offsets[v + 1] - adj_[r].offsets[v]);
}

std::vector<std::int64_t> HeteroGraph::degree_profile(int v) const {
  check_node(v);
  std::vector<std::int64_t> out(num_relations(), 0);
  for (int r = 0; r < num_relations(); ++r) out[r] = adj_[r].offsets[v + 1] - adj_[r].offsets[v];
  return out;
}

std::vector<int> HeteroGraph::relation_neighbors(int v, int r) const {
  check_node(v);
  check_relation(r);
  const auto& csr = adj_[r];
  return {csr.neighbors.begin() + csr.offsets[v], csr.neighbors.begin() + csr.offsets[v + 1]};
}

}  // namespace hetbandit
