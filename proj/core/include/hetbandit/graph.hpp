#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hetbandit {

struct NodeTypeSpec {
  std::string name;
  int count = 0;
  bool attributed = false;
  int feature_dim = 0;
};

struct RelationSpec {
  std::string name;
  int src_type = -1;
  int dst_type = -1;
};

struct GraphSchema {
  std::vector<NodeTypeSpec> types;
  std::vector<RelationSpec> relations;
  int target_type = -1;
  int num_classes = 0;

  int num_types() const { return static_cast<int>(types.size()); }
  int num_relations() const { return static_cast<int>(relations.size()); }
  // -1 when the name is unknown
  int type_id(const std::string& name) const;
  int relation_id(const std::string& name) const;
  // throws std::invalid_argument describing the first violation
  void validate() const;
};

// Immutable typed multigraph. Node identity is global: nodes of type t occupy
// the contiguous index range [type_offset(t), type_offset(t) + count(t)).
// Each relation keeps a CSR adjacency over all global nodes holding both
// endpoint directions, so neighbor lists and degrees are symmetric-accessible.
// Degrees count endpoint-role incidences: a self-loop edge (u,u) of a
// self-relation contributes 2 to deg_r(u), and parallel edges count with
// multiplicity, keeping sum_v deg_r(v) == 2|E_r| exact.
class HeteroGraph {
 public:
  // edges[r] lists (src_local, dst_local) pairs for relation r, 0-based within
  // the endpoint types. Throws std::invalid_argument naming the offending
  // record on any range violation.
  static HeteroGraph build(GraphSchema schema,
                           std::vector<std::vector<std::pair<int, int>>> edges);

  const GraphSchema& schema() const { return schema_; }
  int num_types() const { return schema_.num_types(); }
  int num_relations() const { return schema_.num_relations(); }
  int num_nodes() const { return num_nodes_; }

  int type_count(int t) const { return schema_.types.at(t).count; }
  int type_offset(int t) const { return offsets_.at(t); }
  int global_id(int t, int local) const;
  int type_of(int v) const;
  int local_of(int v) const { return v - offsets_[type_of(v)]; }

  std::int64_t edge_count(int r) const { return edge_counts_.at(r); }

  int degree(int v, int r) const;
  // one entry per relation, zeros where the relation never touches v's type
  std::vector<std::int64_t> degree_profile(int v) const;
  // opposite endpoints of v under relation r, ascending, with multiplicity
  std::vector<int> relation_neighbors(int v, int r) const;

  // flat incidence arrays for message passing: for every global node v (the
  // segment id) the sources are its relation-r neighbors
  const std::vector<int>& message_sources(int r) const { return adj_[r].neighbors; }
  const std::vector<int>& message_targets(int r) const { return msg_targets_.at(r); }

  // collapsed degree over all relations, used by the propagation operator
  std::int64_t collapsed_degree(int v) const { return collapsed_deg_.at(v); }

 private:
  struct Csr {
    std::vector<std::int64_t> offsets;  // num_nodes + 1
    std::vector<int> neighbors;         // sorted ascending within each row
  };

  GraphSchema schema_;
  int num_nodes_ = 0;
  std::vector<int> offsets_;  // num_types + 1
  std::vector<Csr> adj_;      // per relation
  std::vector<std::vector<int>> msg_targets_;
  std::vector<std::int64_t> edge_counts_;
  std::vector<std::int64_t> collapsed_deg_;

  void check_node(int v) const;
  void check_relation(int r) const;
};

}  // namespace hetbandit
