#include "hetbandit/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "hetbandit/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace hetbandit {

namespace {

[[noreturn]] void fail(const std::string& file, std::int64_t line, const std::string& msg) {
  if (line > 0)
    throw std::runtime_error(file + ":" + std::to_string(line) + ": " + msg);
  throw std::runtime_error(file + ": " + msg);
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) fail(p.string(), 0, "cannot open file");
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    fail(p.string(), 0, std::string("invalid JSON: ") + e.what());
  }
  return j;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t at = 0;
  while (true) {
    const std::size_t comma = line.find(',', at);
    if (comma == std::string::npos) {
      out.push_back(line.substr(at));
      break;
    }
    out.push_back(line.substr(at, comma - at));
    at = comma + 1;
  }
  return out;
}

int parse_int(const std::string& s, const std::string& file, std::int64_t line) {
  int v = 0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e) fail(file, line, "expected integer, got '" + s + "'");
  return v;
}

double parse_double(const std::string& s, const std::string& file, std::int64_t line) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e) fail(file, line, "expected number, got '" + s + "'");
  return v;
}

std::string chomp(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == '\n')) s.pop_back();
  return s;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Dataset load_dataset(const std::string& dir) {
  const fs::path root(dir);
  if (!fs::is_directory(root)) throw std::runtime_error(dir + ": not a directory");

  const fs::path schema_path = root / "schema.json";
  json js = read_json(schema_path);
  GraphSchema schema;
  try {
    for (const auto& t : js.at("node_types")) {
      NodeTypeSpec s;
      s.name = t.at("name").get<std::string>();
      s.count = t.at("count").get<int>();
      s.attributed = t.at("attributed").get<bool>();
      s.feature_dim = t.value("feature_dim", 0);
      schema.types.push_back(std::move(s));
    }
    for (const auto& r : js.at("relations")) {
      RelationSpec s;
      s.name = r.at("name").get<std::string>();
      const std::string src = r.at("src").get<std::string>();
      const std::string dst = r.at("dst").get<std::string>();
      s.src_type = schema.type_id(src);
      s.dst_type = schema.type_id(dst);
      if (s.src_type < 0) fail(schema_path.string(), 0, "relation '" + s.name + "': unknown src type '" + src + "'");
      if (s.dst_type < 0) fail(schema_path.string(), 0, "relation '" + s.name + "': unknown dst type '" + dst + "'");
      schema.relations.push_back(std::move(s));
    }
    const std::string target = js.at("target_type").get<std::string>();
    schema.target_type = schema.type_id(target);
    if (schema.target_type < 0) fail(schema_path.string(), 0, "unknown target type '" + target + "'");
    schema.num_classes = js.at("num_classes").get<int>();
  } catch (const json::exception& e) {
    fail(schema_path.string(), 0, std::string("schema: ") + e.what());
  }
  schema.validate();

  std::vector<std::vector<std::pair<int, int>>> edges(schema.relations.size());
  for (std::size_t r = 0; r < schema.relations.size(); ++r) {
    const fs::path p = root / ("edges_" + schema.relations[r].name + ".csv");
    std::ifstream in(p);
    if (!in) fail(p.string(), 0, "cannot open file");
    std::string line;
    std::int64_t ln = 0;
    while (std::getline(in, line)) {
      ++ln;
      line = chomp(line);
      if (line.empty()) continue;
      const auto cells = split_line(line);
      if (cells.size() != 2) fail(p.string(), ln, "expected 'src,dst'");
      edges[r].emplace_back(parse_int(cells[0], p.string(), ln), parse_int(cells[1], p.string(), ln));
    }
  }

  Dataset ds;
  ds.graph = HeteroGraph::build(schema, std::move(edges));
  const GraphSchema& sc = ds.graph.schema();

  for (int t = 0; t < sc.num_types(); ++t) {
    if (!sc.types[t].attributed) continue;
    const fs::path p = root / ("features_" + sc.types[t].name + ".csv");
    std::ifstream in(p);
    if (!in) fail(p.string(), 0, "cannot open file");
    nk::Matrix f(sc.types[t].count, sc.types[t].feature_dim);
    std::string line;
    std::int64_t ln = 0;
    Eigen::Index row = 0;
    while (std::getline(in, line)) {
      ++ln;
      line = chomp(line);
      if (line.empty()) continue;
      if (row >= f.rows()) fail(p.string(), ln, "more feature rows than declared count");
      const auto cells = split_line(line);
      if (static_cast<Eigen::Index>(cells.size()) != f.cols())
        fail(p.string(), ln, "expected " + std::to_string(f.cols()) + " values, got " +
                                 std::to_string(cells.size()));
      for (Eigen::Index j = 0; j < f.cols(); ++j)
        f(row, j) = parse_double(cells[static_cast<std::size_t>(j)], p.string(), ln);
      ++row;
    }
    if (row != f.rows())
      fail(p.string(), 0, "expected " + std::to_string(f.rows()) + " feature rows, got " +
                              std::to_string(row));
    ds.features[t] = std::move(f);
  }

  const std::string target_name = sc.types[sc.target_type].name;
  ds.labels.assign(static_cast<std::size_t>(sc.types[sc.target_type].count), -1);
  {
    const fs::path p = root / ("labels_" + target_name + ".csv");
    std::ifstream in(p);
    if (!in) fail(p.string(), 0, "cannot open file");
    std::string line;
    std::int64_t ln = 0;
    while (std::getline(in, line)) {
      ++ln;
      line = chomp(line);
      if (line.empty()) continue;
      const auto cells = split_line(line);
      if (cells.size() != 2) fail(p.string(), ln, "expected 'node_id,label'");
      const int id = parse_int(cells[0], p.string(), ln);
      const int y = parse_int(cells[1], p.string(), ln);
      if (id < 0 || id >= static_cast<int>(ds.labels.size()))
        fail(p.string(), ln, "node_id " + std::to_string(id) + " out of range for type '" +
                                 target_name + "'");
      ds.labels[static_cast<std::size_t>(id)] = y;
    }
  }

  {
    const fs::path p = root / "splits.json";
    json sp = read_json(p);
    try {
      ds.train_idx = sp.at("train").get<std::vector<int>>();
      ds.val_idx = sp.at("val").get<std::vector<int>>();
      ds.test_idx = sp.at("test").get<std::vector<int>>();
    } catch (const json::exception& e) {
      fail(p.string(), 0, std::string("splits: ") + e.what());
    }
  }
  return ds;
}

void save_dataset(const Dataset& ds, const std::string& dir) {
  const fs::path root(dir);
  fs::create_directories(root);
  const GraphSchema& sc = ds.graph.schema();

  json js;
  js["node_types"] = json::array();
  for (const auto& t : sc.types) {
    json jt = {{"name", t.name}, {"count", t.count}, {"attributed", t.attributed}};
    if (t.attributed) jt["feature_dim"] = t.feature_dim;
    js["node_types"].push_back(std::move(jt));
  }
  js["relations"] = json::array();
  for (const auto& r : sc.relations)
    js["relations"].push_back({{"name", r.name},
                               {"src", sc.types[static_cast<std::size_t>(r.src_type)].name},
                               {"dst", sc.types[static_cast<std::size_t>(r.dst_type)].name}});
  js["target_type"] = sc.types[static_cast<std::size_t>(sc.target_type)].name;
  js["num_classes"] = sc.num_classes;
  std::ofstream(root / "schema.json") << js.dump(2) << "\n";

  for (int r = 0; r < sc.num_relations(); ++r) {
    std::ofstream out(root / ("edges_" + sc.relations[static_cast<std::size_t>(r)].name + ".csv"));
    const int src_type = sc.relations[static_cast<std::size_t>(r)].src_type;
    const int src_off = ds.graph.type_offset(src_type);
    const int dst_off = ds.graph.type_offset(sc.relations[static_cast<std::size_t>(r)].dst_type);
    // recover stored edges from the src-side adjacency rows
    const bool self_rel = sc.relations[static_cast<std::size_t>(r)].src_type ==
                          sc.relations[static_cast<std::size_t>(r)].dst_type;
    for (int s = 0; s < ds.graph.type_count(src_type); ++s) {
      int loop_seen = 0;
      for (int u : ds.graph.relation_neighbors(src_off + s, r)) {
        if (self_rel) {
          // each undirected edge sits in both endpoint rows; emit it from the
          // smaller endpoint, and emit self-loops (two row entries each) once
          if (u < src_off + s) continue;
          if (u == src_off + s && (++loop_seen % 2 == 0)) continue;
        }
        out << s << "," << (u - dst_off) << "\n";
      }
    }
  }

  for (const auto& [t, f] : ds.features) {
    std::ofstream out(root / ("features_" + sc.types[static_cast<std::size_t>(t)].name + ".csv"));
    for (Eigen::Index i = 0; i < f.rows(); ++i) {
      for (Eigen::Index j = 0; j < f.cols(); ++j) {
        if (j) out << ",";
        out << fmt_double(f(i, j));
      }
      out << "\n";
    }
  }

  {
    std::ofstream out(root /
                      ("labels_" + sc.types[static_cast<std::size_t>(sc.target_type)].name + ".csv"));
    for (std::size_t i = 0; i < ds.labels.size(); ++i)
      if (ds.labels[i] >= 0) out << i << "," << ds.labels[i] << "\n";
  }

  json sp = {{"train", ds.train_idx}, {"val", ds.val_idx}, {"test", ds.test_idx}};
  std::ofstream(root / "splits.json") << sp.dump(2) << "\n";
}

std::vector<std::string> validate_dataset(const Dataset& ds) {
  std::vector<std::string> out;
  const GraphSchema& sc = ds.graph.schema();

  for (int t = 0; t < sc.num_types(); ++t) {
    const auto& ts = sc.types[static_cast<std::size_t>(t)];
    if (ts.attributed) {
      auto it = ds.features.find(t);
      if (it == ds.features.end()) {
        out.push_back("attributed type '" + ts.name + "' has no feature matrix");
        continue;
      }
      if (it->second.rows() != ts.count || it->second.cols() != ts.feature_dim)
        out.push_back("type '" + ts.name + "': feature matrix is " +
                      std::to_string(it->second.rows()) + "x" + std::to_string(it->second.cols()) +
                      ", expected " + std::to_string(ts.count) + "x" +
                      std::to_string(ts.feature_dim));
      else if (!it->second.allFinite())
        out.push_back("type '" + ts.name + "': non-finite feature values");
    } else if (ds.features.count(t)) {
      out.push_back("type '" + ts.name + "' is not attributed but has features");
    }
  }

  const int tc = sc.types[static_cast<std::size_t>(sc.target_type)].count;
  if (static_cast<int>(ds.labels.size()) != tc)
    out.push_back("labels array length " + std::to_string(ds.labels.size()) +
                  " does not match target count " + std::to_string(tc));
  for (std::size_t i = 0; i < ds.labels.size(); ++i)
    if (ds.labels[i] != -1 && (ds.labels[i] < 0 || ds.labels[i] >= sc.num_classes))
      out.push_back("label for target node " + std::to_string(i) + " out of range: " +
                    std::to_string(ds.labels[i]));

  std::set<int> seen;
  auto check_split = [&](const char* name, const std::vector<int>& idx) {
    for (int v : idx) {
      if (v < 0 || v >= tc) {
        out.push_back(std::string(name) + " split: index " + std::to_string(v) + " out of range");
        continue;
      }
      if (!seen.insert(v).second)
        out.push_back(std::string(name) + " split: index " + std::to_string(v) +
                      " appears in more than one split");
      else if (static_cast<std::size_t>(v) < ds.labels.size() && ds.labels[static_cast<std::size_t>(v)] < 0)
        out.push_back(std::string(name) + " split: member " + std::to_string(v) + " has no label");
    }
  };
  check_split("train", ds.train_idx);
  check_split("val", ds.val_idx);
  check_split("test", ds.test_idx);
  if (ds.train_idx.empty()) out.push_back("train split is empty");
  return out;
}

SynthResult generate_synthetic(const SynthSpec& spec) {
  if (spec.target_count <= 0 || spec.signal_count <= 0 || spec.distractor_count <= 0)
    throw std::invalid_argument("generate_synthetic: node counts must be positive");
  if (spec.num_classes < 2) throw std::invalid_argument("generate_synthetic: num_classes >= 2 required");
  if (spec.feature_dim < 1) throw std::invalid_argument("generate_synthetic: feature_dim >= 1 required");
  if (spec.noise < 0.0 || spec.noise > 1.0)
    throw std::invalid_argument("generate_synthetic: noise must lie in [0, 1]");
  if (spec.signal_edges_per_target < 1)
    throw std::invalid_argument("generate_synthetic: each target needs at least one signal edge");
  if (spec.signal_type != 1)
    throw std::invalid_argument("generate_synthetic: the class-bearing type is index 1 in the generated schema");

  Rng rng(spec.seed);
  const int C = spec.num_classes, F = spec.feature_dim;

  nk::Matrix prototypes(C, F);
  for (Eigen::Index i = 0; i < prototypes.size(); ++i)
    prototypes.data()[i] = spec.signal_scale * rng.gauss();

  nk::Matrix sig(spec.signal_count, F);
  for (int u = 0; u < spec.signal_count; ++u) {
    const int c = u % C;
    for (int j = 0; j < F; ++j)
      sig(u, j) = prototypes(c, j) + spec.signal_feature_noise * rng.gauss();
  }

  nk::Matrix dis(spec.distractor_count, F);
  for (Eigen::Index i = 0; i < dis.size(); ++i) dis.data()[i] = spec.distractor_scale * rng.gauss();

  std::vector<std::pair<int, int>> ts, td;
  ts.reserve(static_cast<std::size_t>(spec.target_count) * spec.signal_edges_per_target);
  for (int v = 0; v < spec.target_count; ++v)
    for (int k = 0; k < spec.signal_edges_per_target; ++k)
      ts.emplace_back(v, static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(spec.signal_count))));
  for (int v = 0; v < spec.target_count; ++v)
    for (int k = 0; k < spec.distractor_edges_per_target; ++k)
      td.emplace_back(v, static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(spec.distractor_count))));

  GraphSchema schema;
  schema.types = {{"target", spec.target_count, false, 0},
                  {"signal", spec.signal_count, true, F},
                  {"distractor", spec.distractor_count, true, F}};
  schema.relations = {{"ts", 0, 1}, {"td", 0, 2}};
  schema.target_type = 0;
  schema.num_classes = C;

  SynthResult out;
  out.dataset.graph = HeteroGraph::build(schema, {ts, td});
  out.dataset.features[1] = std::move(sig);
  out.dataset.features[2] = std::move(dis);
  out.prototypes = prototypes;

  // labels from true signal-neighbor means
  out.clean_labels.assign(static_cast<std::size_t>(spec.target_count), 0);
  const nk::Matrix& sf = out.dataset.features.at(1);
  const int sig_off = out.dataset.graph.type_offset(1);
  for (int v = 0; v < spec.target_count; ++v) {
    const auto nbrs = out.dataset.graph.relation_neighbors(v, 0);
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(F);
    for (int u : nbrs) mean += sf.row(u - sig_off);
    mean /= static_cast<double>(nbrs.size());
    int best = 0;
    double best_score = mean.dot(prototypes.row(0));
    for (int c = 1; c < C; ++c) {
      const double s = mean.dot(prototypes.row(c));
      if (s > best_score) {
        best_score = s;
        best = c;
      }
    }
    out.clean_labels[static_cast<std::size_t>(v)] = best;
  }

  out.dataset.labels = out.clean_labels;
  for (int v = 0; v < spec.target_count; ++v)
    if (rng.bernoulli(spec.noise))
      out.dataset.labels[static_cast<std::size_t>(v)] =
          static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(C)));

  std::vector<int> perm(static_cast<std::size_t>(spec.target_count));
  for (int i = 0; i < spec.target_count; ++i) perm[static_cast<std::size_t>(i)] = i;
  for (int i = spec.target_count - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(i) + 1));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  const int ntr = static_cast<int>(spec.train_frac * spec.target_count);
  const int nva = static_cast<int>(spec.val_frac * spec.target_count);
  if (ntr <= 0 || nva < 0 || ntr + nva >= spec.target_count)
    throw std::invalid_argument("generate_synthetic: split fractions leave no test nodes");
  out.dataset.train_idx.assign(perm.begin(), perm.begin() + ntr);
  out.dataset.val_idx.assign(perm.begin() + ntr, perm.begin() + ntr + nva);
  out.dataset.test_idx.assign(perm.begin() + ntr + nva, perm.end());
  return out;
}

std::vector<int> synthetic_reference_predictions(const Dataset& ds, const nk::Matrix& prototypes) {
  const int T = ds.graph.type_count(0);
  const int F = static_cast<int>(prototypes.cols());
  const nk::Matrix& sf = ds.features.at(1);
  const int sig_off = ds.graph.type_offset(1);
  std::vector<int> pred(static_cast<std::size_t>(T), 0);
  for (int v = 0; v < T; ++v) {
    const auto nbrs = ds.graph.relation_neighbors(v, 0);
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(F);
    if (!nbrs.empty()) {
      for (int u : nbrs) mean += sf.row(u - sig_off);
      mean /= static_cast<double>(nbrs.size());
    }
    int best = 0;
    double best_score = mean.dot(prototypes.row(0));
    for (Eigen::Index c = 1; c < prototypes.rows(); ++c) {
      const double s = mean.dot(prototypes.row(c));
      if (s > best_score) {
        best_score = s;
        best = static_cast<int>(c);
      }
    }
    pred[static_cast<std::size_t>(v)] = best;
  }
  return pred;
}

}  // namespace hetbandit
