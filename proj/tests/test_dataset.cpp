#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <string>

#include "common.hpp"
#include "hetbandit/dataset.hpp"

using namespace hetbandit;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("hetbandit_test_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
  std::string str() const { return path.string(); }
};

bool same_matrix(const nk::Matrix& a, const nk::Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a - b).cwiseAbs().maxCoeff() == 0.0;
}

}  // namespace

TEST_CASE("generate_synthetic: shapes, determinism, and label quality") {
  SynthSpec spec;
  spec.target_count = 80;
  spec.signal_count = 70;
  spec.distractor_count = 60;
  spec.feature_dim = 12;
  spec.num_classes = 3;
  spec.seed = 5;
  auto res = generate_synthetic(spec);
  const Dataset& ds = res.dataset;

  CHECK(ds.graph.schema().types.size() == 3);
  CHECK(ds.graph.type_count(0) == 80);
  CHECK(ds.graph.type_count(1) == 70);
  CHECK(ds.graph.type_count(2) == 60);
  CHECK(ds.features.count(1) == 1);
  CHECK(ds.features.count(2) == 1);
  CHECK(ds.features.count(0) == 0);
  CHECK(ds.features.at(1).rows() == 70);
  CHECK(ds.features.at(1).cols() == 12);
  CHECK(res.prototypes.rows() == 3);
  CHECK(res.prototypes.cols() == 12);
  CHECK(static_cast<int>(ds.labels.size()) == 80);
  CHECK(validate_dataset(ds).empty());

  // every target node carries the requested number of edges in total
  for (int v = 0; v < 80; ++v) {
    auto profile = ds.graph.degree_profile(ds.graph.global_id(0, v));
    std::int64_t total = 0;
    for (std::int64_t d : profile) total += d;
    CHECK(total == spec.signal_edges_per_target + spec.distractor_edges_per_target);
  }

  SUBCASE("same seed reproduces everything bitwise") {
    auto res2 = generate_synthetic(spec);
    CHECK(same_matrix(res.dataset.features.at(1), res2.dataset.features.at(1)));
    CHECK(same_matrix(res.dataset.features.at(2), res2.dataset.features.at(2)));
    CHECK(same_matrix(res.prototypes, res2.prototypes));
    CHECK(res.dataset.labels == res2.dataset.labels);
    CHECK(res.clean_labels == res2.clean_labels);
    CHECK(res.dataset.train_idx == res2.dataset.train_idx);
    CHECK(res.dataset.graph.edge_count(0) == res2.dataset.graph.edge_count(0));
  }
  SUBCASE("different seeds differ") {
    SynthSpec other = spec;
    other.seed = 6;
    auto res2 = generate_synthetic(other);
    CHECK_FALSE(res.dataset.labels == res2.dataset.labels);
  }
  SUBCASE("label corruption rate tracks the noise knob") {
    int flips = 0;
    for (std::size_t i = 0; i < res.clean_labels.size(); ++i)
      if (res.clean_labels[i] != ds.labels[i]) ++flips;
    // noise = 0.1 corrupts to a *different* class; 80 nodes, allow wide slack
    CHECK(flips >= 1);
    CHECK(flips <= 25);
  }
  SUBCASE("noise = 0 means labels equal clean labels and the reference is perfect") {
    SynthSpec clean = spec;
    clean.noise = 0.0;
    auto r = generate_synthetic(clean);
    CHECK(r.clean_labels == r.dataset.labels);
    auto pred = synthetic_reference_predictions(r.dataset, r.prototypes);
    int agree = 0;
    for (std::size_t i = 0; i < pred.size(); ++i)
      if (pred[i] == r.dataset.labels[i]) ++agree;
    CHECK(agree == static_cast<int>(pred.size()));
  }
  SUBCASE("splits are disjoint and cover the requested fractions") {
    CHECK(static_cast<int>(ds.train_idx.size()) == 16);  // 0.2 * 80
    CHECK(static_cast<int>(ds.val_idx.size()) == 16);
    CHECK(static_cast<int>(ds.test_idx.size()) == 48);
    std::vector<int> seen(80, 0);
    for (int v : ds.train_idx) ++seen[static_cast<std::size_t>(v)];
    for (int v : ds.val_idx) ++seen[static_cast<std::size_t>(v)];
    for (int v : ds.test_idx) ++seen[static_cast<std::size_t>(v)];
    for (int c : seen) CHECK(c == 1);
  }
}

TEST_CASE("save_dataset / load_dataset round trip") {
  TempDir dir;
  auto ds = testutil::tiny_synth(3).dataset;
  save_dataset(ds, dir.str());

  CHECK(fs::exists(dir.path / "schema.json"));
  CHECK(fs::exists(dir.path / "splits.json"));

  auto back = load_dataset(dir.str());
  CHECK(back.graph.schema().types.size() == ds.graph.schema().types.size());
  CHECK(back.graph.type_count(0) == ds.graph.type_count(0));
  CHECK(back.labels == ds.labels);
  CHECK(back.train_idx == ds.train_idx);
  CHECK(back.val_idx == ds.val_idx);
  CHECK(back.test_idx == ds.test_idx);
  for (const auto& [t, x] : ds.features) {
    REQUIRE(back.features.count(t) == 1);
    CHECK(back.features.at(t).rows() == x.rows());
    CHECK((back.features.at(t) - x).cwiseAbs().maxCoeff() < 1e-12);
  }
  for (int r = 0; r < ds.graph.num_relations(); ++r)
    CHECK(back.graph.edge_count(r) == ds.graph.edge_count(r));
  CHECK(validate_dataset(back).empty());
}

TEST_CASE("load_dataset: diagnostics name the offending file") {
  TempDir dir;
  SUBCASE("missing directory") {
    CHECK_THROWS_WITH_AS(load_dataset((dir.path / "nope").string()),
                         doctest::Contains("not a directory"), std::runtime_error);
  }
  SUBCASE("directory without a schema") {
    fs::create_directories(dir.path / "empty");
    CHECK_THROWS_WITH_AS(load_dataset((dir.path / "empty").string()),
                         doctest::Contains("schema.json"), std::runtime_error);
  }
  SUBCASE("malformed edge row") {
    auto ds = testutil::tiny_synth(3).dataset;
    save_dataset(ds, dir.str());
    const std::string rel = ds.graph.schema().relations[0].name;
    std::ofstream out(dir.path / ("edges_" + rel + ".csv"), std::ios::app);
    out << "7,not_a_number\n";
    out.close();
    CHECK_THROWS_WITH_AS(load_dataset(dir.str()), doctest::Contains("edges_"),
                         std::runtime_error);
  }
  SUBCASE("edge endpoint out of range") {
    auto ds = testutil::tiny_synth(3).dataset;
    save_dataset(ds, dir.str());
    const std::string rel = ds.graph.schema().relations[0].name;
    std::ofstream out(dir.path / ("edges_" + rel + ".csv"), std::ios::app);
    out << "0,999999\n";
    out.close();
    CHECK_THROWS(load_dataset(dir.str()));
  }
  SUBCASE("feature row width mismatch") {
    auto ds = testutil::tiny_synth(3).dataset;
    save_dataset(ds, dir.str());
    // find an attributed type name
    int attr_type = ds.features.begin()->first;
    const std::string name = ds.graph.schema().types[static_cast<std::size_t>(attr_type)].name;
    std::ofstream out(dir.path / ("features_" + name + ".csv"), std::ios::app);
    out << "1.0,2.0\n";
    out.close();
    CHECK_THROWS(load_dataset(dir.str()));
  }
}

TEST_CASE("validate_dataset reports structural problems") {
  auto ds = testutil::tiny_synth(3).dataset;
  REQUIRE(validate_dataset(ds).empty());

  SUBCASE("feature row count mismatch") {
    Dataset bad = ds;
    int attr_type = bad.features.begin()->first;
    nk::Matrix x = bad.features.at(attr_type);
    bad.features[attr_type] = x.topRows(x.rows() - 1);
    auto issues = validate_dataset(bad);
    CHECK_FALSE(issues.empty());
  }
  SUBCASE("non-finite feature value") {
    Dataset bad = ds;
    int attr_type = bad.features.begin()->first;
    bad.features[attr_type](0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_FALSE(validate_dataset(bad).empty());
  }
  SUBCASE("split index out of range") {
    Dataset bad = ds;
    bad.train_idx.push_back(ds.graph.type_count(ds.target_type()) + 5);
    CHECK_FALSE(validate_dataset(bad).empty());
  }
  SUBCASE("overlapping splits") {
    Dataset bad = ds;
    REQUIRE_FALSE(bad.val_idx.empty());
    bad.train_idx.push_back(bad.val_idx.front());
    CHECK_FALSE(validate_dataset(bad).empty());
  }
  SUBCASE("split member without a label") {
    Dataset bad = ds;
    REQUIRE_FALSE(bad.train_idx.empty());
    bad.labels[static_cast<std::size_t>(bad.train_idx.front())] = -1;
    CHECK_FALSE(validate_dataset(bad).empty());
  }
  SUBCASE("label out of class range") {
    Dataset bad = ds;
    REQUIRE_FALSE(bad.train_idx.empty());
    bad.labels[static_cast<std::size_t>(bad.train_idx.front())] = bad.num_classes() + 3;
    CHECK_FALSE(validate_dataset(bad).empty());
  }
}
