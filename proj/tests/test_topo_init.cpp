#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "common.hpp"
#include "hetbandit/topo_init.hpp"

using namespace hetbandit;
using nk::Matrix;

namespace {

Matrix random_features(int rows, int cols, Rng& rng) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.gauss();
  return m;
}

}  // namespace

TEST_CASE("normalize_per_type: per-type moments and constant columns") {
  GraphSchema s = testutil::toy_schema(20, 30, 10);
  HeteroGraph g = testutil::toy_graph(s, 3);
  Rng rng(1);
  Matrix x = random_features(g.num_nodes(), 4, rng);
  x.col(3).setConstant(5.0);  // constant column maps to zero
  Matrix z = normalize_per_type(g, x);
  for (int t = 0; t < g.num_types(); ++t) {
    auto block = z.middleRows(g.type_offset(t), g.type_count(t));
    for (int j = 0; j < 3; ++j) {
      const double mean = block.col(j).mean();
      const double var = (block.col(j).array() - mean).square().mean();
      CHECK(mean == doctest::Approx(0.0).epsilon(1e-9));
      CHECK(var == doctest::Approx(1.0).epsilon(1e-5));
    }
  }
  CHECK(z.col(3).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("degree_descriptors standardize log1p degree profiles per type") {
  GraphSchema s = testutil::toy_schema(6, 9, 4);
  HeteroGraph g = testutil::toy_graph(s, 21);
  Matrix desc = degree_descriptors(g);
  REQUIRE(desc.rows() == g.num_nodes());
  REQUIRE(desc.cols() == g.num_relations());
  // recompute by the published formula
  Matrix raw(g.num_nodes(), g.num_relations());
  for (int v = 0; v < g.num_nodes(); ++v)
    for (int r = 0; r < g.num_relations(); ++r)
      raw(v, r) = std::log1p(static_cast<double>(g.degree(v, r)));
  CHECK(std::log1p(3.0) == doctest::Approx(std::log(4.0)));
  Matrix expect = normalize_per_type(g, raw);
  CHECK((desc - expect).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  // structure-only: descriptors don't look at features at all (signature-level
  // guarantee); venue column for authors is constant zero degree -> zeros
  for (int v = 0; v < g.type_count(0); ++v) CHECK(desc(v, 1) == doctest::Approx(0.0));
}

TEST_CASE("degree_embed with identity weights reproduces descriptors") {
  GraphSchema s = testutil::toy_schema(8, 8, 8);
  HeteroGraph g = testutil::toy_graph(s, 4);
  Matrix desc = degree_descriptors(g);
  TopoParams params;
  const int m = g.num_relations();
  for (int t = 0; t < g.num_types(); ++t) {
    params.W.push_back(Matrix::Identity(m, m));
    params.b.push_back(Matrix::Zero(1, m));
  }
  Matrix emb = degree_embed(g, desc, params);
  // standardizing an already-standardized column is a near-identity
  CHECK((emb - desc).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("anchored propagation: three-node star oracle") {
  GraphSchema s;
  s.types = {{"missing", 1, false, 0}, {"obs", 2, true, 2}};
  s.relations = {{"touch", 0, 1}};
  s.target_type = 0;
  s.num_classes = 2;
  HeteroGraph g = HeteroGraph::build(s, {{{0, 0}, {0, 1}}});
  Matrix x = Matrix::Zero(3, 2);
  x.row(1) << 1.0, 0.0;
  x.row(2) << 0.0, 1.0;
  std::vector<bool> obs = {false, true, true};
  Matrix u = anchored_propagation(g, x, obs, 1);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CHECK(u(0, 0) == doctest::Approx(inv_sqrt2).epsilon(1e-12));
  CHECK(u(0, 1) == doctest::Approx(inv_sqrt2).epsilon(1e-12));
  // anchors are bitwise-stable
  CHECK(u(1, 0) == 1.0);
  CHECK(u(2, 1) == 1.0);
  CHECK_THROWS_AS((void)anchored_propagation(g, x, obs, 0), std::invalid_argument);
}

TEST_CASE("anchored propagation: anchor invariance and linearity on random graphs") {
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    Rng rng(splitmix64(trial));
    GraphSchema s = testutil::toy_schema(5 + static_cast<int>(rng.uniform_int(6)),
                                         5 + static_cast<int>(rng.uniform_int(6)),
                                         3 + static_cast<int>(rng.uniform_int(4)));
    HeteroGraph g = testutil::toy_graph(s, trial * 31 + 7, 5);
    Matrix x = random_features(g.num_nodes(), 3, rng);
    std::vector<bool> obs(static_cast<std::size_t>(g.num_nodes()), false);
    for (int v = g.type_offset(1); v < g.num_nodes(); ++v) obs[static_cast<std::size_t>(v)] = true;
    const int hops = 1 + static_cast<int>(rng.uniform_int(4));
    Matrix u = anchored_propagation(g, x, obs, hops);
    for (int v = 0; v < g.num_nodes(); ++v)
      if (obs[static_cast<std::size_t>(v)])
        CHECK((u.row(v) - x.row(v)).cwiseAbs().maxCoeff() == 0.0);  // exact anchors
    Matrix u2 = anchored_propagation(g, Matrix(2.0 * x), obs, hops);
    CHECK((u2 - 2.0 * u).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("anchored propagation: isolated missing node decays to zero") {
  GraphSchema s;
  s.types = {{"missing", 2, false, 0}, {"obs", 1, true, 2}};
  s.relations = {{"touch", 0, 1}};
  s.target_type = 0;
  s.num_classes = 2;
  // node 1 of the missing type is isolated
  HeteroGraph g = HeteroGraph::build(s, {{{0, 0}}});
  Matrix x = Matrix::Zero(3, 2);
  x.row(2) << 4.0, -2.0;
  std::vector<bool> obs = {false, false, true};
  for (int hops = 1; hops <= 3; ++hops) {
    Matrix u = anchored_propagation(g, x, obs, hops);
    CHECK(u.row(1).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("hybrid_mix endpoints, midpoint and convexity") {
  Matrix a(2, 2), b(2, 2);
  a << 2, 0, 1, 3;
  b << 0, 2, 5, -1;
  CHECK((hybrid_mix(a, b, 1.0) - a).cwiseAbs().maxCoeff() == 0.0);
  CHECK((hybrid_mix(a, b, 0.0) - b).cwiseAbs().maxCoeff() == 0.0);
  Matrix mid = hybrid_mix(a, b, 0.5);
  CHECK(mid(0, 0) == doctest::Approx(1.0));
  CHECK(mid(0, 1) == doctest::Approx(1.0));
  for (Eigen::Index i = 0; i < 2; ++i)
    for (Eigen::Index j = 0; j < 2; ++j) {
      const double lo = std::min(a(i, j), b(i, j)), hi = std::max(a(i, j), b(i, j));
      CHECK(mid(i, j) >= lo);
      CHECK(mid(i, j) <= hi);
    }
}

TEST_CASE("stage-1 pretraining reduces the regression loss") {
  GraphSchema s = testutil::toy_schema(10, 20, 8, 4, 4);
  HeteroGraph g = testutil::toy_graph(s, 13);
  Rng init_rng(2);
  TopoParams params = TopoParams::init(g.num_types(), g.num_relations(), 4, init_rng);
  TopoParams untouched = params;
  Matrix desc = degree_descriptors(g);
  Rng frng(5);
  Matrix x_full = Matrix::Zero(g.num_nodes(), 4);
  std::vector<bool> obs(static_cast<std::size_t>(g.num_nodes()), false);
  for (int v = g.type_offset(1); v < g.num_nodes(); ++v) {
    obs[static_cast<std::size_t>(v)] = true;
    for (int j = 0; j < 4; ++j) x_full(v, j) = frng.gauss();
  }

  SUBCASE("epochs=0 leaves parameters untouched") {
    auto losses = pretrain_degree_embed(g, desc, x_full, obs, params, 0, 5e-3);
    CHECK(losses.size() == 1);
    for (std::size_t t = 0; t < params.W.size(); ++t)
      CHECK((params.W[t] - untouched.W[t]).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("fifty epochs strictly reduce the loss") {
    auto losses = pretrain_degree_embed(g, desc, x_full, obs, params, 50, 5e-3);
    REQUIRE(losses.size() == 51);
    CHECK(losses.back() < losses.front());
  }
}

TEST_CASE("build_topo_prior covers every method") {
  GraphSchema s = testutil::toy_schema(6, 10, 5, 3, 3);
  HeteroGraph g = testutil::toy_graph(s, 17);
  Rng rng(4);
  TopoParams params = TopoParams::init(g.num_types(), g.num_relations(), 3, rng);
  Matrix x_full = Matrix::Zero(g.num_nodes(), 3);
  std::vector<bool> obs(static_cast<std::size_t>(g.num_nodes()), false);
  Rng frng(6);
  for (int v = g.type_offset(1); v < g.num_nodes(); ++v) {
    obs[static_cast<std::size_t>(v)] = true;
    for (int j = 0; j < 3; ++j) x_full(v, j) = frng.gauss();
  }

  TopoPrior none = build_topo_prior(g, x_full, obs, params, "none", 3, 0.5, 10, 5e-3);
  CHECK(none.t.cwiseAbs().maxCoeff() == 0.0);

  TopoPrior deg = build_topo_prior(g, x_full, obs, params, "degree", 3, 0.5, 5, 5e-3);
  CHECK(deg.t.rows() == g.num_nodes());
  CHECK(deg.pretrain_losses.size() == 6);

  TopoPrior prop = build_topo_prior(g, x_full, obs, params, "feature_prop", 2, 0.5, 0, 5e-3);
  for (int v = g.type_offset(1); v < g.num_nodes(); ++v)
    CHECK((prop.t.row(v) - x_full.row(v)).cwiseAbs().maxCoeff() == 0.0);

  TopoPrior hyb = build_topo_prior(g, x_full, obs, params, "hybrid", 2, 0.5, 0, 5e-3);
  CHECK(hyb.t.rows() == g.num_nodes());

  CHECK_THROWS_AS(
      (void)build_topo_prior(g, x_full, obs, params, "bogus", 2, 0.5, 0, 5e-3),
      std::invalid_argument);
}
