#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "common.hpp"
#include "hetbandit/backbone.hpp"

using namespace hetbandit;
using nk::Matrix;
using nk::Tape;
using nk::Var;

namespace {

// target {0,1}, item {2,3,4}; target 0 touches items 0 and 1, target 1
// touches item 2 twice (parallel edges)
HeteroGraph two_type_graph() {
  GraphSchema s;
  s.types = {{"target", 2, false, 0}, {"item", 3, true, 2}};
  s.relations = {{"uses", 0, 1}};
  s.target_type = 0;
  s.num_classes = 2;
  return HeteroGraph::build(s, {{{0, 0}, {0, 1}, {1, 2}, {1, 2}}});
}

}  // namespace

TEST_CASE("rgcn_layer aggregates relation means with identity weights") {
  HeteroGraph g = two_type_graph();
  Tape t;
  Matrix hv(5, 2);
  hv << 1, 2, 3, 4, 10, 20, 30, 40, 50, 60;
  Var h = t.leaf(hv);
  std::vector<Var> ws = {t.leaf(Matrix::Identity(2, 2)), t.leaf(Matrix::Identity(2, 2))};
  std::vector<Var> wr = {t.leaf(Matrix::Identity(2, 2))};
  Var out = rgcn_layer(g, h, ws, wr, Activation::identity);

  // target 0: self (1,2) + mean of items 0,1 = (20,30)
  CHECK(out.value()(0, 0) == doctest::Approx(21.0));
  CHECK(out.value()(0, 1) == doctest::Approx(32.0));
  // target 1: self (3,4) + item 2 (parallel edges average to itself)
  CHECK(out.value()(1, 0) == doctest::Approx(53.0));
  CHECK(out.value()(1, 1) == doctest::Approx(64.0));
  // item 2: self (50,60) + mean over {target1, target1} = (3,4)
  CHECK(out.value()(4, 0) == doctest::Approx(53.0));
  CHECK(out.value()(4, 1) == doctest::Approx(64.0));

  SUBCASE("relu activation clamps negatives") {
    std::vector<Var> wneg = {t.leaf(Matrix(-Matrix::Identity(2, 2))),
                             t.leaf(Matrix(-Matrix::Identity(2, 2)))};
    Var out2 = rgcn_layer(g, h, wneg, {t.leaf(Matrix::Zero(2, 2))}, Activation::relu);
    CHECK(out2.value().minCoeff() == 0.0);
  }
}

TEST_CASE("rgcn_layer: empty neighborhoods contribute zero") {
  GraphSchema s;
  s.types = {{"a", 2, false, 0}, {"b", 1, true, 2}};
  s.relations = {{"r", 0, 1}};
  s.target_type = 0;
  s.num_classes = 2;
  // node a1 has no edges at all
  HeteroGraph g = HeteroGraph::build(s, {{{0, 0}}});
  Tape t;
  Matrix hv(3, 2);
  hv << 5, 6, 7, 8, 1, 1;
  Var h = t.leaf(hv);
  std::vector<Var> ws = {t.leaf(Matrix::Identity(2, 2)), t.leaf(Matrix::Identity(2, 2))};
  std::vector<Var> wr = {t.leaf(Matrix::Identity(2, 2))};
  Var out = rgcn_layer(g, h, ws, wr, Activation::identity);
  CHECK(out.value()(1, 0) == doctest::Approx(7.0));  // pure self term
  CHECK(out.value()(1, 1) == doctest::Approx(8.0));
}

TEST_CASE("classify slices the target block") {
  HeteroGraph g = two_type_graph();
  Tape t;
  Matrix hv = Matrix::Zero(5, 2);
  hv(0, 0) = 1.0;
  hv(1, 1) = 2.0;
  Var h = t.leaf(hv);
  Var w = t.leaf(Matrix::Identity(2, 2));
  Var b = t.leaf(Matrix::Zero(1, 2));
  Var logits = classify(g, h, w, b);
  REQUIRE(logits.rows() == 2);  // only target rows
  CHECK(logits.value()(0, 0) == 1.0);
  CHECK(logits.value()(1, 1) == 2.0);
}

TEST_CASE("decode_block: identity decoder reproduces its input exactly") {
  Tape t;
  Rng rng(5);
  Matrix hv(4, 3);
  for (Eigen::Index i = 0; i < hv.size(); ++i) hv.data()[i] = rng.gauss();
  Var h = t.leaf(hv);
  Var dec = decode_block(h, t.leaf(Matrix::Identity(3, 3)), t.leaf(Matrix::Zero(1, 3)));
  CHECK((dec.value() - hv).cwiseAbs().maxCoeff() == 0.0);
  // perfect reconstruction means zero completion loss
  CHECK(nk::masked_mse(dec, hv, {0, 1, 2, 3}).value()(0, 0) == 0.0);
  // zero decoder: per-row error is the squared input norm
  Var zero = decode_block(h, t.leaf(Matrix::Zero(3, 3)), t.leaf(Matrix::Zero(1, 3)));
  CHECK(nk::masked_mse(zero, hv, {1}).value()(0, 0) ==
        doctest::Approx(hv.row(1).squaredNorm()).epsilon(1e-12));
}
