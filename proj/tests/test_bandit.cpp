#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "common.hpp"
#include "hetbandit/bandit.hpp"

using namespace hetbandit;
using nk::Matrix;
using nk::Tape;
using nk::Var;

// High-precision reference values, frozen from 50-digit evaluation of the
// closed forms.
static const double kEtaDefault = 0.0064503792670082489428;
static const double kUpdatedP0 = 0.33358424070438967033;
static const double kUpdatedP1 = 0.33328309360878644205;
static const double kUpdatedP2 = 0.33313266568682388762;

TEST_CASE("step_size: default value, scaling laws and domain errors") {
  CHECK(step_size(0.1, 20, 3, 60) == doctest::Approx(kEtaDefault).epsilon(1e-12));
  // quadrupling the round count halves the step size
  CHECK(step_size(0.1, 20, 3, 240) ==
        doctest::Approx(step_size(0.1, 20, 3, 60) / 2.0).epsilon(1e-15));
  // K=4 versus K=3 scales by sqrt(3/4)
  CHECK(step_size(0.1, 20, 4, 60) / step_size(0.1, 20, 3, 60) ==
        doctest::Approx(std::sqrt(3.0 / 4.0)).epsilon(1e-15));
  CHECK_THROWS_AS((void)step_size(0.1, 1, 3, 60), std::invalid_argument);
  CHECK_THROWS_AS((void)step_size(0.1, 0, 3, 60), std::invalid_argument);
  CHECK_THROWS_AS((void)step_size(0.1, 20, 0, 60), std::invalid_argument);
  CHECK_THROWS_AS((void)step_size(0.1, 20, 3, 0), std::invalid_argument);
}

TEST_CASE("policy_distribution: worked examples") {
  auto p = policy_distribution({1, 1, 1}, 0.1);
  for (double x : p) CHECK(x == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  p = policy_distribution({2, 1, 1}, 0.1);
  CHECK(p[0] == doctest::Approx(0.45).epsilon(1e-9));
  CHECK(p[1] == doctest::Approx(0.275).epsilon(1e-9));
  CHECK(p[2] == doctest::Approx(0.275).epsilon(1e-9));

  // floor off: pure normalized weights
  p = policy_distribution({3, 1}, 0.0);
  CHECK(p[0] == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(0.25).epsilon(1e-12));

  CHECK_THROWS_AS((void)policy_distribution({1, 1, 1}, 1.0 / 3.0), std::invalid_argument);
  CHECK_THROWS_AS((void)policy_distribution({1, 1, 1}, -0.01), std::invalid_argument);
  CHECK_THROWS_AS((void)policy_distribution({1, 0, 1}, 0.1), std::invalid_argument);
  CHECK_THROWS_AS((void)policy_distribution({}, 0.1), std::invalid_argument);
}

TEST_CASE("policy_distribution: validity over 1000 randomized trials") {
  Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = 2 + static_cast<int>(rng.uniform_int(7));
    const double p_min = rng.uniform01() * (1.0 / k) * 0.99;
    std::vector<double> w(static_cast<std::size_t>(k));
    for (double& x : w) x = 1e-6 + rng.uniform01() * 10.0;
    const auto p = policy_distribution(w, p_min);
    const double sum = std::accumulate(p.begin(), p.end(), 0.0);
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    CHECK(*std::min_element(p.begin(), p.end()) >= p_min - 1e-12);
  }
}

TEST_CASE("update_weights: high-precision worked example") {
  const std::vector<double> w = {1, 1, 1};
  const std::vector<double> p = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  const std::vector<double> r = {0.5, 0.3, 0.2};
  const double eta = step_size(0.1, 20, 3, 60);
  const auto w2 = update_weights(w, r, p, eta);
  const auto p2 = policy_distribution(w2, 0.1);
  CHECK(p2[0] == doctest::Approx(kUpdatedP0).epsilon(1e-9));
  CHECK(p2[1] == doctest::Approx(kUpdatedP1).epsilon(1e-9));
  CHECK(p2[2] == doctest::Approx(kUpdatedP2).epsilon(1e-9));
  // the best-reward arm takes over the argmax
  CHECK(std::max_element(p2.begin(), p2.end()) == p2.begin());
  // weights stay positive and renormalized to unit sum
  CHECK(std::accumulate(w2.begin(), w2.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  for (double x : w2) CHECK(x > 0.0);
}

TEST_CASE("update_weights: symmetry leaves the distribution unchanged") {
  SUBCASE("uniform case") {
    const std::vector<double> w = {1, 1, 1};
    const auto p = policy_distribution(w, 0.1);
    const auto w2 = update_weights(w, {0.4, 0.4, 0.4}, p, 0.01);
    const auto p2 = policy_distribution(w2, 0.1);
    for (int i = 0; i < 3; ++i) CHECK(p2[static_cast<std::size_t>(i)] ==
                                      doctest::Approx(p[static_cast<std::size_t>(i)]).epsilon(1e-15));
  }
  SUBCASE("equal rewards over 1000 random weight vectors") {
    Rng rng(77);
    for (int trial = 0; trial < 1000; ++trial) {
      const int k = 2 + static_cast<int>(rng.uniform_int(5));
      std::vector<double> w(static_cast<std::size_t>(k));
      for (double& x : w) x = 0.05 + rng.uniform01();
      const double p_min = 0.02;
      const auto p = policy_distribution(w, p_min);
      const double r = rng.uniform01();
      // identical rewards but type-dependent 1/p bonus: use uniform w to make
      // the full symmetry claim; here equal rewards + equal p must fix p
      std::vector<double> wu(static_cast<std::size_t>(k), w[0]);
      const auto pu = policy_distribution(wu, p_min);
      const auto wu2 = update_weights(wu, std::vector<double>(static_cast<std::size_t>(k), r),
                                      pu, 0.01);
      const auto pu2 = policy_distribution(wu2, p_min);
      for (int i = 0; i < k; ++i)
        CHECK(std::abs(pu2[static_cast<std::size_t>(i)] - pu[static_cast<std::size_t>(i)]) <=
              1e-14);
    }
  }
}

TEST_CASE("update_weights: permutation equivariance over 1000 trials") {
  Rng rng(31337);
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = 3 + static_cast<int>(rng.uniform_int(4));
    std::vector<double> w(static_cast<std::size_t>(k)), r(static_cast<std::size_t>(k));
    for (double& x : w) x = 0.05 + rng.uniform01();
    for (double& x : r) x = rng.uniform01();
    const double p_min = 0.05;
    const auto p = policy_distribution(w, p_min);
    const auto w2 = update_weights(w, r, p, 0.02);

    std::vector<int> perm(static_cast<std::size_t>(k));
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = k - 1; i > 0; --i)
      std::swap(perm[static_cast<std::size_t>(i)],
                perm[static_cast<std::size_t>(rng.uniform_int(static_cast<std::uint64_t>(i + 1)))]);
    std::vector<double> wp(static_cast<std::size_t>(k)), rp(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
      wp[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
      rp[static_cast<std::size_t>(i)] = r[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
    }
    const auto pp = policy_distribution(wp, p_min);
    const auto wp2 = update_weights(wp, rp, pp, 0.02);
    for (int i = 0; i < k; ++i)
      CHECK(std::abs(wp2[static_cast<std::size_t>(i)] -
                     w2[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])]) <= 1e-12);
  }
}

TEST_CASE("update_weights: ranking monotonicity over 1000 trials") {
  Rng rng(555);
  for (int trial = 0; trial < 1000; ++trial) {
    // arms 0 and 1 share weight and therefore probability; arm 0 earns more
    const int k = 3;
    std::vector<double> w = {1.0, 1.0, 0.5 + rng.uniform01()};
    const auto p = policy_distribution(w, 0.1);
    std::vector<double> r = {0.6 + 0.4 * rng.uniform01(), 0.5 * rng.uniform01(),
                             rng.uniform01()};
    const auto w2 = update_weights(w, r, p, 0.01 + rng.uniform01() * 0.05);
    CHECK(w2[0] > w2[1]);
    const auto p2 = policy_distribution(w2, 0.1);
    CHECK(p2[0] > p2[1]);
  }
}

TEST_CASE("update_weights: common reward shift cancels") {
  const std::vector<double> w = {0.5, 0.3, 0.2};
  const auto p = policy_distribution(w, 0.1);
  const auto a = update_weights(w, {0.1, 0.4, 0.2}, p, 0.02);
  const auto b = update_weights(w, {0.6, 0.9, 0.7}, p, 0.02);
  for (int i = 0; i < 3; ++i)
    CHECK(a[static_cast<std::size_t>(i)] ==
          doctest::Approx(b[static_cast<std::size_t>(i)]).epsilon(1e-12));
  CHECK_THROWS_AS((void)update_weights(w, {0.1, 0.2, 0.3}, {0.5, 0.5, 0.0}, 0.02),
                  std::invalid_argument);
}

TEST_CASE("reward_proxy: mean row norms per type") {
  GraphSchema s = testutil::toy_schema(2, 2, 1);
  HeteroGraph g = testutil::toy_graph(s, 1, 0);
  Matrix h = Matrix::Zero(5, 2);
  h.row(0) << 3, 4;   // author norms 5 and 0 -> mean 2.5
  h.row(2) << 0, 2;   // paper norms 2 and 2 -> mean 2
  h.row(3) << 2, 0;
  h.row(4) << 8, 6;   // venue norm 10
  const auto r = reward_proxy(g, h);
  REQUIRE(r.size() == 3);
  CHECK(r[0] == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(r[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r[2] == doctest::Approx(10.0).epsilon(1e-12));

  SUBCASE("zero embeddings score zero") {
    const auto rz = reward_proxy(g, Matrix::Zero(5, 2));
    for (double x : rz) CHECK(x == 0.0);
  }
  SUBCASE("the normalized composition is scale-invariant up to the epsilon guard") {
    const auto base = normalize_rewards(r);
    const auto scaled = normalize_rewards(reward_proxy(g, Matrix(100.0 * h)));
    for (int i = 0; i < 3; ++i)
      CHECK(scaled[static_cast<std::size_t>(i)] ==
            doctest::Approx(base[static_cast<std::size_t>(i)]).epsilon(1e-6));
    const double total = 2.5 + 2.0 + 10.0;
    CHECK(base[0] == doctest::Approx(2.5 / (total + 1e-8)).epsilon(1e-12));
  }
}

TEST_CASE("normalize_rewards matches the direct formula") {
  const auto r = normalize_rewards({2, 3, 5});
  CHECK(r[0] == doctest::Approx(0.2).epsilon(1e-6));
  CHECK(r[1] == doctest::Approx(0.3).epsilon(1e-6));
  CHECK(r[2] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("allocate_budget: worked examples and rounding slack") {
  const std::vector<double> p = {0.5, 0.3, 0.2};
  auto b = allocate_budget(p, 20, {100, 100, 100});
  CHECK(b == std::vector<int>({30, 18, 12}));
  CHECK(std::accumulate(b.begin(), b.end(), 0) == 60);

  b = allocate_budget(p, 20, {100, 100, 10});
  CHECK(b == std::vector<int>({30, 18, 10}));
  CHECK(std::accumulate(b.begin(), b.end(), 0) == 58);

  // heavy floor-off: zero probability gets zero budget
  b = allocate_budget({1.0, 0.0}, 5, {50, 50});
  CHECK(b[1] == 0);

  SUBCASE("feasibility over 1000 random policies") {
    Rng rng(808);
    for (int trial = 0; trial < 1000; ++trial) {
      const int k = 2 + static_cast<int>(rng.uniform_int(6));
      std::vector<double> weights(static_cast<std::size_t>(k));
      for (double& x : weights) x = 0.01 + rng.uniform01();
      const auto pol = policy_distribution(weights, 0.0);
      const int n = 1 + static_cast<int>(rng.uniform_int(50));
      std::vector<int> sizes(static_cast<std::size_t>(k), 1000000);  // no clipping
      const auto bb = allocate_budget(pol, n, sizes);
      int sum = 0;
      for (std::size_t i = 0; i < bb.size(); ++i) {
        CHECK(bb[i] >= 0);
        CHECK(bb[i] <= sizes[i]);
        sum += bb[i];
      }
      CHECK(std::abs(sum - k * n) <= k / 2 + k);  // rounding slack bound
    }
  }
}

TEST_CASE("sample_representatives: exhaustive, empty and deterministic cases") {
  std::vector<double> norms = {1, 2, 3, 4, 5};

  Rng rng(1);
  const auto all = sample_representatives(5, 5, SampleMode::norm_proportional, norms, rng);
  CHECK(all == std::vector<int>({0, 1, 2, 3, 4}));
  const auto none = sample_representatives(5, 0, SampleMode::uniform, norms, rng);
  CHECK(none.empty());

  // short-circuit paths consume no randomness
  Rng probe(42), fresh(42);
  (void)sample_representatives(5, 0, SampleMode::uniform, norms, probe);
  (void)sample_representatives(5, 5, SampleMode::norm_proportional, norms, probe);
  CHECK(probe.raw() == fresh.raw());

  Rng r1(9), r2(9);
  const auto s1 = sample_representatives(100, 10, SampleMode::norm_proportional,
                                         std::vector<double>(100, 1.0), r1);
  const auto s2 = sample_representatives(100, 10, SampleMode::norm_proportional,
                                         std::vector<double>(100, 1.0), r2);
  CHECK(s1 == s2);
  CHECK(std::is_sorted(s1.begin(), s1.end()));
  CHECK(s1.size() == 10);

  Rng r3(9);
  const auto s3 = sample_representatives(100, 10, SampleMode::uniform, {}, r3);
  CHECK(std::is_sorted(s3.begin(), s3.end()));
  CHECK(s3.size() == 10);
  for (int v : s3) {
    CHECK(v >= 0);
    CHECK(v < 100);
  }

  CHECK_THROWS_AS((void)sample_representatives(3, 4, SampleMode::uniform, {}, r3),
                  std::invalid_argument);
}

TEST_CASE("sample_representatives: a dominant norm wins almost always") {
  // One node carries a million times the norm of the others: with budget one
  // it must be selected in at least 99.9% of ten thousand seeded trials.
  const int pool = 50;
  std::vector<double> norms(pool, 1.0);
  norms[17] = 1e6;
  int hits = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    Rng rng(splitmix64(static_cast<std::uint64_t>(trial) ^ 0xabcdULL));
    const auto s = sample_representatives(pool, 1, SampleMode::norm_proportional, norms, rng);
    REQUIRE(s.size() == 1);
    if (s[0] == 17) ++hits;
  }
  CHECK(hits >= 9990);
}

TEST_CASE("sample_representatives: zero norms fall back to uniform") {
  const int pool = 40;
  std::vector<double> zero(pool, 0.0);
  std::vector<int> counts(pool, 0);
  for (int trial = 0; trial < 4000; ++trial) {
    Rng rng(splitmix64(static_cast<std::uint64_t>(trial)));
    const auto s = sample_representatives(pool, 4, SampleMode::norm_proportional, zero, rng);
    for (int v : s) ++counts[static_cast<std::size_t>(v)];
  }
  // every node is reachable under the fallback
  for (int c : counts) CHECK(c > 0);
}

TEST_CASE("type_context: flat mean of the sampled rows") {
  Tape t;
  Matrix h(4, 2);
  h << 1, 0, 0, 1, 3, 5, 7, 9;
  Var hb = t.leaf(h);
  Var c = type_context(hb, {0, 1});
  CHECK(c.value()(0, 0) == doctest::Approx(0.5));
  CHECK(c.value()(0, 1) == doctest::Approx(0.5));
  Var single = type_context(hb, {3});
  CHECK(single.value()(0, 0) == 7.0);
  CHECK(single.value()(0, 1) == 9.0);
  CHECK_THROWS((void)type_context(hb, {}));

  SUBCASE("matches the flat-mean oracle on random sets") {
    Rng rng(12);
    Matrix big(30, 5);
    for (Eigen::Index i = 0; i < big.size(); ++i) big.data()[i] = rng.gauss();
    Var bigv = t.leaf(big);
    for (int trial = 0; trial < 25; ++trial) {
      std::vector<int> rows;
      for (int i = 0; i < 30; ++i)
        if (rng.bernoulli(0.4)) rows.push_back(i);
      if (rows.empty()) rows.push_back(static_cast<int>(rng.uniform_int(30)));
      Var c2 = type_context(bigv, rows);
      Matrix expect = Matrix::Zero(1, 5);
      for (int v : rows) expect += big.row(v);
      expect /= static_cast<double>(rows.size());
      CHECK((c2.value() - expect).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("fuse_context: fixed points and convex endpoint") {
  Tape t;
  Rng rng(21);
  const int n = 5, d = 3;
  Matrix hv(n, d);
  for (Eigen::Index i = 0; i < hv.size(); ++i) hv.data()[i] = 0.5 + rng.uniform01();
  Var h = t.leaf(hv);
  Var ws = t.leaf(Matrix::Zero(2 * d, d));

  SUBCASE("context equal to a row leaves that row bitwise unchanged") {
    Var beta = t.leaf(Matrix::Constant(1, 1, 0.7));
    Var c = t.leaf(Matrix(hv.row(2)));
    Var fused = fuse_context(h, c, ws, beta);
    CHECK((fused.value().row(2) - hv.row(2)).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("beta zero is the identity") {
    Var beta = t.leaf(Matrix::Zero(1, 1));
    Var c = t.leaf(Matrix::Constant(1, d, 2.0));
    Var fused = fuse_context(h, c, ws, beta);
    CHECK((fused.value() - hv).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("saturated gate gives the convex combination") {
    const double beta_val = 0.4;
    Var beta = t.leaf(Matrix::Constant(1, 1, beta_val));
    Var ws_big = t.leaf(Matrix::Constant(2 * d, d, 50.0));  // all-positive inputs saturate
    Matrix cv = Matrix::Constant(1, d, 2.0);
    Var fused = fuse_context(h, t.leaf(cv), ws_big, beta);
    Matrix expect(n, d);
    for (int i = 0; i < n; ++i)
      expect.row(i) = (1.0 - beta_val) * hv.row(i) + beta_val * cv.row(0);
    CHECK((fused.value() - expect).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("apply_policy_scaling: alpha arithmetic and bounds") {
  Tape t;
  Matrix hv(2, 3);
  hv << 1, 2, 3, 4, 5, 6;
  Var h = t.leaf(hv);
  Matrix gv(1, 3);
  gv << 2, 1, 0.5;
  Var gamma = t.leaf(gv);

  Var scaled = apply_policy_scaling(h, gamma, 1.0 / 3.0, true);
  // alpha = 0.5 + 1/3 = 0.8333...
  CHECK(scaled.value()(0, 0) == doctest::Approx((0.5 + 1.0 / 3.0) * 2.0).epsilon(1e-12));
  CHECK(scaled.value()(1, 2) == doctest::Approx((0.5 + 1.0 / 3.0) * 3.0).epsilon(1e-12));

  Var off = apply_policy_scaling(h, gamma, 1.0 / 3.0, false);
  CHECK(off.value()(0, 0) == doctest::Approx(2.0));  // alpha forced to one, gamma kept
  CHECK(off.value()(1, 1) == doctest::Approx(5.0));

  SUBCASE("alpha stays within [0.5 + p_min, 1.5) under the floor") {
    Rng rng(3);
    for (int trial = 0; trial < 1000; ++trial) {
      const int k = 2 + static_cast<int>(rng.uniform_int(5));
      std::vector<double> w(static_cast<std::size_t>(k));
      for (double& x : w) x = 0.01 + rng.uniform01();
      const double p_min = 0.05;
      const auto p = policy_distribution(w, p_min);
      for (double pk : p) {
        const double alpha = 0.5 + pk;
        CHECK(alpha >= 0.5 + p_min - 1e-12);
        CHECK(alpha < 1.5);
      }
    }
  }
}
