#include <doctest.h>

#include <random>
#include <set>

#include "tomo/errors.hpp"
#include "tomo/fusion.hpp"
#include "tomo/inference.hpp"

using namespace tomo;

namespace {

PathSeries make(const std::string& leaf, std::vector<double> v) {
  PathSeries s;
  s.root = "r";
  s.leaf = leaf;
  s.values = std::move(v);
  return s;
}

// leaves l1,l2 under A and l3,l4 under B; every edge an independent
// Gaussian with variance equal to its weight
std::vector<PathSeries> four_leaf(std::uint64_t seed, int n) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  const double w_a = 0.5, w_b = 2.0, w1 = 1.0, w2 = 1.5, w3 = 0.7, w4 = 1.2;
  std::vector<PathSeries> out{make("l1", {}), make("l2", {}), make("l3", {}), make("l4", {})};
  for (int k = 0; k < n; ++k) {
    const double a = std::sqrt(w_a) * g(rng), b = std::sqrt(w_b) * g(rng);
    out[0].values.push_back(a + std::sqrt(w1) * g(rng));
    out[1].values.push_back(a + std::sqrt(w2) * g(rng));
    out[2].values.push_back(b + std::sqrt(w3) * g(rng));
    out[3].values.push_back(b + std::sqrt(w4) * g(rng));
  }
  return out;
}

}  // namespace

TEST_CASE("shared metric of a series with itself is its variance") {
  const auto s = make("x", {1, 2, 4, 7});
  // mean 3.5; squares of deviations 6.25 + 2.25 + 0.25 + 12.25 = 21 over 3
  CHECK(pairwise_shared_metric(s, s) == doctest::Approx(7.0));
}

TEST_CASE("shared metric errors") {
  CHECK_THROWS_AS(pairwise_shared_metric(make("a", {1, 2}), make("b", {1, 2, 3})), TomoError);
  CHECK_THROWS_AS(pairwise_shared_metric(make("a", {1}), make("b", {2})), TomoError);
  auto other = make("b", {1, 2, 3});
  other.root = "q";
  CHECK_THROWS_AS(pairwise_shared_metric(make("a", {1, 2, 3}), other), TomoError);
}

TEST_CASE("independent series have small covariance") {
  const int n = 2000;
  int outside = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<double> x(n), y(n);
    for (int i = 0; i < n; ++i) {
      x[i] = g(rng);
      y[i] = g(rng);
    }
    outside += std::abs(pairwise_shared_metric(make("a", x), make("b", y))) > 3.0 / std::sqrt(n);
  }
  CHECK(outside <= 3);
}

TEST_CASE("shared on/off edge gives its log-loss variance") {
  // per window the shared edge is lossy with probability q; in that state
  // log transmission is log(1 - p)
  const double q = 0.4, p = 0.1;
  const double v = q * (1 - q) * std::log(1 - p) * std::log(1 - p);
  const int n = 20000;
  std::mt19937_64 rng(3);
  std::bernoulli_distribution state(q);
  std::normal_distribution<double> noise(0.0, 0.01);
  std::vector<double> x(n), y(n), prod(n);
  for (int k = 0; k < n; ++k) {
    const double shared = state(rng) ? std::log(1 - p) : 0.0;
    x[k] = shared + noise(rng);
    y[k] = shared + noise(rng);
  }
  const double est = pairwise_shared_metric(make("a", x), make("b", y));
  double mx = 0, my = 0;
  for (int k = 0; k < n; ++k) mx += x[k] / n, my += y[k] / n;
  double m2 = 0;
  for (int k = 0; k < n; ++k) {
    prod[k] = (x[k] - mx) * (y[k] - my);
    m2 += (prod[k] - est) * (prod[k] - est);
  }
  const double se = std::sqrt(m2 / (n - 1) / n);
  CHECK(std::abs(est - v) <= 3 * se);
}

TEST_CASE("two leaves") {
  const auto s = four_leaf(1, 500);
  const auto t = reconstruct_tree("r", Orientation::Source, {s[0], s[1]});
  CHECK(t.tree.leaves.size() == 2);
  REQUIRE(t.merges.size() == 1);
  CHECK(shared_weight(t.tree, "l1", "l2") == doctest::Approx(pairwise_shared_metric(s[0], s[1])));
  t.tree.validate();
}

TEST_CASE("four-leaf tree recovered at 10^4 windows") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto s = four_leaf(seed, 10000);
    const auto t = reconstruct_tree("r", Orientation::Source, s);
    t.tree.validate();
    CHECK(shared_weight(t.tree, "l1", "l2") == doctest::Approx(0.5).epsilon(0.15));
    CHECK(shared_weight(t.tree, "l3", "l4") == doctest::Approx(2.0).epsilon(0.15));
    CHECK(shared_weight(t.tree, "l1", "l3") == doctest::Approx(0.0).epsilon(0.05));
    // the first two merges are the sibling pairs
    REQUIRE(t.merges.size() >= 2);
    std::set<std::set<VertexId>> first{{t.merges[0].left, t.merges[0].right}, {t.merges[1].left, t.merges[1].right}};
    CHECK(first.contains({"l3", "l4"}));
    CHECK(first.contains({"l1", "l2"}));
    CHECK(t.tree.path_weight("l2") == doctest::Approx(2.0).epsilon(0.1));
  }
}

TEST_CASE("ties pick the smallest pair of names") {
  // c is independent, a,b,d identical up to sign: all positive metrics equal
  std::vector<double> base{1, -1, 2, -2, 0.5, -0.5};
  std::vector<double> indep{1, 1, -1, -1, 0, 0};
  const auto t = reconstruct_tree("r", Orientation::Source,
                                  {make("d", base), make("b", base), make("a", base), make("c", indep)});
  REQUIRE_FALSE(t.merges.empty());
  CHECK(t.merges[0].left == "a");
  CHECK(t.merges[0].right == "b");
}

TEST_CASE("all metrics nonpositive gives a star") {
  std::vector<PathSeries> s{make("a", {1, -1, 1, -1}), make("b", {-1, 1, -1, 1}), make("c", {1, 1, -1, -1})};
  for (auto& x : s) x.orientation = Orientation::Receiver;
  const auto t = reconstruct_tree("r", Orientation::Receiver, s);
  CHECK(t.degenerate);
  CHECK(t.tree.orientation == Orientation::Receiver);
  t.tree.validate();
}

TEST_CASE("leaf noise comes off the leaf edge only") {
  const auto s = four_leaf(2, 3000);
  ReconstructOptions o;
  o.leaf_noise = {0.1, 0.0, 0.0, 0.0};
  const auto plain = reconstruct_tree("r", Orientation::Source, s);
  const auto corrected = reconstruct_tree("r", Orientation::Source, s, o);
  CHECK(corrected.tree.path_weight("l1") == doctest::Approx(plain.tree.path_weight("l1") - 0.1));
  CHECK(corrected.tree.path_weight("l2") == doctest::Approx(plain.tree.path_weight("l2")));
}

TEST_CASE("serial and parallel reconstruction agree") {
  const auto s = four_leaf(4, 2000);
  ReconstructOptions a, b;
  a.backend = Backend::Serial;
  b.backend = Backend::Parallel;
  const auto ta = reconstruct_tree("r", Orientation::Source, s, a);
  const auto tb = reconstruct_tree("r", Orientation::Source, s, b);
  CHECK(ta.tree.weights() == tb.tree.weights());
}
