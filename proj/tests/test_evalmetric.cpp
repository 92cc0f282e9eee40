#include <doctest.h>

#include "fixtures.hpp"
#include "tomo/errors.hpp"
#include "tomo/evalmetric.hpp"

using namespace tomo;

namespace {

PartialNetworkGraph crossing(double w1, double w2, double w3, double w4) {
  const std::vector<double> w{w1, w2, w3, w4};
  return fx::crossing_graph().with_weights(w);
}

// b1 and b2 reach b3 through x1 and b4 through x2: nothing leaves b1 or b2 on
// a shared edge
PartialNetworkGraph split_sources() {
  std::vector<Edge> e{{"f13", "b1", "x1", 1}, {"f14", "b1", "x2", 1}, {"f23", "b2", "x1", 1},
                      {"f24", "b2", "x2", 1}, {"g3", "x1", "b3", 1},  {"g4", "x2", "b4", 1}};
  return PartialNetworkGraph::build({"b1", "b2", "b3", "b4", "x1", "x2"}, e, {"b1", "b2", "b3", "b4"},
                                    {{"b1", "b3", {"f13", "g3"}},
                                     {"b2", "b3", {"f23", "g3"}},
                                     {"b1", "b4", {"f14", "g4"}},
                                     {"b2", "b4", {"f24", "g4"}}});
}

}  // namespace

TEST_CASE("signatures and classes") {
  const auto g = fx::crossing_graph();
  const auto s = edge_signatures(g);
  REQUIRE(s.size() == 4);
  CHECK(s[0].edge == "e1");
  CHECK(s[0].pairs == Signature{{"b1", "b3"}, {"b1", "b4"}});
  CHECK(s[2].pairs == Signature{{"b1", "b3"}, {"b2", "b3"}});
  CHECK(equivalence_classes(g).size() == 4);

  // a chain: both edges carry the single pair and share a class
  const auto chain = PartialNetworkGraph::build({"a", "b", "x"}, {{"e1", "a", "x", 1}, {"e2", "x", "b", 2}}, {"a", "b"},
                                                {{"a", "b", {"e1", "e2"}}});
  const auto c = equivalence_classes(chain);
  REQUIRE(c.size() == 1);
  CHECK(c[0].edges == std::vector<EdgeId>{"e1", "e2"});
  CHECK(sum_weight(chain, c[0].edges) == 3.0);
  CHECK(sum_weight(chain, {}) == 0.0);
}

TEST_CASE("matching edge sets") {
  const auto g = fx::crossing_graph();
  for (const auto& s : edge_signatures(g)) CHECK(matching_edge_set(s.pairs, g) == std::vector<EdgeId>{s.edge});
  const auto other = split_sources();
  CHECK(matching_edge_set(edge_signatures(g)[0].pairs, other).empty());
  CHECK(matching_edge_set(edge_signatures(g)[2].pairs, other) == std::vector<EdgeId>{"g3"});
}

TEST_CASE("metric of a graph against itself is zero") {
  const auto g = fx::random_graph(3, 5);
  CHECK(q_metric(g, sum_weight, g, sum_weight) == 0.0);
  const auto tm = tm_metrics(g, g);
  CHECK(tm.tm1 == 0.0);
  CHECK(tm.tm2 == 0.0);
  CHECK(tm.unmatched == 0);
}

TEST_CASE("one light class pair unmatched") {
  // unmatched: e1, e2 with weight 2 of 10
  const auto tm = tm_metrics(crossing(1, 1, 4, 4), split_sources());
  CHECK(tm.classes == 4);
  CHECK(tm.unmatched == 2);
  CHECK(tm.tm1 == doctest::Approx(0.2));
  CHECK(tm.tm2 == doctest::Approx(0.5));
}

TEST_CASE("equal weights give equal fractions") {
  const auto tm = tm_metrics(crossing(3, 3, 3, 3), split_sources());
  CHECK(tm.tm1 == doctest::Approx(0.5));
  CHECK(tm.tm2 == doctest::Approx(0.5));
}

TEST_CASE("heavy unmatched classes push TM1 above TM2") {
  const auto tm = tm_metrics(crossing(4, 4, 1, 1), split_sources());
  CHECK(tm.tm1 == doctest::Approx(0.8));
  CHECK(tm.tm1 > tm.tm2);
}

TEST_CASE("TM2 ignores weight scale") {
  const auto a = tm_metrics(crossing(1, 2, 3, 4), split_sources());
  const auto b = tm_metrics(crossing(10, 20, 30, 40), split_sources());
  CHECK(a.tm2 == b.tm2);
  CHECK(a.tm1 == doctest::Approx(b.tm1));
}

TEST_CASE("restricting to a set of edges") {
  const std::set<EdgeId> only{"e1"};
  const auto tm = tm_metrics(crossing(1, 1, 4, 4), split_sources(), &only);
  CHECK(tm.classes == 1);
  CHECK(tm.tm1 == 1.0);
}

TEST_CASE("weighted Q with member sums") {
  // other graph carries different weights on matched edges
  const auto g = crossing(1, 1, 4, 4);
  const std::vector<double> w{1, 1, 1, 1, 5, 4};
  const auto o = split_sources().with_weights(w);
  // |1-0| + |1-0| + |4-5| + |4-4| over 10
  CHECK(q_metric(g, sum_weight, o, sum_weight) == doctest::Approx(0.3));
}

TEST_CASE("metric errors") {
  CHECK_THROWS_AS(tm_metrics(crossing(0, 0, 0, 0), split_sources()), TomoError);
  try {
    q_metric(crossing(0, 0, 0, 0), sum_weight, split_sources(), sum_weight);
  } catch (const TomoError& e) {
    CHECK(e.kind() == ErrorKind::ZeroDenominator);
  }
  const auto two = PartialNetworkGraph::build({"a", "b"}, {{"e", "a", "b", 1}}, {"a", "b"}, {{"a", "b", {"e"}}});
  try {
    tm_metrics(fx::crossing_graph(), two);
    FAIL("expected BoundaryMismatch");
  } catch (const TomoError& e) {
    CHECK(e.kind() == ErrorKind::BoundaryMismatch);
  }
}

TEST_CASE("hidden classes") {
  CHECK(hidden_classes(fx::crossing_graph()).empty());
  // m is used by b1>b3 and b2>b4 only; the other two pairs go direct
  std::vector<Edge> e{{"b1p", "b1", "p", 1}, {"b2p", "b2", "p", 1}, {"m", "p", "q", 1},
                      {"qb3", "q", "b3", 1}, {"qb4", "q", "b4", 1}, {"d14", "b1", "b4", 1},
                      {"d23", "b2", "b3", 1}};
  const auto g = PartialNetworkGraph::build({"b1", "b2", "b3", "b4", "p", "q"}, e, {"b1", "b2", "b3", "b4"},
                                            {{"b1", "b3", {"b1p", "m", "qb3"}},
                                             {"b2", "b4", {"b2p", "m", "qb4"}},
                                             {"b1", "b4", {"d14"}},
                                             {"b2", "b3", {"d23"}}});
  const auto h = hidden_classes(g);
  REQUIRE(h.size() == 1);
  CHECK(h[0].edges == std::vector<EdgeId>{"m"});
}
