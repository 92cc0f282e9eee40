#include <doctest.h>

#include "fixtures.hpp"
#include "tomo/errors.hpp"
#include "tomo/netgraph.hpp"

using namespace tomo;

namespace {

PartialNetworkGraph star(bool extra_ab = false) {
  std::vector<Edge> e;
  for (std::string v : {"a", "b", "c"}) {
    e.push_back({v + "h", v, "h", 1.0});
    e.push_back({"h" + v, "h", v, 1.0});
  }
  std::vector<PathSpec> p;
  for (std::string u : {"a", "b", "c"})
    for (std::string v : {"a", "b", "c"})
      if (u != v) p.push_back({u, v, {u + "h", "h" + v}});
  if (extra_ab) p.push_back({"a", "b", {"ah", "hb"}});
  return PartialNetworkGraph::build({"a", "b", "c", "h"}, e, {"a", "b", "c"}, p);
}

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const TomoError& e) {
    return e.kind();
  }
  FAIL("no TomoError thrown");
  return ErrorKind::Io;
}

}  // namespace

TEST_CASE("3-star builds and sums paths") {
  const auto g = star();
  CHECK(g.vertex_count() == 4);
  CHECK(g.edge_count() == 6);
  CHECK(g.paths().size() == 6);
  CHECK(path_weight(g, "a", "b") == doctest::Approx(2.0));
  CHECK(g.vertices().front() == "a");
  CHECK(g.vertices().back() == "h");
}

TEST_CASE("second path for a pair is rejected") {
  CHECK(kind_of([] { star(true); }) == ErrorKind::DuplicatePath);
}

TEST_CASE("crossing paths graph is valid and pruned weights sum") {
  const auto g = fx::crossing_graph();
  CHECK(g.paths().size() == 4);
  const std::vector<double> w(4, 10.75);
  CHECK(path_weight(g.with_weights(w), "b1", "b3") == doctest::Approx(21.5).epsilon(1e-12));
}

TEST_CASE("build rejects malformed inputs") {
  std::vector<Edge> e{{"e1", "a", "x", 1}, {"e2", "x", "b", 1}, {"e3", "b", "y", 1}, {"e4", "y", "c", 1}};
  SUBCASE("disconnected edge sequence") {
    CHECK(kind_of([&] {
            PartialNetworkGraph::build({"a", "b", "c", "x", "y"}, e, {"a", "b", "c"}, {{"a", "b", {"e1", "e4"}}});
          }) == ErrorKind::MalformedPath);
  }
  SUBCASE("boundary vertex inside a path") {
    CHECK(kind_of([&] {
            PartialNetworkGraph::build({"a", "b", "c", "x", "y"}, e, {"a", "b", "c"},
                                       {{"a", "c", {"e1", "e2", "e3", "e4"}}});
          }) == ErrorKind::BoundaryInterior);
  }
  SUBCASE("negative weight") {
    auto neg = e;
    neg[0].weight = -1;
    CHECK(kind_of([&] {
            PartialNetworkGraph::build({"a", "b", "c", "x", "y"}, neg, {"a", "b", "c"}, {{"a", "b", {"e1", "e2"}}});
          }) == ErrorKind::NegativeWeight);
  }
  SUBCASE("unknown path") {
    const auto g = star();
    CHECK(kind_of([&] { path_weight(g, "a", "zz"); }) == ErrorKind::UnknownPath);
  }
}

TEST_CASE("path consistency is enforced") {
  // a->x->y->b and c->x->z->y->d: x..y reached by two different subpaths
  std::vector<Edge> e{{"ax", "a", "x", 1}, {"xy", "x", "y", 1}, {"yb", "y", "b", 1}, {"cx", "c", "x", 1},
                      {"xz", "x", "z", 1}, {"zy", "z", "y", 1}, {"yd", "y", "d", 1}};
  CHECK(kind_of([&] {
          PartialNetworkGraph::build({"a", "b", "c", "d", "x", "y", "z"}, e, {"a", "b", "c", "d"},
                                     {{"a", "b", {"ax", "xy", "yb"}}, {"c", "d", {"cx", "xz", "zy", "yd"}}});
        }) == ErrorKind::PathInconsistency);
}

TEST_CASE("zero weight single edge path") {
  const auto g = PartialNetworkGraph::build({"a", "b"}, {{"e", "a", "b", 0.0}}, {"a", "b"}, {{"a", "b", {"e"}}});
  CHECK(path_weight(g, "a", "b") == 0.0);
}

TEST_CASE("trees of the 3-star") {
  const auto [s, r] = extract_trees(star(), "a");
  CHECK(s.orientation == Orientation::Source);
  CHECK(s.edges.size() == 3);
  CHECK(s.leaves.size() == 2);
  CHECK(s.path_weight("b") == doctest::Approx(2.0));
  CHECK(r.orientation == Orientation::Receiver);
  CHECK(r.path_weight("c") == doctest::Approx(2.0));
  s.validate();
  r.validate();
}

TEST_CASE("diverge and rejoin is not a tree") {
  // a->x->y->b and a->x->z->y->c (only checked structurally)
  std::vector<Edge> e{{"ax", "a", "x", 1}, {"xy", "x", "y", 1}, {"yb", "y", "b", 1},
                      {"xz", "x", "z", 1}, {"zy", "z", "y", 1}, {"yc", "y", "c", 1}};
  const auto g = PartialNetworkGraph::build({"a", "b", "c", "x", "y", "z"}, e, {"a", "b", "c"},
                                            {{"a", "b", {"ax", "xy", "yb"}}, {"a", "c", {"ax", "xz", "zy", "yc"}}},
                                            GraphCheck::Structural);
  CHECK(kind_of([&] { extract_trees(g, "a"); }) == ErrorKind::NotATree);
}

TEST_CASE("logical subgraph contracts a chain") {
  std::vector<Edge> e{{"e1", "a", "x", 1}, {"e2", "x", "y", 2}, {"e3", "y", "b", 3}};
  const auto g = PartialNetworkGraph::build({"a", "b", "x", "y"}, e, {"a", "b"}, {{"a", "b", {"e1", "e2", "e3"}}});
  const auto l = logical_subgraph(g);
  REQUIRE(l.edge_count() == 1);
  CHECK(l.edges()[0].weight == doctest::Approx(6.0));
  CHECK(l.edges()[0].id == "e1+e2+e3");
}

TEST_CASE("logical subgraph keeps the 3-star hub") {
  const auto l = logical_subgraph(star());
  CHECK(l.vertex_count() == 4);
  CHECK(l.edge_count() == 6);
}

TEST_CASE("pass-through vertex with several in and out edges is not a branch point") {
  // a->x->b and c->x->d cross at x but no path continues two ways: x goes away
  std::vector<Edge> e{{"ax", "a", "x", 1}, {"xb", "x", "b", 1}, {"cx", "c", "x", 1}, {"xd", "x", "d", 1}};
  const auto g = PartialNetworkGraph::build({"a", "b", "c", "d", "x"}, e, {"a", "b", "c", "d"},
                                            {{"a", "b", {"ax", "xb"}}, {"c", "d", {"cx", "xd"}}});
  const auto l = logical_subgraph(g);
  CHECK_FALSE(l.has_vertex("x"));
  CHECK(l.edge_count() == 2);
  CHECK(path_weight(l, "a", "b") == doctest::Approx(2.0));
}

TEST_CASE("tree graph round trip") {
  const auto [s, r] = extract_trees(star(), "b");
  const auto g = tree_as_graph(s);
  const Tree back = graph_as_tree(g, "b", Orientation::Source);
  CHECK(back.path_weight("a") == doctest::Approx(s.path_weight("a")));
  CHECK(back.edges.size() == s.edges.size());
}
