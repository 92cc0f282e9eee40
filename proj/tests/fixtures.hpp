#pragma once

// Shared test fixtures and brute-force oracles.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "tomo/consistency.hpp"
#include "tomo/linsolve.hpp"
#include "tomo/netgraph.hpp"
#include "tomo/simulate.hpp"

namespace fx {

using namespace tomo;

// b1,b2 -> x -> b3,b4 with every edge 10; four paths through x
inline PartialNetworkGraph crossing_graph() {
  std::vector<Edge> e{{"e1", "b1", "x", 10}, {"e2", "b2", "x", 10}, {"e3", "x", "b3", 10}, {"e4", "x", "b4", 10}};
  return PartialNetworkGraph::build({"b1", "b2", "b3", "b4", "x"}, e, {"b1", "b2", "b3", "b4"},
                                    {{"b1", "b3", {"e1", "e3"}},
                                     {"b2", "b3", {"e2", "e3"}},
                                     {"b1", "b4", {"e1", "e4"}},
                                     {"b2", "b4", {"e2", "e4"}}});
}

inline TargetWeights crossing_targets() {
  TargetWeights z;
  z.values = {{{"b1", "b3"}, 22}, {{"b2", "b3"}, 21}, {{"b1", "b4"}, 21}, {{"b2", "b4"}, 22}};
  return z;
}

// 3-star over {a,b,c}, hub h. Every tree lists the hub edge first and then
// its boundary edges alphabetically; all weights 1.
inline TreeCollection three_star() {
  const std::vector<std::string> b{"a", "b", "c"};
  std::vector<Tree> rs, ss;
  for (const auto& root : b)
    for (Orientation o : {Orientation::Receiver, Orientation::Source}) {
      Tree t;
      t.root = root;
      t.orientation = o;
      t.vertices = {root, "h"};
      const bool src = o == Orientation::Source;
      t.edges.push_back(src ? Edge{"1", root, "h", 1.0} : Edge{"1", "h", root, 1.0});
      for (const auto& x : b) {
        if (x == root) continue;
        t.vertices.push_back(x);
        t.edges.push_back(src ? Edge{x, "h", x, 1.0} : Edge{x, x, "h", 1.0});
        t.leaves.push_back(x);
        t.leaf_paths.push_back(src ? std::vector<std::size_t>{0, t.edges.size() - 1}
                                   : std::vector<std::size_t>{t.edges.size() - 1, 0});
      }
      (src ? ss : rs).push_back(std::move(t));
    }
  return TreeCollection::build(b, rs, ss);
}

inline Matrix three_star_a() {
  Matrix a(6, 18);
  a << 0, 0, 0, 1, 1, 0, 0, 0, 0, -1, -1, 0, 0, 0, 0, 0, 0, 0,  //
      0, 0, 0, 0, 0, 0, 1, 1, 0, -1, 0, -1, 0, 0, 0, 0, 0, 0,   //
      1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, -1, -1, 0, 0, 0, 0,   //
      0, 0, 0, 0, 0, 0, 1, 0, 1, 0, 0, 0, -1, 0, -1, 0, 0, 0,   //
      1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, -1, -1, 0,   //
      0, 0, 0, 1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, -1, 0, -1;
  return a;
}

inline Matrix three_star_inverse90() {
  Matrix m(6, 6);
  m << 26, -7, -1, 2, 2, -7,  //
      -7, 26, 2, -7, -1, 2,   //
      -1, 2, 26, -7, -7, 2,   //
      2, -7, -7, 26, 2, -1,   //
      2, -1, -7, 2, 26, -7,   //
      -7, 2, 2, -1, -7, 26;
  return m;
}

inline const double kThreeStarShift[18] = {52, -19, -19, 4, -1, 5, 4, -1, 5, 2, 1, 1, 14, 19, -5, 14, 19, -5};

// small routed network with random edge weights in [lo, hi)
inline PartialNetworkGraph random_graph(std::uint64_t seed, int n, double lo = 0.1, double hi = 5.0) {
  SimConfig sim;
  sim.m = 12;
  sim.d = 3;
  sim.n = n;
  sim.seed = seed;
  const GroundTruth gt = random_network(sim);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> w(gt.physical.edge_count());
  for (auto& x : w) x = u(rng);
  return gt.physical.with_weights(w);
}

// tree collection of a random network, then every tree weight redrawn
// independently (so the collection is generally inconsistent)
inline TreeCollection random_trees(std::uint64_t seed, int n) {
  const TreeCollection t = TreeCollection::from_graph(random_graph(seed, n), true);
  std::mt19937_64 rng(seed + 17);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  Vector w(static_cast<Eigen::Index>(t.edge_count()));
  for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = u(rng);
  return t.with_weights(w);
}

inline Matrix random_rank_matrix(std::mt19937_64& rng, int rows, int cols, int rank) {
  std::normal_distribution<double> g;
  Matrix u(rows, rank), v(rank, cols);
  for (int i = 0; i < u.size(); ++i) u.data()[i] = g(rng);
  for (int i = 0; i < v.size(); ++i) v.data()[i] = g(rng);
  return u * v;
}

// min 1/2 x'Hx + c'x  s.t. Bx = b, x >= 0 by enumerating supports.
// On a support S the problem is an equality-constrained QP solved from its
// KKT system; the best feasible candidate is the optimum (H positive definite).
struct BruteForce {
  Vector x;
  double objective = std::numeric_limits<double>::infinity();
  bool found = false;
};

inline BruteForce brute_force_qp(const QpProblem& p) {
  const int n = static_cast<int>(p.c.size());
  const int m = static_cast<int>(p.b.size());
  BruteForce best;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    std::vector<int> s;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) s.push_back(i);
    const int k = static_cast<int>(s.size());
    Vector x = Vector::Zero(n);
    if (k > 0 || m > 0) {
      Matrix kkt = Matrix::Zero(k + m, k + m);
      Vector rhs(k + m);
      for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) kkt(i, j) = p.h(s[i], s[j]);
        for (int r = 0; r < m; ++r) kkt(i, k + r) = kkt(k + r, i) = p.b_mat(r, s[i]);
        rhs[i] = -p.c[s[i]];
      }
      for (int r = 0; r < m; ++r) rhs[k + r] = p.b[r];
      const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(kkt);
      const Vector sol = cod.solve(rhs);
      if ((kkt * sol - rhs).norm() > 1e-9 * (1.0 + rhs.norm())) continue;
      for (int i = 0; i < k; ++i) x[s[i]] = sol[i];
    }
    if (x.minCoeff() < -1e-12) continue;
    if (m > 0 && (p.b_mat * x - p.b).norm() > 1e-9) continue;
    const double f = qp_objective(p, x);
    if (f < best.objective) {
      best.objective = f;
      best.x = x;
      best.found = true;
    }
  }
  return best;
}

// random nonnegative least squares min ||Mx - y||^2, optionally with one
// equality row sum(x) = t, written as a QP
inline QpProblem random_nnls(std::mt19937_64& rng, int n, bool with_equality) {
  std::normal_distribution<double> g;
  const int rows = n + 3;
  Matrix mm(rows, n);
  Vector y(rows);
  for (int i = 0; i < mm.size(); ++i) mm.data()[i] = g(rng);
  for (int i = 0; i < rows; ++i) y[i] = g(rng);
  QpProblem p;
  p.h = 2.0 * mm.transpose() * mm;
  p.c = -2.0 * mm.transpose() * y;
  if (with_equality) {
    p.b_mat = Matrix::Ones(1, n);
    p.b = Vector::Constant(1, 1.0 + std::abs(g(rng)));
  } else {
    p.b_mat = Matrix(0, n);
    p.b = Vector(0);
  }
  return p;
}

// Weight-preserving shift that empties a safe edge: with u the non-boundary
// tail, move w_e from every edge leaving u onto every edge entering u (or
// the mirror image at the head). Path weights do not change because a path
// through u uses exactly one edge in and one edge out.
inline std::vector<double> constructive_shift(const PartialNetworkGraph& g, const EdgeId& id) {
  const Edge& e = g.edges()[g.edge_index(id)];
  std::vector<double> w = g.weights();
  const double d = e.weight;
  auto strictly_min = [&](bool out, const VertexId& v) {
    for (const auto& f : g.edges())
      if (f.id != e.id && (out ? f.tail : f.head) == v && !(d < f.weight)) return false;
    return true;
  };
  const bool at_tail = !g.is_boundary(e.tail) && strictly_min(true, e.tail);
  const VertexId v = at_tail ? e.tail : e.head;
  for (std::size_t i = 0; i < g.edge_count(); ++i) {
    const Edge& f = g.edges()[i];
    if (at_tail) {
      if (f.tail == v) w[i] -= d;
      if (f.head == v) w[i] += d;
    } else {
      if (f.head == v) w[i] -= d;
      if (f.tail == v) w[i] += d;
    }
  }
  return w;
}

}  // namespace fx
