#pragma once

// Least-squares restoration of consistent edge weights.
//
// Extrinsic: edge weights of one graph are moved as little as possible (in l2)
// so that path sums hit a set of target path weights.
// Intrinsic: weights of a collection of source/receiver trees are moved as
// little as possible so that every ordered boundary pair has the same path
// weight in the source tree of its origin and the receiver tree of its
// destination.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tomo/linsolve.hpp"
#include "tomo/netgraph.hpp"

namespace tomo {

using BoundaryPair = std::pair<VertexId, VertexId>;

struct IncidenceSystem {
  Matrix a;                         ///< a(p, e) = 1 iff edge e lies on path p
  std::vector<BoundaryPair> rows;   ///< graph path order
  std::vector<EdgeId> cols;         ///< graph edge order
};

IncidenceSystem incidence_matrix(const PartialNetworkGraph& graph);

/// Target path weights on a subset of the graph's paths. Paths without an
/// explicit target keep their current weight.
struct TargetWeights {
  std::map<BoundaryPair, double> values;
};

/// Targets over every path of the graph, in path order.
Vector filled_targets(const PartialNetworkGraph& graph, const TargetWeights& targets);

struct ConsistencyResult {
  Vector original;
  Vector weights;
  double residual = 0.0;          ///< ||A w_adj - target||
  double adjustment_norm = 0.0;   ///< ||w_adj - w||
  std::optional<double> error_bound;  ///< ||A w||^2 / 2 (intrinsic only)
  std::vector<std::pair<std::size_t, double>> negative_entries;
  std::vector<std::string> labels;    ///< one per weight
};

/// w_adj = w + A'(z - A w). Inconsistent targets give the l2 best fit and a
/// nonzero residual.
ConsistencyResult extrinsic_adjust(const PartialNetworkGraph& graph, const TargetWeights& targets);

/// Source and receiver tree for every boundary vertex. Trees share no edges or
/// interior vertices; the global edge order is receiver trees (boundary order)
/// followed by source trees, each in tree-local edge order.
class TreeCollection {
 public:
  TreeCollection() = default;
  static TreeCollection build(std::vector<VertexId> boundary, std::vector<Tree> receivers, std::vector<Tree> sources);
  /// Trees extracted from a graph, with non-branching vertices contracted when `logical`.
  static TreeCollection from_graph(const PartialNetworkGraph& graph, bool logical = true);

  const std::vector<VertexId>& boundary() const { return boundary_; }
  const Tree& receiver(std::size_t i) const { return receivers_[i]; }
  const Tree& source(std::size_t i) const { return sources_[i]; }
  std::size_t size() const { return boundary_.size(); }
  std::size_t boundary_rank(const VertexId& v) const;

  std::size_t edge_count() const;
  std::size_t receiver_offset(std::size_t i) const { return offsets_[i]; }
  std::size_t source_offset(std::size_t i) const { return offsets_[size() + i]; }

  /// Ordered pairs of distinct boundary vertices, lexicographic in boundary order.
  std::vector<BoundaryPair> pairs() const;
  std::vector<std::string> edge_labels() const;

  Vector weights() const;
  TreeCollection with_weights(const Vector& w) const;

 private:
  void index();

  std::vector<VertexId> boundary_;
  std::vector<Tree> receivers_;
  std::vector<Tree> sources_;
  std::vector<std::size_t> offsets_;
};

/// Row (v,u): +1 on the edges of v->u in the receiver tree of u, -1 on the
/// edges of v->u in the source tree of v.
Matrix signed_incidence(const TreeCollection& trees);

/// A w: receiver-tree minus source-tree weight for every ordered pair.
Vector asymmetry_vector(const TreeCollection& trees);

/// w_adj = w - A'(AA')^-1 A w with the bound ||w_adj - w||^2 <= ||A w||^2 / 2.
/// Throws SingularSystem if AA' is numerically singular.
ConsistencyResult intrinsic_adjust(const TreeCollection& trees);

enum class PositivityMethod { None, Naive, Barrier };

std::string to_string(PositivityMethod m);
PositivityMethod positivity_from_string(const std::string& s);

struct PositivityResult {
  Vector weights;
  std::vector<std::size_t> zeroed;  ///< columns fixed at zero (naive)
  int iterations = 0;
  double residual = 0.0;            ///< ||A w_pos - target||
};

/// Nonnegative weights close to w with A w_pos = target.
///   Naive: solve, fix negative entries at zero, re-solve on the rest, repeat.
///   Barrier: min ||x - w||^2 s.t. Ax = target, x >= 0 by the barrier QP solver
///            (targets outside range(A) are first projected onto it).
PositivityResult enforce_positivity(const Matrix& a, const Vector& w, const Vector& target, PositivityMethod method,
                                    const QpOptions& qp = {});

}  // namespace tomo
