#pragma once

// Edge pruning: contract low-weight edges and redistribute their weight over
// the surviving edges so that end-to-end path weights are preserved.

#include <map>
#include <span>
#include <string>
#include <vector>

#include "tomo/consistency.hpp"
#include "tomo/linsolve.hpp"
#include "tomo/netgraph.hpp"

namespace tomo {

struct PrunedEdge {
  EdgeId id;
  double weight = 0.0;
};

struct PruneResult {
  PartialNetworkGraph graph;  ///< contracted graph carrying the redistributed weights
  Vector weights;             ///< redistributed weights, graph edge order
  double residual = 0.0;      ///< ||A~ w~ - A w||
  std::vector<PrunedEdge> pruned;
  std::map<VertexId, VertexId> merged;  ///< every original vertex -> its surviving representative
  std::map<EdgeId, EdgeId> edge_map;    ///< every surviving original edge -> edge of the pruned graph
  std::vector<EdgeId> zeroed;           ///< edges set to zero by the positivity pass
};

struct PruneOptions {
  PositivityMethod positivity = PositivityMethod::None;
  QpOptions qp;
};

/// Contracts `prune_set` and solves w~ = w_E~ + A~'(A w - A~ w_E~).
/// Surviving edges that become parallel are merged (starting weight = mean)
/// and loops closed by the contraction are cut out of the affected paths.
/// Throws PathVanishes when a path loses all its edges and InvalidArgument
/// when two boundary vertices would merge. A boundary vertex may end up inside
/// a path of the result (the heuristics below never choose such sets).
PruneResult redistribute_after_prune(const PartialNetworkGraph& graph, const std::vector<EdgeId>& prune_set,
                                     const PruneOptions& opts = {});

/// Single-edge criterion under which contraction keeps the path system
/// consistent. False when contracting the edge would create a loop or a
/// parallel pair, or when some path not using it passes both its endpoints.
bool is_safe_prune(const PartialNetworkGraph& graph, const EdgeId& edge);

/// Increasing distinct ratios w/w_max that are <= delta_max (negative ratios count as 0).
std::vector<double> pruning_discontinuities(std::span<const double> weights, double delta_max);

/// Which gaps the widest-gap search looks at. Interior: only gaps between two
/// discontinuities (fewer than two gives 0). ClosedByMax: delta_max also
/// closes the last gap.
enum class GapRule { Interior, ClosedByMax };

/// Pruning factor at the left end of the widest gap between consecutive
/// discontinuities; ties go to the smaller one. 0 when nothing qualifies.
/// Throws NoEdges.
double select_pruning_factor(std::span<const double> weights, double delta_max = 0.2,
                             GapRule rule = GapRule::Interior);
double select_pruning_factor(const PartialNetworkGraph& graph, double delta_max = 0.2,
                             GapRule rule = GapRule::Interior);

/// Edges with w / w_max <= delta, ascending by (weight, id).
std::vector<EdgeId> edges_below_factor(const PartialNetworkGraph& graph, double delta);

/// Greedy subset of `candidates` (taken in order) whose joint contraction
/// leaves every path nonempty, keeps boundary vertices distinct and off path
/// interiors.
std::vector<EdgeId> admissible_prune_set(const PartialNetworkGraph& graph, const std::vector<EdgeId>& candidates);

/// Prunes every admissible edge with w / w_max <= delta.
PruneResult prune_by_factor(const PartialNetworkGraph& graph, double delta, const PruneOptions& opts = {});

/// Prunes the largest run of smallest-weight edges whose squared weights sum to
/// at most `budget` (ties by edge id; inadmissible edges are skipped).
PruneResult prune_by_budget(const PartialNetworkGraph& graph, double budget, const PruneOptions& opts = {});

struct TreePruneResult {
  Tree tree;
  double residual = 0.0;
  std::vector<PrunedEdge> pruned;
};

/// Tree version of redistribute_after_prune.
TreePruneResult prune_tree(const Tree& tree, const std::vector<EdgeId>& prune_set, const PruneOptions& opts = {});

struct CollectionPruneResult {
  TreeCollection trees;
  std::vector<std::string> pruned;  ///< edge labels as in TreeCollection::edge_labels
  double residual = 0.0;            ///< largest per-tree residual
};

/// Budget heuristic over a whole collection (budget is normally ||A w||^2 / 2
/// from intrinsic_adjust).
CollectionPruneResult prune_trees_by_budget(const TreeCollection& trees, double budget, const PruneOptions& opts = {});

}  // namespace tomo
