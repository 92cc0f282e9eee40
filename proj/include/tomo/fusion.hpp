#pragma once

// Merging a consistent tree collection into one network graph.
//
// For every ordered boundary pair (u, v) the interior vertices of v's path in
// u's source tree are laid out at their distance from u, those of u's path in
// v's receiver tree at (path weight - distance to v). Vertices from the two
// trees that land within tau of each other become one vertex, and a tree
// vertex is the same fused vertex on every chain it appears on. This is the
// vertex-insertion step only; no general identifiability machinery.

#include <map>
#include <string>
#include <vector>

#include "tomo/consistency.hpp"
#include "tomo/netgraph.hpp"

namespace tomo {

/// Shared-subpath weight for pairs of paths leaving (or entering) the same root.
struct PcdKey {
  VertexId root;
  Orientation orientation;
  VertexId leaf1;  ///< leaf1 < leaf2
  VertexId leaf2;
  auto operator<=>(const PcdKey&) const = default;
};

using Pcd = std::map<PcdKey, double>;

Pcd compute_pcd(const TreeCollection& trees);

/// Shared weight of two root-leaf paths of one tree (distance root to meet vertex).
double shared_weight(const Tree& tree, const VertexId& leaf1, const VertexId& leaf2);

struct FusedGraph {
  PartialNetworkGraph graph;
  /// fused vertex -> tree vertices it stands for ("S:<root>/<vertex>", "R:<root>/<vertex>")
  std::map<VertexId, std::vector<std::string>> provenance;
  double tau = 0.0;             ///< tolerance actually used
  double fit_residual = 0.0;    ///< ||A w - tree path weights|| after the final fit
  std::size_t loops_cut = 0;
};

/// Throws NotConsistent when some pair's source and receiver path weights
/// differ by more than tau, NegativeGap when positions along a tree path
/// decrease.
FusedGraph fuse_network(const TreeCollection& trees, double tau);

}  // namespace tomo
