#pragma once

// Logical-tree reconstruction from end-to-end path series. The covariance of
// two series sharing a root estimates the weight of their shared subpath;
// leaves are merged bottom-up by largest shared weight.

#include <string>
#include <vector>

#include "tomo/kernels.hpp"
#include "tomo/netgraph.hpp"

namespace tomo {

struct PathSeries {
  VertexId root;
  VertexId leaf;
  Orientation orientation = Orientation::Source;
  std::vector<double> values;
  double window_length = 1.0;
};

/// Unbiased sample covariance of two series with a common root.
/// Throws LengthMismatch, TooShort, InvalidArgument (different roots).
double pairwise_shared_metric(const PathSeries& s1, const PathSeries& s2);

struct MergeStep {
  VertexId left;
  VertexId right;
  VertexId parent;
  double metric = 0.0;  ///< raw shared metric of the merged pair
};

struct InferredTree {
  Tree tree;
  bool degenerate = false;  ///< every pairwise metric was <= 0; tree is a star
  std::vector<MergeStep> merges;
};

struct ReconstructOptions {
  double merge_weight = 0.5;   ///< series of {i,j} = a x_i + (1 - a) x_j
  /// Subtracted from each leaf's own variance before it becomes a leaf-edge
  /// weight (per-leaf sampling noise); empty means none.
  std::vector<double> leaf_noise;
  Backend backend = Backend::Parallel;
};

/// Agglomerative reconstruction. Interior vertices are named "<root>:<S|R><k>",
/// an edge is named after its child-side vertex. Ties go to the
/// lexicographically smallest pair of cluster names.
InferredTree reconstruct_tree(const VertexId& root, Orientation orientation, const std::vector<PathSeries>& series,
                              const ReconstructOptions& opts = {});

}  // namespace tomo
