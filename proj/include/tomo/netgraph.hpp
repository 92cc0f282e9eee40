#pragma once

// Partial network graphs: a directed weighted graph, a set of boundary
// vertices and at most one directed path per ordered boundary pair.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace tomo {

using VertexId = std::string;
using EdgeId = std::string;

struct Edge {
  EdgeId id;
  VertexId tail;
  VertexId head;
  double weight = 0.0;
};

/// Path as supplied by callers: endpoints plus edge ids in travel order.
struct PathSpec {
  VertexId source;
  VertexId receiver;
  std::vector<EdgeId> edges;
};

/// Path as stored by the graph: edge indices into PartialNetworkGraph::edges().
struct Path {
  VertexId source;
  VertexId receiver;
  std::vector<std::size_t> edges;
};

enum class GraphCheck {
  Full,        ///< ids, connectivity, uniqueness, no interior boundaries, path consistency, weights >= 0
  Structural,  ///< ids, connectivity, uniqueness only (intermediate adjusted graphs)
};

class PartialNetworkGraph {
 public:
  PartialNetworkGraph() = default;

  /// Validates and canonicalises the components. Vertices are ordered boundary
  /// first (in boundary order) then interior by id; edges by id; paths by the
  /// boundary rank of (source, receiver).
  static PartialNetworkGraph build(std::vector<VertexId> vertices, std::vector<Edge> edges,
                                   std::vector<VertexId> boundary, std::vector<PathSpec> paths,
                                   GraphCheck check = GraphCheck::Full);

  const std::vector<VertexId>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<VertexId>& boundary() const { return boundary_; }
  const std::vector<Path>& paths() const { return paths_; }

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  std::optional<std::size_t> find_edge(const EdgeId& id) const;
  std::size_t edge_index(const EdgeId& id) const;
  bool has_vertex(const VertexId& id) const { return vertex_index_.contains(id); }
  bool is_boundary(const VertexId& id) const { return boundary_rank_.contains(id); }
  std::size_t boundary_rank(const VertexId& id) const;

  const Path* find_path(const VertexId& source, const VertexId& receiver) const;
  const Path& path(const VertexId& source, const VertexId& receiver) const;

  /// Vertex sequence visited by a path, source first.
  std::vector<VertexId> path_vertices(const Path& path) const;
  double path_weight(const Path& path) const;

  std::vector<double> weights() const;
  PartialNetworkGraph with_weights(std::span<const double> weights) const;
  std::vector<PathSpec> path_specs() const;

 private:
  std::vector<VertexId> vertices_;
  std::vector<Edge> edges_;
  std::vector<VertexId> boundary_;
  std::vector<Path> paths_;
  std::unordered_map<VertexId, std::size_t> vertex_index_;
  std::unordered_map<EdgeId, std::size_t> edge_index_;
  std::unordered_map<VertexId, std::size_t> boundary_rank_;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> path_index_;
};

/// Sum of the edge weights along P_{source,receiver}. Throws UnknownPath.
double path_weight(const PartialNetworkGraph& graph, const VertexId& source, const VertexId& receiver);

enum class Orientation { Source, Receiver };

std::string to_string(Orientation o);
Orientation orientation_from_string(const std::string& s);

/// Rooted directed tree. Source trees point away from the root, receiver trees
/// towards it. Vertex and edge ids are local to the tree.
struct Tree {
  VertexId root;
  Orientation orientation = Orientation::Source;
  std::vector<VertexId> vertices;
  std::vector<Edge> edges;
  std::vector<VertexId> leaves;
  /// Per leaf, indices into `edges` in travel direction (root->leaf for a
  /// source tree, leaf->root for a receiver tree).
  std::vector<std::vector<std::size_t>> leaf_paths;

  std::vector<double> weights() const;
  void set_weights(std::span<const double> w);
  std::size_t leaf_rank(const VertexId& leaf) const;
  const std::vector<std::size_t>& path_to(const VertexId& leaf) const { return leaf_paths[leaf_rank(leaf)]; }
  double path_weight(const VertexId& leaf) const;

  /// Throws NotATree when the edges do not form a rooted tree with the stated
  /// orientation or some edge lies on no root-leaf path.
  void validate() const;
};

/// Source and receiver tree of boundary vertex b (minimal subgraphs supporting
/// {P_{b,v}} and {P_{v,b}}).
std::pair<Tree, Tree> extract_trees(const PartialNetworkGraph& graph, const VertexId& b);

/// Contraction of a graph to its boundary vertices and path branch points.
/// Logical edge ids join the underlying edge ids with '+'.
PartialNetworkGraph logical_subgraph(const PartialNetworkGraph& graph);

/// Tree <-> partial network graph (root and leaves become the boundary).
PartialNetworkGraph tree_as_graph(const Tree& tree, GraphCheck check = GraphCheck::Full);
Tree graph_as_tree(const PartialNetworkGraph& graph, const VertexId& root, Orientation orientation);

/// Same tree with non-branching interior vertices contracted.
Tree logical_tree(const Tree& tree);

}  // namespace tomo
