#include "tomo/netgraph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "tomo/errors.hpp"

namespace tomo {

namespace {

std::string pair_name(const VertexId& s, const VertexId& r) { return s + ">" + r; }

// Checks that any two paths visiting u then v do so along identical subpaths.
void check_path_consistency(const PartialNetworkGraph& g) {
  const auto& paths = g.paths();
  std::vector<std::vector<VertexId>> seqs;
  seqs.reserve(paths.size());
  for (const auto& p : paths) seqs.push_back(g.path_vertices(p));

  for (std::size_t i = 0; i < paths.size(); ++i) {
    std::unordered_map<VertexId, std::size_t> pos_i;
    for (std::size_t k = 0; k < seqs[i].size(); ++k) pos_i.emplace(seqs[i][k], k);
    for (std::size_t j = i + 1; j < paths.size(); ++j) {
      // common vertices as (position in i, position in j), in path-i order
      std::vector<std::pair<std::size_t, std::size_t>> common;
      for (std::size_t k = 0; k < seqs[j].size(); ++k) {
        auto it = pos_i.find(seqs[j][k]);
        if (it != pos_i.end()) common.emplace_back(it->second, k);
      }
      std::sort(common.begin(), common.end());
      for (std::size_t a = 0; a < common.size(); ++a) {
        for (std::size_t b = a + 1; b < common.size(); ++b) {
          auto [ia, ja] = common[a];
          auto [ib, jb] = common[b];
          if (ja >= jb) continue;  // opposite order, no constraint
          const auto& ei = paths[i].edges;
          const auto& ej = paths[j].edges;
          bool same = (ib - ia) == (jb - ja) && std::equal(ei.begin() + ia, ei.begin() + ib, ej.begin() + ja);
          if (!same) {
            throw TomoError(ErrorKind::PathInconsistency,
                            "paths " + pair_name(paths[i].source, paths[i].receiver) + " and " +
                                pair_name(paths[j].source, paths[j].receiver) + " differ between " +
                                seqs[i][ia] + " and " + seqs[i][ib]);
          }
        }
      }
    }
  }
}

}  // namespace

std::string to_string(Orientation o) { return o == Orientation::Source ? "source" : "receiver"; }

Orientation orientation_from_string(const std::string& s) {
  if (s == "source" || s == "S") return Orientation::Source;
  if (s == "receiver" || s == "R") return Orientation::Receiver;
  throw TomoError(ErrorKind::InvalidArgument, "unknown orientation '" + s + "'");
}

PartialNetworkGraph PartialNetworkGraph::build(std::vector<VertexId> vertices, std::vector<Edge> edges,
                                               std::vector<VertexId> boundary, std::vector<PathSpec> paths,
                                               GraphCheck check) {
  PartialNetworkGraph g;

  std::unordered_set<VertexId> vset;
  for (auto& v : vertices) {
    if (!vset.insert(v).second) throw TomoError(ErrorKind::InvalidArgument, "duplicate vertex " + v);
  }
  for (std::size_t i = 0; i < boundary.size(); ++i) {
    if (!vset.contains(boundary[i]))
      throw TomoError(ErrorKind::InvalidArgument, "boundary vertex " + boundary[i] + " is not a vertex");
    if (!g.boundary_rank_.emplace(boundary[i], i).second)
      throw TomoError(ErrorKind::InvalidArgument, "duplicate boundary vertex " + boundary[i]);
  }
  g.boundary_ = std::move(boundary);

  std::vector<VertexId> interior;
  for (auto& v : vertices)
    if (!g.boundary_rank_.contains(v)) interior.push_back(std::move(v));
  std::sort(interior.begin(), interior.end());
  g.vertices_ = g.boundary_;
  g.vertices_.insert(g.vertices_.end(), interior.begin(), interior.end());
  for (std::size_t i = 0; i < g.vertices_.size(); ++i) g.vertex_index_.emplace(g.vertices_[i], i);

  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = edges[i];
    if (!g.edge_index_.emplace(e.id, i).second) throw TomoError(ErrorKind::InvalidArgument, "duplicate edge " + e.id);
    if (!vset.contains(e.tail) || !vset.contains(e.head))
      throw TomoError(ErrorKind::InvalidArgument, "edge " + e.id + " has an unknown endpoint");
    if (e.tail == e.head) throw TomoError(ErrorKind::InvalidArgument, "edge " + e.id + " is a loop");
    if (!std::isfinite(e.weight)) throw TomoError(ErrorKind::NonFinite, "edge " + e.id + " has a non-finite weight");
    if (check == GraphCheck::Full && e.weight < 0.0)
      throw TomoError(ErrorKind::NegativeWeight, "edge " + e.id + " has weight " + std::to_string(e.weight));
  }
  g.edges_ = std::move(edges);

  for (auto& spec : paths) {
    const std::string name = pair_name(spec.source, spec.receiver);
    auto rs = g.boundary_rank_.find(spec.source);
    auto rr = g.boundary_rank_.find(spec.receiver);
    if (rs == g.boundary_rank_.end() || rr == g.boundary_rank_.end())
      throw TomoError(ErrorKind::MalformedPath, "path " + name + " has a non-boundary endpoint");
    if (spec.source == spec.receiver) throw TomoError(ErrorKind::MalformedPath, "path " + name + " is a loop");
    if (spec.edges.empty()) throw TomoError(ErrorKind::MalformedPath, "path " + name + " is empty");

    Path p{spec.source, spec.receiver, {}};
    std::unordered_set<VertexId> seen{spec.source};
    VertexId at = spec.source;
    for (const auto& eid : spec.edges) {
      auto it = g.edge_index_.find(eid);
      if (it == g.edge_index_.end()) throw TomoError(ErrorKind::MalformedPath, "path " + name + " uses unknown edge " + eid);
      const Edge& e = g.edges_[it->second];
      if (e.tail != at) throw TomoError(ErrorKind::MalformedPath, "path " + name + " is disconnected at edge " + eid);
      if (!seen.insert(e.head).second)
        throw TomoError(ErrorKind::MalformedPath, "path " + name + " revisits vertex " + e.head);
      at = e.head;
      p.edges.push_back(it->second);
    }
    if (at != spec.receiver) throw TomoError(ErrorKind::MalformedPath, "path " + name + " does not end at its receiver");

    auto key = std::make_pair(rs->second, rr->second);
    if (g.path_index_.contains(key)) throw TomoError(ErrorKind::DuplicatePath, "second path for " + name);
    g.path_index_.emplace(key, 0);
    g.paths_.push_back(std::move(p));
  }
  std::sort(g.paths_.begin(), g.paths_.end(), [&g](const Path& a, const Path& b) {
    return std::pair(g.boundary_rank_.at(a.source), g.boundary_rank_.at(a.receiver)) <
           std::pair(g.boundary_rank_.at(b.source), g.boundary_rank_.at(b.receiver));
  });
  for (std::size_t i = 0; i < g.paths_.size(); ++i)
    g.path_index_[{g.boundary_rank_.at(g.paths_[i].source), g.boundary_rank_.at(g.paths_[i].receiver)}] = i;

  if (check == GraphCheck::Full) {
    for (const auto& p : g.paths_) {
      auto seq = g.path_vertices(p);
      for (std::size_t k = 1; k + 1 < seq.size(); ++k) {
        if (g.is_boundary(seq[k]))
          throw TomoError(ErrorKind::BoundaryInterior,
                          "boundary vertex " + seq[k] + " is interior to path " + pair_name(p.source, p.receiver));
      }
    }
    check_path_consistency(g);
  }
  return g;
}

std::optional<std::size_t> PartialNetworkGraph::find_edge(const EdgeId& id) const {
  auto it = edge_index_.find(id);
  if (it == edge_index_.end()) return std::nullopt;
  return it->second;
}

std::size_t PartialNetworkGraph::edge_index(const EdgeId& id) const {
  auto it = edge_index_.find(id);
  if (it == edge_index_.end()) throw TomoError(ErrorKind::InvalidArgument, "unknown edge " + id);
  return it->second;
}

std::size_t PartialNetworkGraph::boundary_rank(const VertexId& id) const {
  auto it = boundary_rank_.find(id);
  if (it == boundary_rank_.end()) throw TomoError(ErrorKind::InvalidArgument, id + " is not a boundary vertex");
  return it->second;
}

const Path* PartialNetworkGraph::find_path(const VertexId& source, const VertexId& receiver) const {
  auto rs = boundary_rank_.find(source);
  auto rr = boundary_rank_.find(receiver);
  if (rs == boundary_rank_.end() || rr == boundary_rank_.end()) return nullptr;
  auto it = path_index_.find({rs->second, rr->second});
  return it == path_index_.end() ? nullptr : &paths_[it->second];
}

const Path& PartialNetworkGraph::path(const VertexId& source, const VertexId& receiver) const {
  const Path* p = find_path(source, receiver);
  if (!p) throw TomoError(ErrorKind::UnknownPath, "no path " + pair_name(source, receiver));
  return *p;
}

std::vector<VertexId> PartialNetworkGraph::path_vertices(const Path& path) const {
  std::vector<VertexId> out{path.source};
  for (auto e : path.edges) out.push_back(edges_[e].head);
  return out;
}

double PartialNetworkGraph::path_weight(const Path& path) const {
  double w = 0.0;
  for (auto e : path.edges) w += edges_[e].weight;
  return w;
}

std::vector<double> PartialNetworkGraph::weights() const {
  std::vector<double> w;
  w.reserve(edges_.size());
  for (const auto& e : edges_) w.push_back(e.weight);
  return w;
}

PartialNetworkGraph PartialNetworkGraph::with_weights(std::span<const double> weights) const {
  if (weights.size() != edges_.size())
    throw TomoError(ErrorKind::DimensionMismatch, "weight vector size does not match edge count");
  PartialNetworkGraph g = *this;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!std::isfinite(weights[i])) throw TomoError(ErrorKind::NonFinite, "non-finite weight for " + edges_[i].id);
    g.edges_[i].weight = weights[i];
  }
  return g;
}

std::vector<PathSpec> PartialNetworkGraph::path_specs() const {
  std::vector<PathSpec> out;
  out.reserve(paths_.size());
  for (const auto& p : paths_) {
    PathSpec s{p.source, p.receiver, {}};
    for (auto e : p.edges) s.edges.push_back(edges_[e].id);
    out.push_back(std::move(s));
  }
  return out;
}

double path_weight(const PartialNetworkGraph& graph, const VertexId& source, const VertexId& receiver) {
  return graph.path_weight(graph.path(source, receiver));
}

// ---------------------------------------------------------------------------
// Trees

std::vector<double> Tree::weights() const {
  std::vector<double> w;
  w.reserve(edges.size());
  for (const auto& e : edges) w.push_back(e.weight);
  return w;
}

void Tree::set_weights(std::span<const double> w) {
  if (w.size() != edges.size()) throw TomoError(ErrorKind::DimensionMismatch, "tree weight vector size mismatch");
  for (std::size_t i = 0; i < w.size(); ++i) edges[i].weight = w[i];
}

std::size_t Tree::leaf_rank(const VertexId& leaf) const {
  auto it = std::find(leaves.begin(), leaves.end(), leaf);
  if (it == leaves.end()) throw TomoError(ErrorKind::UnknownPath, leaf + " is not a leaf of the tree at " + root);
  return static_cast<std::size_t>(it - leaves.begin());
}

double Tree::path_weight(const VertexId& leaf) const {
  double w = 0.0;
  for (auto e : path_to(leaf)) w += edges[e].weight;
  return w;
}

void Tree::validate() const {
  const bool src = orientation == Orientation::Source;
  auto fail = [&](const std::string& why) { throw TomoError(ErrorKind::NotATree, "tree at " + root + ": " + why); };

  std::unordered_set<VertexId> vset(vertices.begin(), vertices.end());
  if (vset.size() != vertices.size()) fail("duplicate vertex");
  if (!vset.contains(root)) fail("root is not a vertex");
  if (leaf_paths.size() != leaves.size()) fail("leaf path count mismatch");

  // parent link: the unique edge towards the root
  std::unordered_map<VertexId, std::size_t> parent_edge;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = edges[i];
    if (!vset.contains(e.tail) || !vset.contains(e.head)) fail("edge " + e.id + " has an unknown endpoint");
    const VertexId& child = src ? e.head : e.tail;
    if (child == root) fail("edge " + e.id + " points the wrong way at the root");
    if (!parent_edge.emplace(child, i).second) fail("vertex " + child + " has two parents");
  }
  for (const auto& v : vertices) {
    if (v == root) continue;
    if (!parent_edge.contains(v)) fail("vertex " + v + " is detached");
    VertexId at = v;
    for (std::size_t steps = 0; at != root; ++steps) {
      if (steps > vertices.size()) fail("cycle through " + v);
      auto it = parent_edge.find(at);
      if (it == parent_edge.end()) fail("vertex " + at + " is detached");
      const Edge& e = edges[it->second];
      at = src ? e.tail : e.head;
    }
  }

  std::vector<char> used(edges.size(), 0);
  std::unordered_set<VertexId> leafset;
  for (std::size_t l = 0; l < leaves.size(); ++l) {
    if (leaves[l] == root || !vset.contains(leaves[l]) || !leafset.insert(leaves[l]).second) fail("bad leaf " + leaves[l]);
    VertexId at = src ? root : leaves[l];
    const VertexId end = src ? leaves[l] : root;
    for (auto ei : leaf_paths[l]) {
      if (ei >= edges.size()) fail("leaf path index out of range");
      if (edges[ei].tail != at) fail("path to " + leaves[l] + " is disconnected");
      at = edges[ei].head;
      used[ei] = 1;
    }
    if (at != end || leaf_paths[l].empty()) fail("path to " + leaves[l] + " does not reach its end");
  }
  for (std::size_t i = 0; i < edges.size(); ++i)
    if (!used[i]) fail("edge " + edges[i].id + " lies on no root-leaf path");
}

Tree graph_as_tree(const PartialNetworkGraph& graph, const VertexId& root, Orientation orientation) {
  const bool src = orientation == Orientation::Source;
  Tree t;
  t.root = root;
  t.orientation = orientation;

  std::vector<const Path*> chosen;
  for (const auto& p : graph.paths())
    if ((src ? p.source : p.receiver) == root) chosen.push_back(&p);

  std::vector<char> in_tree(graph.edge_count(), 0);
  std::set<VertexId> verts{root};
  for (const Path* p : chosen)
    for (auto e : p->edges) {
      in_tree[e] = 1;
      verts.insert(graph.edges()[e].tail);
      verts.insert(graph.edges()[e].head);
    }
  std::vector<std::size_t> local(graph.edge_count(), 0);
  for (std::size_t e = 0; e < graph.edge_count(); ++e) {
    if (!in_tree[e]) continue;
    local[e] = t.edges.size();
    t.edges.push_back(graph.edges()[e]);
  }
  t.vertices.push_back(root);
  for (const auto& v : graph.vertices())
    if (v != root && verts.contains(v)) t.vertices.push_back(v);
  for (const Path* p : chosen) {
    t.leaves.push_back(src ? p->receiver : p->source);
    std::vector<std::size_t> lp;
    for (auto e : p->edges) lp.push_back(local[e]);
    t.leaf_paths.push_back(std::move(lp));
  }
  t.validate();
  return t;
}

std::pair<Tree, Tree> extract_trees(const PartialNetworkGraph& graph, const VertexId& b) {
  if (!graph.is_boundary(b)) throw TomoError(ErrorKind::InvalidArgument, b + " is not a boundary vertex");
  return {graph_as_tree(graph, b, Orientation::Source), graph_as_tree(graph, b, Orientation::Receiver)};
}

PartialNetworkGraph tree_as_graph(const Tree& tree, GraphCheck check) {
  std::vector<VertexId> boundary{tree.root};
  boundary.insert(boundary.end(), tree.leaves.begin(), tree.leaves.end());
  std::vector<PathSpec> paths;
  for (std::size_t l = 0; l < tree.leaves.size(); ++l) {
    PathSpec s;
    s.source = tree.orientation == Orientation::Source ? tree.root : tree.leaves[l];
    s.receiver = tree.orientation == Orientation::Source ? tree.leaves[l] : tree.root;
    for (auto e : tree.leaf_paths[l]) s.edges.push_back(tree.edges[e].id);
    paths.push_back(std::move(s));
  }
  return PartialNetworkGraph::build(tree.vertices, tree.edges, boundary, paths, check);
}

PartialNetworkGraph logical_subgraph(const PartialNetworkGraph& graph) {
  const auto& edges = graph.edges();
  // an interior vertex is a branch point when some incoming path edge continues
  // on two different outgoing edges, or the other way round
  std::unordered_map<VertexId, std::map<std::size_t, std::set<std::size_t>>> next_of, prev_of;
  for (const auto& p : graph.paths())
    for (std::size_t k = 0; k + 1 < p.edges.size(); ++k) {
      const VertexId& x = edges[p.edges[k]].head;
      next_of[x][p.edges[k]].insert(p.edges[k + 1]);
      prev_of[x][p.edges[k + 1]].insert(p.edges[k]);
    }
  std::unordered_set<VertexId> branch;
  for (const auto* side : {&next_of, &prev_of})
    for (const auto& [x, m] : *side)
      for (const auto& [e, others] : m)
        if (others.size() > 1) branch.insert(x);
  auto is_logical = [&](const VertexId& v) { return graph.is_boundary(v) || branch.contains(v); };

  // logical edge (u,v) -> underlying subpath
  std::map<std::pair<VertexId, VertexId>, std::vector<std::size_t>> segments;
  std::vector<PathSpec> paths;
  std::set<VertexId> verts(graph.boundary().begin(), graph.boundary().end());
  for (const auto& p : graph.paths()) {
    PathSpec spec{p.source, p.receiver, {}};
    VertexId from = p.source;
    std::vector<std::size_t> run;
    for (auto e : p.edges) {
      run.push_back(e);
      const VertexId& h = edges[e].head;
      if (!is_logical(h)) continue;
      auto key = std::make_pair(from, h);
      auto [it, fresh] = segments.emplace(key, run);
      if (!fresh && it->second != run)
        throw TomoError(ErrorKind::PathInconsistency, "two different subpaths join " + from + " and " + h);
      std::string id;
      for (std::size_t k = 0; k < run.size(); ++k) id += (k ? "+" : "") + edges[run[k]].id;
      spec.edges.push_back(id);
      verts.insert(h);
      from = h;
      run.clear();
    }
    paths.push_back(std::move(spec));
  }
  std::vector<Edge> ledges;
  for (const auto& [key, run] : segments) {
    Edge le;
    for (std::size_t k = 0; k < run.size(); ++k) {
      le.id += (k ? "+" : "") + edges[run[k]].id;
      le.weight += edges[run[k]].weight;
    }
    le.tail = key.first;
    le.head = key.second;
    ledges.push_back(std::move(le));
  }
  return PartialNetworkGraph::build({verts.begin(), verts.end()}, std::move(ledges), graph.boundary(), std::move(paths),
                                    GraphCheck::Structural);
}

Tree logical_tree(const Tree& tree) {
  return graph_as_tree(logical_subgraph(tree_as_graph(tree, GraphCheck::Structural)), tree.root, tree.orientation);
}

}  // namespace tomo
