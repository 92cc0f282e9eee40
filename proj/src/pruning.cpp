#include "tomo/pruning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "tomo/errors.hpp"

namespace tomo {

namespace {

// Union-find over vertex ids; the representative is a boundary vertex when the
// class holds one, otherwise the lexicographically smallest id.
class VertexMerge {
 public:
  explicit VertexMerge(const PartialNetworkGraph& g) : g_(g) {
    for (const auto& v : g.vertices()) parent_[v] = v;
  }

  const VertexId& find(const VertexId& v) {
    VertexId* at = &parent_.at(v);
    if (*at == v) return *at;
    const VertexId root = find(*at);
    *at = root;
    return *at;
  }

  /// False when the union would merge two boundary vertices.
  bool unite(const VertexId& a, const VertexId& b) {
    VertexId ra = find(a), rb = find(b);
    if (ra == rb) return true;
    const bool ba = g_.is_boundary(ra), bb = g_.is_boundary(rb);
    if (ba && bb) return false;
    bool keep_a = ba || (!bb && ra < rb);
    if (keep_a)
      parent_[rb] = ra;
    else
      parent_[ra] = rb;
    return true;
  }

 private:
  const PartialNetworkGraph& g_;
  std::unordered_map<VertexId, VertexId> parent_;
};

struct Contraction {
  std::vector<char> pruned;                    // per original edge, explicit or implied
  std::vector<std::vector<std::size_t>> paths;  // surviving original edges per path, loops cut
};

enum class ContractionFailure { None, BoundaryMerge, PathVanishes, BoundaryInterior };

// Maps every path onto the contracted graph. Edges whose endpoints merged are
// dropped; if a path returns to a vertex it already visited, the loop is cut.
ContractionFailure contract(const PartialNetworkGraph& g, const std::vector<char>& explicit_prune, Contraction& out,
                            std::string* detail = nullptr, bool allow_interior_boundary = false) {
  VertexMerge uf(g);
  const auto& edges = g.edges();
  for (const auto& p : g.paths()) {
    if (std::all_of(p.edges.begin(), p.edges.end(), [&](std::size_t e) { return explicit_prune[e] != 0; })) {
      if (detail) *detail = "path " + p.source + ">" + p.receiver + " vanishes";
      return ContractionFailure::PathVanishes;
    }
  }
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (!explicit_prune[e]) continue;
    if (!uf.unite(edges[e].tail, edges[e].head)) {
      if (detail) *detail = "edge " + edges[e].id + " joins two boundary vertices";
      return ContractionFailure::BoundaryMerge;
    }
  }
  out.pruned = explicit_prune;
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (uf.find(edges[e].tail) == uf.find(edges[e].head)) out.pruned[e] = 1;

  out.paths.clear();
  for (const auto& p : g.paths()) {
    std::vector<std::size_t> kept;
    std::vector<VertexId> visited{uf.find(p.source)};
    for (auto e : p.edges) {
      if (out.pruned[e]) continue;
      const VertexId h = uf.find(edges[e].head);
      auto it = std::find(visited.begin(), visited.end(), h);
      if (it != visited.end()) {
        const auto keep = static_cast<std::size_t>(it - visited.begin());
        visited.resize(keep + 1);
        kept.resize(keep);
        continue;
      }
      visited.push_back(h);
      kept.push_back(e);
    }
    if (kept.empty()) {
      if (detail) *detail = "path " + p.source + ">" + p.receiver + " vanishes";
      return ContractionFailure::PathVanishes;
    }
    for (std::size_t k = 1; k + 1 < visited.size() && !allow_interior_boundary; ++k) {
      if (g.is_boundary(visited[k])) {
        if (detail) *detail = "boundary vertex " + visited[k] + " becomes interior to " + p.source + ">" + p.receiver;
        return ContractionFailure::BoundaryInterior;
      }
    }
    out.paths.push_back(std::move(kept));
  }
  return ContractionFailure::None;
}

std::vector<char> flags_for(const PartialNetworkGraph& g, const std::vector<EdgeId>& ids) {
  std::vector<char> f(g.edge_count(), 0);
  for (const auto& id : ids) f[g.edge_index(id)] = 1;
  return f;
}

}  // namespace

PruneResult redistribute_after_prune(const PartialNetworkGraph& graph, const std::vector<EdgeId>& prune_set,
                                     const PruneOptions& opts) {
  const auto& edges = graph.edges();
  const std::vector<char> explicit_prune = flags_for(graph, prune_set);

  Contraction c;
  std::string detail;
  switch (contract(graph, explicit_prune, c, &detail, true)) {
    case ContractionFailure::None: break;
    case ContractionFailure::BoundaryMerge: throw TomoError(ErrorKind::InvalidArgument, detail);
    case ContractionFailure::PathVanishes: throw TomoError(ErrorKind::PathVanishes, detail);
    case ContractionFailure::BoundaryInterior: throw TomoError(ErrorKind::BoundaryInterior, detail);
  }

  VertexMerge uf(graph);
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (explicit_prune[e]) uf.unite(edges[e].tail, edges[e].head);

  PruneResult out;
  for (const auto& v : graph.vertices()) out.merged[v] = uf.find(v);
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (c.pruned[e]) out.pruned.push_back({edges[e].id, edges[e].weight});

  // surviving edges, parallel ones grouped under the smallest id
  std::map<std::pair<VertexId, VertexId>, std::vector<std::size_t>> groups;
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (!c.pruned[e]) groups[{uf.find(edges[e].tail), uf.find(edges[e].head)}].push_back(e);
  std::vector<Edge> new_edges;
  std::set<VertexId> verts(graph.boundary().begin(), graph.boundary().end());
  for (const auto& [ends, members] : groups) {
    Edge ne;
    ne.id = edges[members.front()].id;
    ne.tail = ends.first;
    ne.head = ends.second;
    for (auto m : members) ne.weight += edges[m].weight;
    ne.weight /= static_cast<double>(members.size());
    for (auto m : members) out.edge_map[edges[m].id] = ne.id;
    verts.insert(ends.first);
    verts.insert(ends.second);
    new_edges.push_back(std::move(ne));
  }

  std::vector<PathSpec> new_paths;
  for (std::size_t p = 0; p < graph.paths().size(); ++p) {
    PathSpec s{graph.paths()[p].source, graph.paths()[p].receiver, {}};
    for (auto e : c.paths[p]) s.edges.push_back(out.edge_map.at(edges[e].id));
    new_paths.push_back(std::move(s));
  }
  PartialNetworkGraph reduced = PartialNetworkGraph::build({verts.begin(), verts.end()}, std::move(new_edges),
                                                           graph.boundary(), std::move(new_paths), GraphCheck::Structural);

  const Vector original_paths = incidence_matrix(graph).a * Eigen::Map<const Vector>(graph.weights().data(), static_cast<Eigen::Index>(graph.edge_count()));
  const std::vector<double> start_v = reduced.weights();
  const Vector start = Eigen::Map<const Vector>(start_v.data(), static_cast<Eigen::Index>(start_v.size()));
  const Matrix a_red = incidence_matrix(reduced).a;

  PositivityResult pos = enforce_positivity(a_red, start, original_paths,
                                            opts.positivity == PositivityMethod::Barrier ? PositivityMethod::None
                                                                                         : opts.positivity);
  if (opts.positivity == PositivityMethod::Barrier && (pos.weights.array() < 0.0).any())
    pos = enforce_positivity(a_red, start, original_paths, PositivityMethod::Barrier, opts.qp);
  out.weights = pos.weights;
  for (auto z : pos.zeroed) out.zeroed.push_back(reduced.edges()[z].id);
  out.residual = (a_red * out.weights - original_paths).norm();
  std::vector<double> wv(out.weights.data(), out.weights.data() + out.weights.size());
  out.graph = reduced.with_weights(wv);
  return out;
}

bool is_safe_prune(const PartialNetworkGraph& graph, const EdgeId& edge) {
  const auto& edges = graph.edges();
  const Edge& e = edges[graph.edge_index(edge)];
  auto strictly_smallest = [&](bool by_tail) {
    const VertexId& at = by_tail ? e.tail : e.head;
    if (graph.is_boundary(at)) return false;
    for (const auto& f : edges) {
      if (f.id == e.id) continue;
      if ((by_tail ? f.tail : f.head) == at && !(e.weight < f.weight)) return false;
    }
    return true;
  };
  // the contraction must leave a simple graph: no edge may turn into a loop
  // or land on top of another one
  auto image = [&](const VertexId& v) { return v == e.head ? e.tail : v; };
  std::set<std::pair<VertexId, VertexId>> seen;
  for (const auto& f : edges) {
    if (f.id == e.id) continue;
    const auto ends = std::make_pair(image(f.tail), image(f.head));
    if (ends.first == ends.second || !seen.insert(ends).second) return false;
  }
  // nor may a path that meets both endpoints elsewhere start to revisit one
  const std::size_t idx = graph.edge_index(edge);
  for (const auto& p : graph.paths()) {
    if (std::find(p.edges.begin(), p.edges.end(), idx) != p.edges.end()) continue;
    const auto vs = graph.path_vertices(p);
    if (std::find(vs.begin(), vs.end(), e.tail) != vs.end() && std::find(vs.begin(), vs.end(), e.head) != vs.end())
      return false;
  }
  return strictly_smallest(true) || strictly_smallest(false);
}

std::vector<double> pruning_discontinuities(std::span<const double> weights, double delta_max) {
  if (weights.empty()) throw TomoError(ErrorKind::NoEdges, "no edges to prune");
  if (!(delta_max > 0.0 && delta_max <= 1.0)) throw TomoError(ErrorKind::InvalidArgument, "delta_max must lie in (0, 1]");
  const double wmax = *std::max_element(weights.begin(), weights.end());
  if (!(wmax > 0.0)) return {};
  std::vector<double> r;
  for (double w : weights) {
    const double ratio = std::max(0.0, w / wmax);
    if (ratio <= delta_max) r.push_back(ratio);
  }
  std::sort(r.begin(), r.end());
  std::vector<double> out;
  for (double x : r)
    if (out.empty() || x - out.back() > 1e-12) out.push_back(x);
  return out;
}

double select_pruning_factor(std::span<const double> weights, double delta_max, GapRule rule) {
  const auto d = pruning_discontinuities(weights, delta_max);
  const bool closed = rule == GapRule::ClosedByMax;
  if (d.empty() || (!closed && d.size() < 2)) return 0.0;
  const std::size_t last = closed ? d.size() : d.size() - 1;
  std::size_t best = 0;
  double best_gap = -1.0;
  for (std::size_t k = 0; k < last; ++k) {
    const double next = k + 1 < d.size() ? d[k + 1] : delta_max;
    const double gap = next - d[k];
    if (gap > best_gap) {
      best_gap = gap;
      best = k;
    }
  }
  return d[best];
}

double select_pruning_factor(const PartialNetworkGraph& graph, double delta_max, GapRule rule) {
  const auto w = graph.weights();
  return select_pruning_factor(std::span<const double>(w), delta_max, rule);
}

std::vector<EdgeId> edges_below_factor(const PartialNetworkGraph& graph, double delta) {
  const auto& edges = graph.edges();
  if (edges.empty()) return {};
  double wmax = 0.0;
  for (const auto& e : edges) wmax = std::max(wmax, e.weight);
  std::vector<const Edge*> sel;
  for (const auto& e : edges) {
    const double ratio = wmax > 0.0 ? std::max(0.0, e.weight / wmax) : 0.0;
    if (ratio <= delta || e.weight < 0.0) sel.push_back(&e);
  }
  std::sort(sel.begin(), sel.end(), [](const Edge* a, const Edge* b) {
    return a->weight != b->weight ? a->weight < b->weight : a->id < b->id;
  });
  std::vector<EdgeId> out;
  for (const Edge* e : sel) out.push_back(e->id);
  return out;
}

std::vector<EdgeId> admissible_prune_set(const PartialNetworkGraph& graph, const std::vector<EdgeId>& candidates) {
  std::vector<char> flags(graph.edge_count(), 0);
  std::vector<EdgeId> out;
  Contraction scratch;
  for (const auto& id : candidates) {
    const std::size_t e = graph.edge_index(id);
    if (flags[e]) continue;
    flags[e] = 1;
    if (contract(graph, flags, scratch) == ContractionFailure::None)
      out.push_back(id);
    else
      flags[e] = 0;
  }
  return out;
}

PruneResult prune_by_factor(const PartialNetworkGraph& graph, double delta, const PruneOptions& opts) {
  return redistribute_after_prune(graph, admissible_prune_set(graph, edges_below_factor(graph, delta)), opts);
}

PruneResult prune_by_budget(const PartialNetworkGraph& graph, double budget, const PruneOptions& opts) {
  if (!(budget >= 0.0)) throw TomoError(ErrorKind::InvalidArgument, "budget must be >= 0");
  std::vector<const Edge*> order;
  for (const auto& e : graph.edges()) order.push_back(&e);
  std::sort(order.begin(), order.end(), [](const Edge* a, const Edge* b) {
    return a->weight != b->weight ? a->weight < b->weight : a->id < b->id;
  });
  std::vector<char> flags(graph.edge_count(), 0);
  std::vector<EdgeId> chosen;
  Contraction scratch;
  double spent = 0.0;
  for (const Edge* e : order) {
    const double cost = e->weight * e->weight;
    if (spent + cost > budget) break;
    const std::size_t idx = graph.edge_index(e->id);
    flags[idx] = 1;
    if (contract(graph, flags, scratch) != ContractionFailure::None) {
      flags[idx] = 0;
      continue;
    }
    spent += cost;
    chosen.push_back(e->id);
  }
  return redistribute_after_prune(graph, chosen, opts);
}

TreePruneResult prune_tree(const Tree& tree, const std::vector<EdgeId>& prune_set, const PruneOptions& opts) {
  TreePruneResult out;
  if (prune_set.empty()) {
    out.tree = tree;
    return out;
  }
  const PartialNetworkGraph g = tree_as_graph(tree, GraphCheck::Structural);
  PruneResult r = redistribute_after_prune(g, prune_set, opts);
  out.tree = graph_as_tree(r.graph, tree.root, tree.orientation);
  out.residual = r.residual;
  out.pruned = std::move(r.pruned);
  return out;
}

CollectionPruneResult prune_trees_by_budget(const TreeCollection& trees, double budget, const PruneOptions& opts) {
  if (!(budget >= 0.0)) throw TomoError(ErrorKind::InvalidArgument, "budget must be >= 0");
  struct Candidate {
    double weight;
    std::string label;
    std::size_t tree;  // 0..n-1 receivers, n..2n-1 sources
    EdgeId id;
  };
  const std::size_t n = trees.size();
  auto tree_at = [&](std::size_t t) -> const Tree& { return t < n ? trees.receiver(t) : trees.source(t - n); };
  const auto labels = trees.edge_labels();

  std::vector<Candidate> cands;
  std::size_t k = 0;
  for (std::size_t t = 0; t < 2 * n; ++t)
    for (const auto& e : tree_at(t).edges) cands.push_back({e.weight, labels[k++], t, e.id});
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    return a.weight != b.weight ? a.weight < b.weight : a.label < b.label;
  });

  std::vector<PartialNetworkGraph> graphs;
  std::vector<std::vector<char>> flags;
  std::vector<std::vector<EdgeId>> chosen(2 * n);
  for (std::size_t t = 0; t < 2 * n; ++t) {
    graphs.push_back(tree_as_graph(tree_at(t), GraphCheck::Structural));
    flags.emplace_back(graphs.back().edge_count(), 0);
  }

  CollectionPruneResult out;
  Contraction scratch;
  double spent = 0.0;
  for (const auto& c : cands) {
    const double cost = c.weight * c.weight;
    if (spent + cost > budget) break;
    const std::size_t idx = graphs[c.tree].edge_index(c.id);
    flags[c.tree][idx] = 1;
    if (contract(graphs[c.tree], flags[c.tree], scratch) != ContractionFailure::None) {
      flags[c.tree][idx] = 0;
      continue;
    }
    spent += cost;
    chosen[c.tree].push_back(c.id);
    out.pruned.push_back(c.label);
  }

  std::vector<Tree> rs, ss;
  for (std::size_t t = 0; t < 2 * n; ++t) {
    TreePruneResult r = prune_tree(tree_at(t), chosen[t], opts);
    out.residual = std::max(out.residual, r.residual);
    (t < n ? rs : ss).push_back(std::move(r.tree));
  }
  out.trees = TreeCollection::build(trees.boundary(), std::move(rs), std::move(ss));
  return out;
}

}  // namespace tomo
