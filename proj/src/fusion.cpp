#include "tomo/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "tomo/errors.hpp"

namespace tomo {

double shared_weight(const Tree& tree, const VertexId& leaf1, const VertexId& leaf2) {
  const auto& p1 = tree.path_to(leaf1);
  const auto& p2 = tree.path_to(leaf2);
  std::set<std::size_t> s2(p2.begin(), p2.end());
  double w = 0.0;
  for (auto e : p1)
    if (s2.contains(e)) w += tree.edges[e].weight;
  return w;
}

Pcd compute_pcd(const TreeCollection& trees) {
  Pcd out;
  for (std::size_t i = 0; i < trees.size(); ++i) {
    for (const Tree* t : {&trees.source(i), &trees.receiver(i)}) {
      std::vector<VertexId> leaves = t->leaves;
      std::sort(leaves.begin(), leaves.end());
      for (std::size_t a = 0; a < leaves.size(); ++a)
        for (std::size_t b = a + 1; b < leaves.size(); ++b)
          out[{t->root, t->orientation, leaves[a], leaves[b]}] = shared_weight(*t, leaves[a], leaves[b]);
    }
  }
  return out;
}

namespace {

// union-find whose classes remember which trees they draw vertices from;
// two vertices of one tree are never identified
class TaggedUnionFind {
 public:
  std::size_t add(int tag) {
    parent_.push_back(parent_.size());
    tags_.emplace_back();
    if (tag >= 0) tags_.back().insert(tag);
    return parent_.size() - 1;
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    for (int t : tags_[b])
      if (tags_[a].contains(t)) return false;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
    tags_[a].insert(tags_[b].begin(), tags_[b].end());
    tags_[b].clear();
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::set<int>> tags_;
};

struct Item {
  std::size_t node;  // union-find element
  double pos;
};

struct Chain {
  VertexId u, v;
  double total = 0.0;
  std::vector<Item> items;  // interior vertices
};

}  // namespace

FusedGraph fuse_network(const TreeCollection& trees, double tau) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw TomoError(ErrorKind::InvalidArgument, "tau must be finite and >= 0");
  const auto& boundary = trees.boundary();
  const std::size_t nb = boundary.size();
  const auto pairs = trees.pairs();
  const Vector asym = asymmetry_vector(trees);

  double scale = 0.0;
  for (std::size_t i = 0; i < nb; ++i)
    for (const auto& leaf : trees.source(i).leaves) scale = std::max(scale, std::abs(trees.source(i).path_weight(leaf)));
  const double tol = std::max(tau, 1e-12 * std::max(1.0, scale));
  for (Eigen::Index r = 0; r < asym.size(); ++r)
    if (std::abs(asym[r]) > tol)
      throw TomoError(ErrorKind::NotConsistent, "pair " + pairs[r].first + ">" + pairs[r].second + " differs by " +
                                                    std::to_string(std::abs(asym[r])));

  // union-find elements: boundary vertices first, then tree vertices on demand
  TaggedUnionFind uf;
  std::map<std::string, std::size_t> node_of;
  std::vector<std::string> label;
  for (const auto& b : boundary) {
    node_of[b] = uf.add(-1);
    label.push_back(b);
  }
  // tags: source tree i -> i, receiver tree i -> nb + i
  auto tree_node = [&](const Tree& t, int tag, const VertexId& v) {
    if (std::find(boundary.begin(), boundary.end(), v) != boundary.end()) return node_of.at(v);
    const std::string key = std::string(t.orientation == Orientation::Source ? "S:" : "R:") + t.root + "/" + v;
    auto [it, inserted] = node_of.try_emplace(key, 0);
    if (inserted) {
      it->second = uf.add(tag);
      label.push_back(key);
    }
    return it->second;
  };

  std::vector<Chain> chains;
  std::vector<std::vector<std::size_t>> chain_at(nb, std::vector<std::size_t>(nb, 0));
  for (const auto& [u, v] : pairs) {
    const std::size_t iu = trees.boundary_rank(u), iv = trees.boundary_rank(v);
    const Tree& s = trees.source(iu);
    const Tree& r = trees.receiver(iv);
    Chain c{u, v, 0.5 * (s.path_weight(v) + r.path_weight(u)), {}};
    double at = 0.0;
    const auto& sp = s.path_to(v);
    for (std::size_t k = 0; k + 1 < sp.size(); ++k) {
      const Edge& e = s.edges[sp[k]];
      at += e.weight;
      if (e.weight < -tol) throw TomoError(ErrorKind::NegativeGap, "negative edge " + e.id + " in source tree of " + u);
      c.items.push_back({tree_node(s, static_cast<int>(iu), e.head), at});
    }
    const auto& rp = r.path_to(u);
    double remaining = r.path_weight(u);
    for (std::size_t k = 0; k + 1 < rp.size(); ++k) {
      const Edge& e = r.edges[rp[k]];
      remaining -= e.weight;
      if (e.weight < -tol) throw TomoError(ErrorKind::NegativeGap, "negative edge " + e.id + " in receiver tree of " + v);
      c.items.push_back({tree_node(r, static_cast<int>(nb + iv), e.head), c.total - remaining});
    }
    chain_at[iu][iv] = chains.size();
    chains.push_back(std::move(c));
  }

  // shared prefix of u->v and u->v2 in u's source tree, shared suffix of
  // u->v and u2->v in v's receiver tree
  auto idx = [nb](std::size_t a, std::size_t b, std::size_t c) { return (a * nb + b) * nb + c; };
  std::vector<double> prefix(nb * nb * nb, -1.0), suffix(nb * nb * nb, -1.0);
  for (std::size_t a = 0; a < nb; ++a)
    for (std::size_t b = 0; b < nb; ++b)
      for (std::size_t c = 0; c < nb; ++c) {
        if (a == b || a == c || b == c) continue;
        prefix[idx(a, b, c)] = shared_weight(trees.source(a), boundary[b], boundary[c]);
        suffix[idx(a, b, c)] = shared_weight(trees.receiver(a), boundary[b], boundary[c]);
      }

  auto on_chain = [&](const Chain& c, std::size_t node) {
    const std::size_t root = uf.find(node);
    return std::any_of(c.items.begin(), c.items.end(), [&](const Item& it) { return uf.find(it.node) == root; });
  };

  // Vertices closer than tol on one chain are identified (nearest first).
  // A vertex inside the common prefix (suffix) of two paths from (to) the same
  // boundary vertex lies on both; copy it across until nothing changes.
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& c : chains) {
      struct Cand {
        double dist;
        std::size_t a, b;
      };
      std::vector<Cand> cands;
      for (std::size_t a = 0; a < c.items.size(); ++a)
        for (std::size_t b = a + 1; b < c.items.size(); ++b) {
          const double d = std::abs(c.items[a].pos - c.items[b].pos);
          if (d <= tol) cands.push_back({d, a, b});
        }
      std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
        return std::tie(x.dist, x.a, x.b) < std::tie(y.dist, y.a, y.b);
      });
      for (const auto& cd : cands) changed |= uf.unite(c.items[cd.a].node, c.items[cd.b].node);
    }
    for (std::size_t ci = 0; ci < chains.size(); ++ci) {
      const std::size_t iu = trees.boundary_rank(chains[ci].u), iv = trees.boundary_rank(chains[ci].v);
      const std::vector<Item> snapshot = chains[ci].items;
      const double total = chains[ci].total;
      for (const Item& it : snapshot) {
        for (std::size_t k = 0; k < nb; ++k) {
          if (k == iu || k == iv) continue;
          if (it.pos <= prefix[idx(iu, iv, k)] + tol) {
            Chain& other = chains[chain_at[iu][k]];
            if (!on_chain(other, it.node)) {
              other.items.push_back({it.node, it.pos});
              changed = true;
            }
          }
          if (total - it.pos <= suffix[idx(iv, iu, k)] + tol) {
            Chain& other = chains[chain_at[k][iv]];
            if (!on_chain(other, it.node)) {
              other.items.push_back({it.node, other.total - (total - it.pos)});
              changed = true;
            }
          }
        }
      }
    }
  }

  // fused vertex names: boundary ids, then f1, f2, ... in order of first use
  FusedGraph out;
  out.tau = tol;
  std::map<std::size_t, VertexId> name_of;
  for (const auto& b : boundary) name_of[uf.find(node_of.at(b))] = b;
  int next = 1;
  auto fused_name = [&](std::size_t node) -> const VertexId& {
    auto [it, inserted] = name_of.try_emplace(uf.find(node));
    if (inserted) it->second = "f" + std::to_string(next++);
    return it->second;
  };

  std::map<std::pair<VertexId, VertexId>, std::vector<double>> samples;
  std::vector<std::pair<BoundaryPair, std::vector<std::pair<VertexId, VertexId>>>> routes;
  for (auto& c : chains) {
    std::stable_sort(c.items.begin(), c.items.end(), [](const Item& a, const Item& b) { return a.pos < b.pos; });
    // collapse identified neighbours into one stop at their mean position
    std::vector<std::pair<VertexId, double>> stops{{c.u, 0.0}};
    std::vector<int> count{1};
    for (const auto& it : c.items) {
      const VertexId& name = fused_name(it.node);
      if (stops.back().first == name) {
        auto& s = stops.back();
        s.second = (s.second * count.back() + it.pos) / (count.back() + 1);
        ++count.back();
        continue;
      }
      stops.emplace_back(name, it.pos);
      count.push_back(1);
    }
    stops.emplace_back(c.v, c.total);
    // cut loops: a vertex met again discards the detour in between
    std::vector<std::pair<VertexId, double>> simple;
    for (const auto& s : stops) {
      auto f = std::find_if(simple.begin(), simple.end(), [&](const auto& x) { return x.first == s.first; });
      if (f != simple.end()) {
        simple.erase(f + 1, simple.end());
        ++out.loops_cut;
        continue;
      }
      simple.push_back(s);
    }
    std::vector<std::pair<VertexId, VertexId>> hops;
    for (std::size_t k = 0; k + 1 < simple.size(); ++k) {
      hops.emplace_back(simple[k].first, simple[k + 1].first);
      samples[hops.back()].push_back(simple[k + 1].second - simple[k].second);
    }
    routes.push_back({{c.u, c.v}, std::move(hops)});
  }

  std::vector<Edge> edges;
  std::set<VertexId> verts(boundary.begin(), boundary.end());
  std::map<std::pair<VertexId, VertexId>, EdgeId> edge_id;
  for (const auto& [ends, w] : samples) {
    const double mean = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());
    const EdgeId id = ends.first + ">" + ends.second;
    edge_id[ends] = id;
    edges.push_back({id, ends.first, ends.second, mean});
    verts.insert(ends.first);
    verts.insert(ends.second);
  }
  std::vector<PathSpec> specs;
  TargetWeights targets;
  for (std::size_t p = 0; p < routes.size(); ++p) {
    PathSpec s{routes[p].first.first, routes[p].first.second, {}};
    for (const auto& h : routes[p].second) s.edges.push_back(edge_id.at(h));
    specs.push_back(std::move(s));
    targets.values[routes[p].first] = std::max(0.0, chains[p].total);
  }
  const PartialNetworkGraph raw = PartialNetworkGraph::build({verts.begin(), verts.end()}, std::move(edges), boundary,
                                                             std::move(specs), GraphCheck::Structural);
  const ConsistencyResult fit = extrinsic_adjust(raw, targets);
  std::vector<double> w(fit.weights.data(), fit.weights.data() + fit.weights.size());
  out.graph = raw.with_weights(w);
  out.fit_residual = fit.residual;

  for (std::size_t node = 0; node < label.size(); ++node) {
    auto it = name_of.find(uf.find(node));
    if (it == name_of.end()) continue;
    if (node < nb) continue;
    out.provenance[it->second].push_back(label[node]);
  }
  for (const auto& b : boundary) out.provenance[b].push_back(b);
  return out;
}

}  // namespace tomo
