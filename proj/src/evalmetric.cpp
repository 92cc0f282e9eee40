#include "tomo/evalmetric.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "tomo/errors.hpp"

namespace tomo {

std::vector<EdgeSignature> edge_signatures(const PartialNetworkGraph& graph) {
  std::vector<Signature> sig(graph.edge_count());
  for (const auto& p : graph.paths())
    for (auto e : p.edges) sig[e].insert({p.source, p.receiver});
  std::vector<EdgeSignature> out;
  for (std::size_t e = 0; e < sig.size(); ++e)
    if (!sig[e].empty()) out.push_back({graph.edges()[e].id, std::move(sig[e])});
  return out;
}

std::vector<EquivalenceClass> equivalence_classes(const PartialNetworkGraph& graph) {
  std::map<Signature, std::vector<EdgeId>> groups;
  for (auto& s : edge_signatures(graph)) groups[s.pairs].push_back(s.edge);
  std::vector<EquivalenceClass> out;
  for (auto& [sig, edges] : groups) out.push_back({sig, std::move(edges)});
  return out;
}

namespace {

void check_boundary(const PartialNetworkGraph& a, const PartialNetworkGraph& b) {
  std::set<VertexId> x(a.boundary().begin(), a.boundary().end()), y(b.boundary().begin(), b.boundary().end());
  if (x != y) throw TomoError(ErrorKind::BoundaryMismatch, "graphs have different boundary sets");
}

}  // namespace

std::vector<EdgeId> matching_edge_set(const Signature& signature, const PartialNetworkGraph& other) {
  if (signature.empty()) return {};
  for (const auto& [u, v] : signature)
    if (!other.is_boundary(u) || !other.is_boundary(v))
      throw TomoError(ErrorKind::BoundaryMismatch, "pair " + u + ">" + v + " is not a boundary pair of the other graph");
  // an edge matches iff its own signature equals `signature`
  std::vector<EdgeId> out;
  for (auto& s : edge_signatures(other))
    if (s.pairs == signature) out.push_back(s.edge);
  return out;
}

double sum_weight(const PartialNetworkGraph& graph, const std::vector<EdgeId>& edges) {
  double w = 0.0;
  for (const auto& id : edges) w += graph.edges()[graph.edge_index(id)].weight;
  return w;
}

std::vector<EquivalenceClass> hidden_classes(const PartialNetworkGraph& graph) {
  std::vector<EquivalenceClass> out;
  for (auto& c : equivalence_classes(graph)) {
    const std::vector<BoundaryPair> ps(c.signature.begin(), c.signature.end());
    std::vector<char> seen(ps.size(), 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      for (std::size_t j = 0; j < ps.size(); ++j)
        if (!seen[j] && (ps[j].first == ps[i].first || ps[j].second == ps[i].second)) {
          seen[j] = 1;
          ++reached;
          stack.push_back(j);
        }
    }
    if (reached < ps.size()) out.push_back(std::move(c));
  }
  return out;
}

double q_metric(const PartialNetworkGraph& g, const SetWeight& w, const PartialNetworkGraph& g2, const SetWeight& w2,
                const std::set<EdgeId>* restrict_to) {
  check_boundary(g, g2);
  std::map<Signature, std::vector<EdgeId>> other;
  for (auto& s : edge_signatures(g2)) other[s.pairs].push_back(s.edge);
  double num = 0.0, den = 0.0;
  for (const auto& c : equivalence_classes(g)) {
    if (restrict_to &&
        std::none_of(c.edges.begin(), c.edges.end(), [&](const EdgeId& e) { return restrict_to->contains(e); }))
      continue;
    auto it = other.find(c.signature);
    const std::vector<EdgeId> match = it == other.end() ? std::vector<EdgeId>{} : it->second;
    const double wc = w(g, c.edges);
    num += std::abs(wc - w2(g2, match));
    den += wc;
  }
  if (!(den > 0.0)) throw TomoError(ErrorKind::ZeroDenominator, "no weighted equivalence classes");
  return num / den;
}

TmResult tm_metrics(const PartialNetworkGraph& truth, const PartialNetworkGraph& inferred,
                    const std::set<EdgeId>* restrict_to) {
  check_boundary(truth, inferred);
  std::set<Signature> other;
  for (auto& s : edge_signatures(inferred)) other.insert(s.pairs);
  TmResult r;
  double wall = 0.0, wmiss = 0.0;
  for (const auto& c : equivalence_classes(truth)) {
    if (restrict_to &&
        std::none_of(c.edges.begin(), c.edges.end(), [&](const EdgeId& e) { return restrict_to->contains(e); }))
      continue;
    const double wc = sum_weight(truth, c.edges);
    ++r.classes;
    wall += wc;
    if (!other.contains(c.signature)) {
      ++r.unmatched;
      wmiss += wc;
    }
  }
  if (r.classes == 0 || !(wall > 0.0)) throw TomoError(ErrorKind::ZeroDenominator, "no weighted equivalence classes");
  r.tm1 = wmiss / wall;
  r.tm2 = static_cast<double>(r.unmatched) / static_cast<double>(r.classes);
  return r;
}

}  // namespace tomo
