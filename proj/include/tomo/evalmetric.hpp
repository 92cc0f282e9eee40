#pragma once

// Path-intersection comparison of two partial network graphs over the same
// boundary. An edge is characterised by the set of boundary pairs whose path
// uses it; edges with the same set form one class.

#include <functional>
#include <optional>
#include <set>
#include <vector>

#include "tomo/consistency.hpp"
#include "tomo/netgraph.hpp"

namespace tomo {

using Signature = std::set<BoundaryPair>;

struct EdgeSignature {
  EdgeId edge;
  Signature pairs;
};

/// Signatures of edges lying on at least one path, graph edge order.
std::vector<EdgeSignature> edge_signatures(const PartialNetworkGraph& graph);

struct EquivalenceClass {
  Signature signature;
  std::vector<EdgeId> edges;
};

std::vector<EquivalenceClass> equivalence_classes(const PartialNetworkGraph& graph);

/// Classes whose paths do not link up through shared sources or receivers.
/// Tree path-sharing data says nothing about such edges, so fusion of exact
/// trees cannot recover them.
std::vector<EquivalenceClass> hidden_classes(const PartialNetworkGraph& graph);

/// Edges of `other` used by every path in `signature` and by no other path.
/// Throws BoundaryMismatch.
std::vector<EdgeId> matching_edge_set(const Signature& signature, const PartialNetworkGraph& other);

/// Set function: graph, member edges -> weight.
using SetWeight = std::function<double(const PartialNetworkGraph&, const std::vector<EdgeId>&)>;

/// Sum of member edge weights (0 for the empty set).
double sum_weight(const PartialNetworkGraph& graph, const std::vector<EdgeId>& edges);

/// sum |W(class) - W'(match)| / sum W(class), one term per class of g.
/// `restrict_to`, when given, keeps only classes containing one of these edges.
/// Throws ZeroDenominator, BoundaryMismatch.
double q_metric(const PartialNetworkGraph& g, const SetWeight& w, const PartialNetworkGraph& g2, const SetWeight& w2,
                const std::set<EdgeId>* restrict_to = nullptr);

struct TmResult {
  double tm1 = 0.0;  ///< weight fraction of classes without a match
  double tm2 = 0.0;  ///< count fraction of classes without a match
  std::size_t classes = 0;
  std::size_t unmatched = 0;
};

TmResult tm_metrics(const PartialNetworkGraph& truth, const PartialNetworkGraph& inferred,
                    const std::set<EdgeId>* restrict_to = nullptr);

}  // namespace tomo
