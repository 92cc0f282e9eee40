#include "tomo/inference.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "tomo/errors.hpp"

namespace tomo {

double pairwise_shared_metric(const PathSeries& s1, const PathSeries& s2) {
  if (s1.root != s2.root) throw TomoError(ErrorKind::InvalidArgument, "series do not share a root");
  const std::size_t n = s1.values.size();
  if (n != s2.values.size()) throw TomoError(ErrorKind::LengthMismatch, "series lengths differ");
  if (n < 2) throw TomoError(ErrorKind::TooShort, "need at least two windows");
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    mx += s1.values[k];
    my += s2.values[k];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) acc += (s1.values[k] - mx) * (s2.values[k] - my);
  return acc / static_cast<double>(n - 1);
}

namespace {

struct Cluster {
  VertexId name;
  double created = 0.0;  // clipped metric at creation
  int parent = -1;
  std::vector<int> children;
};

}  // namespace

InferredTree reconstruct_tree(const VertexId& root, Orientation orientation, const std::vector<PathSeries>& series,
                              const ReconstructOptions& opts) {
  const std::size_t L = series.size();
  if (L < 2) throw TomoError(ErrorKind::InvalidArgument, "need at least two series");
  if (!(opts.merge_weight > 0.0 && opts.merge_weight < 1.0))
    throw TomoError(ErrorKind::InvalidArgument, "merge weight must lie in (0, 1)");
  if (!opts.leaf_noise.empty() && opts.leaf_noise.size() != L)
    throw TomoError(ErrorKind::DimensionMismatch, "one noise value per series");
  const std::size_t n = series.front().values.size();
  std::set<VertexId> leaves_seen;
  for (const auto& s : series) {
    if (s.root != root) throw TomoError(ErrorKind::InvalidArgument, "series " + s.root + ">" + s.leaf + " has another root");
    if (s.orientation != orientation) throw TomoError(ErrorKind::InvalidArgument, "series orientation mismatch");
    if (s.values.size() != n) throw TomoError(ErrorKind::LengthMismatch, "series lengths differ");
    if (s.leaf == root || !leaves_seen.insert(s.leaf).second)
      throw TomoError(ErrorKind::InvalidArgument, "duplicate or root leaf " + s.leaf);
  }
  if (n < 2) throw TomoError(ErrorKind::TooShort, "need at least two windows");

  Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(L));
  for (std::size_t i = 0; i < L; ++i)
    for (std::size_t k = 0; k < n; ++k) x(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = series[i].values[k];
  // m(i, j) for merged clusters follows from bilinearity of the covariance
  Matrix m = covariance_matrix(x, opts.backend);

  const char tag = orientation == Orientation::Source ? 'S' : 'R';
  InferredTree out;
  std::vector<Cluster> cl;
  std::vector<int> active;
  for (std::size_t i = 0; i < L; ++i) {
    double own = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
    if (!opts.leaf_noise.empty()) own -= opts.leaf_noise[i];
    cl.push_back({series[i].leaf, std::max(0.0, own), -1, {}});
    active.push_back(static_cast<int>(i));
  }

  bool any_positive = false;
  for (std::size_t i = 0; i < L; ++i)
    for (std::size_t j = i + 1; j < L; ++j)
      if (m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) > 0.0) any_positive = true;

  int next = 1;
  auto fresh = [&] { return root + ":" + tag + std::to_string(next++); };

  if (!any_positive && L > 2) {
    out.degenerate = true;
    const int hub = static_cast<int>(cl.size());
    cl.push_back({fresh(), 0.0, -1, {}});
    for (int a : active) {
      cl[a].parent = hub;
      cl[hub].children.push_back(a);
    }
    active = {hub};
  }

  // metric between active clusters, stored in m grown on demand
  while (active.size() > 1) {
    int bi = -1, bj = -1;
    double best = 0.0;
    for (std::size_t a = 0; a < active.size(); ++a)
      for (std::size_t b = a + 1; b < active.size(); ++b) {
        int i = active[a], j = active[b];
        if (cl[j].name < cl[i].name) std::swap(i, j);
        const double v = m(i, j);
        const bool better = bi < 0 || v > best ||
                            (v == best && std::tie(cl[i].name, cl[j].name) < std::tie(cl[bi].name, cl[bj].name));
        if (better) {
          best = v;
          bi = i;
          bj = j;
        }
      }
    const int p = static_cast<int>(cl.size());
    cl.push_back({fresh(), std::max(0.0, best), -1, {bi, bj}});
    cl[bi].parent = cl[bj].parent = p;
    out.merges.push_back({cl[bi].name, cl[bj].name, cl[p].name, best});

    const Eigen::Index sz = p + 1;
    m.conservativeResize(sz, sz);
    const double a = opts.merge_weight;
    for (int k : active) {
      const double v = a * m(bi, k) + (1.0 - a) * m(bj, k);
      m(p, k) = m(k, p) = v;
    }
    m(p, p) = a * a * m(bi, bi) + 2 * a * (1 - a) * m(bi, bj) + (1 - a) * (1 - a) * m(bj, bj);
    active.erase(std::remove_if(active.begin(), active.end(), [&](int c) { return c == bi || c == bj; }), active.end());
    active.push_back(p);
  }

  // top cluster hangs off the root
  Tree& t = out.tree;
  t.root = root;
  t.orientation = orientation;
  t.vertices.push_back(root);
  const int top = active.front();
  std::map<int, std::size_t> edge_of;
  std::vector<int> stack{top};
  while (!stack.empty()) {
    const int c = stack.back();
    stack.pop_back();
    const VertexId& up = cl[c].parent < 0 ? root : cl[cl[c].parent].name;
    const double above = cl[c].parent < 0 ? 0.0 : cl[cl[c].parent].created;
    Edge e;
    e.id = cl[c].name;
    e.weight = cl[c].created - above;
    if (orientation == Orientation::Source) {
      e.tail = up;
      e.head = cl[c].name;
    } else {
      e.tail = cl[c].name;
      e.head = up;
    }
    edge_of[c] = t.edges.size();
    t.edges.push_back(std::move(e));
    t.vertices.push_back(cl[c].name);
    for (auto it = cl[c].children.rbegin(); it != cl[c].children.rend(); ++it) stack.push_back(*it);
  }
  for (std::size_t i = 0; i < L; ++i) {
    t.leaves.push_back(cl[i].name);
    std::vector<std::size_t> chain;
    for (int c = static_cast<int>(i); c >= 0; c = cl[c].parent) chain.push_back(edge_of.at(c));
    if (orientation == Orientation::Source) std::reverse(chain.begin(), chain.end());
    t.leaf_paths.push_back(std::move(chain));
  }
  return out;
}

}  // namespace tomo
