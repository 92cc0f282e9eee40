#include "tomo/consistency.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "tomo/errors.hpp"

namespace tomo {

namespace {

std::vector<std::pair<std::size_t, double>> negatives(const Vector& w) {
  std::vector<std::pair<std::size_t, double>> out;
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (w[i] < 0.0) out.emplace_back(static_cast<std::size_t>(i), w[i]);
  return out;
}

Vector to_vector(const std::vector<double>& v) { return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())); }

}  // namespace

IncidenceSystem incidence_matrix(const PartialNetworkGraph& graph) {
  IncidenceSystem sys;
  const auto& paths = graph.paths();
  sys.a = Matrix::Zero(static_cast<Eigen::Index>(paths.size()), static_cast<Eigen::Index>(graph.edge_count()));
  for (std::size_t r = 0; r < paths.size(); ++r) {
    sys.rows.emplace_back(paths[r].source, paths[r].receiver);
    for (auto e : paths[r].edges) sys.a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(e)) = 1.0;
  }
  for (const auto& e : graph.edges()) sys.cols.push_back(e.id);
  return sys;
}

Vector filled_targets(const PartialNetworkGraph& graph, const TargetWeights& targets) {
  for (const auto& [pair, z] : targets.values) {
    if (!graph.find_path(pair.first, pair.second))
      throw TomoError(ErrorKind::UnknownPath, "target for missing path " + pair.first + ">" + pair.second);
    if (!std::isfinite(z) || z < 0.0)
      throw TomoError(ErrorKind::InvalidArgument, "target for " + pair.first + ">" + pair.second + " must be >= 0");
  }
  const auto& paths = graph.paths();
  Vector z(static_cast<Eigen::Index>(paths.size()));
  for (std::size_t r = 0; r < paths.size(); ++r) {
    auto it = targets.values.find({paths[r].source, paths[r].receiver});
    z[static_cast<Eigen::Index>(r)] = it != targets.values.end() ? it->second : graph.path_weight(paths[r]);
  }
  return z;
}

ConsistencyResult extrinsic_adjust(const PartialNetworkGraph& graph, const TargetWeights& targets) {
  const IncidenceSystem sys = incidence_matrix(graph);
  const Vector z = filled_targets(graph, targets);
  ConsistencyResult out;
  out.original = to_vector(graph.weights());
  out.weights = out.original + min_norm_least_squares(sys.a, z - sys.a * out.original);
  out.residual = (sys.a * out.weights - z).norm();
  out.adjustment_norm = (out.weights - out.original).norm();
  out.negative_entries = negatives(out.weights);
  out.labels = sys.cols;
  return out;
}

// ---------------------------------------------------------------------------

TreeCollection TreeCollection::build(std::vector<VertexId> boundary, std::vector<Tree> receivers,
                                     std::vector<Tree> sources) {
  if (boundary.size() < 2) throw TomoError(ErrorKind::InvalidArgument, "need at least two boundary vertices");
  if (receivers.size() != boundary.size() || sources.size() != boundary.size())
    throw TomoError(ErrorKind::InvalidArgument, "need one source and one receiver tree per boundary vertex");
  std::set<VertexId> all(boundary.begin(), boundary.end());
  if (all.size() != boundary.size()) throw TomoError(ErrorKind::InvalidArgument, "duplicate boundary vertex");

  for (std::size_t i = 0; i < boundary.size(); ++i) {
    std::set<VertexId> expect = all;
    expect.erase(boundary[i]);
    for (const Tree* t : {&receivers[i], &sources[i]}) {
      const bool want_src = t == &sources[i];
      if (t->root != boundary[i])
        throw TomoError(ErrorKind::InvalidArgument, "tree " + std::to_string(i) + " is not rooted at " + boundary[i]);
      if ((t->orientation == Orientation::Source) != want_src)
        throw TomoError(ErrorKind::InvalidArgument, "tree at " + boundary[i] + " has the wrong orientation");
      std::set<VertexId> leaves(t->leaves.begin(), t->leaves.end());
      if (leaves != expect)
        throw TomoError(ErrorKind::InvalidArgument, "tree at " + boundary[i] + " must have every other boundary vertex as leaf");
      t->validate();
    }
  }
  TreeCollection c;
  c.boundary_ = std::move(boundary);
  c.receivers_ = std::move(receivers);
  c.sources_ = std::move(sources);
  c.index();
  return c;
}

TreeCollection TreeCollection::from_graph(const PartialNetworkGraph& graph, bool logical) {
  std::vector<Tree> rs, ss;
  for (const auto& b : graph.boundary()) {
    auto [s, r] = extract_trees(graph, b);
    if (logical) {
      s = logical_tree(s);
      r = logical_tree(r);
    }
    rs.push_back(std::move(r));
    ss.push_back(std::move(s));
  }
  return build(graph.boundary(), std::move(rs), std::move(ss));
}

void TreeCollection::index() {
  offsets_.clear();
  std::size_t off = 0;
  for (const auto& t : receivers_) {
    offsets_.push_back(off);
    off += t.edges.size();
  }
  for (const auto& t : sources_) {
    offsets_.push_back(off);
    off += t.edges.size();
  }
  offsets_.push_back(off);
}

std::size_t TreeCollection::boundary_rank(const VertexId& v) const {
  auto it = std::find(boundary_.begin(), boundary_.end(), v);
  if (it == boundary_.end()) throw TomoError(ErrorKind::InvalidArgument, v + " is not a boundary vertex");
  return static_cast<std::size_t>(it - boundary_.begin());
}

std::size_t TreeCollection::edge_count() const { return offsets_.empty() ? 0 : offsets_.back(); }

std::vector<BoundaryPair> TreeCollection::pairs() const {
  std::vector<BoundaryPair> out;
  for (const auto& v : boundary_)
    for (const auto& u : boundary_)
      if (u != v) out.emplace_back(v, u);
  return out;
}

std::vector<std::string> TreeCollection::edge_labels() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < size(); ++i)
    for (const auto& e : receivers_[i].edges) out.push_back("R:" + boundary_[i] + "/" + e.id);
  for (std::size_t i = 0; i < size(); ++i)
    for (const auto& e : sources_[i].edges) out.push_back("S:" + boundary_[i] + "/" + e.id);
  return out;
}

Vector TreeCollection::weights() const {
  Vector w(static_cast<Eigen::Index>(edge_count()));
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t k = 0; k < receivers_[i].edges.size(); ++k)
      w[static_cast<Eigen::Index>(receiver_offset(i) + k)] = receivers_[i].edges[k].weight;
    for (std::size_t k = 0; k < sources_[i].edges.size(); ++k)
      w[static_cast<Eigen::Index>(source_offset(i) + k)] = sources_[i].edges[k].weight;
  }
  return w;
}

TreeCollection TreeCollection::with_weights(const Vector& w) const {
  if (static_cast<std::size_t>(w.size()) != edge_count())
    throw TomoError(ErrorKind::DimensionMismatch, "weight vector size does not match the collection");
  TreeCollection c = *this;
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t k = 0; k < c.receivers_[i].edges.size(); ++k)
      c.receivers_[i].edges[k].weight = w[static_cast<Eigen::Index>(receiver_offset(i) + k)];
    for (std::size_t k = 0; k < c.sources_[i].edges.size(); ++k)
      c.sources_[i].edges[k].weight = w[static_cast<Eigen::Index>(source_offset(i) + k)];
  }
  return c;
}

Matrix signed_incidence(const TreeCollection& trees) {
  const auto pairs = trees.pairs();
  Matrix a = Matrix::Zero(static_cast<Eigen::Index>(pairs.size()), static_cast<Eigen::Index>(trees.edge_count()));
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    const auto& [v, u] = pairs[r];
    const std::size_t iv = trees.boundary_rank(v);
    const std::size_t iu = trees.boundary_rank(u);
    for (auto e : trees.receiver(iu).path_to(v))
      a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(trees.receiver_offset(iu) + e)) += 1.0;
    for (auto e : trees.source(iv).path_to(u))
      a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(trees.source_offset(iv) + e)) -= 1.0;
  }
  return a;
}

Vector asymmetry_vector(const TreeCollection& trees) { return signed_incidence(trees) * trees.weights(); }

ConsistencyResult intrinsic_adjust(const TreeCollection& trees) {
  const Matrix a = signed_incidence(trees);
  ConsistencyResult out;
  out.original = trees.weights();
  out.labels = trees.edge_labels();
  const Vector aw = a * out.original;
  const Matrix gram_inv = spd_inverse(a * a.transpose());
  const Vector delta = -a.transpose() * (gram_inv * aw);
  out.weights = out.original + delta;
  out.residual = (a * out.weights).norm();
  out.adjustment_norm = delta.norm();
  out.error_bound = aw.squaredNorm() / 2.0;
  out.negative_entries = negatives(out.weights);
  if (delta.squaredNorm() > *out.error_bound * (1.0 + 1e-9) + 1e-300)
    throw std::logic_error("intrinsic adjustment exceeds ||Aw||^2/2; AA' has an eigenvalue below 2");
  return out;
}

// ---------------------------------------------------------------------------

std::string to_string(PositivityMethod m) {
  switch (m) {
    case PositivityMethod::None: return "none";
    case PositivityMethod::Naive: return "naive";
    case PositivityMethod::Barrier: return "barrier";
  }
  return "none";
}

PositivityMethod positivity_from_string(const std::string& s) {
  if (s == "none") return PositivityMethod::None;
  if (s == "naive") return PositivityMethod::Naive;
  if (s == "barrier") return PositivityMethod::Barrier;
  throw TomoError(ErrorKind::InvalidArgument, "unknown positivity method '" + s + "'");
}

PositivityResult enforce_positivity(const Matrix& a, const Vector& w, const Vector& target, PositivityMethod method,
                                    const QpOptions& qp) {
  if (a.cols() != w.size() || a.rows() != target.size())
    throw TomoError(ErrorKind::DimensionMismatch, "positivity system dimensions do not agree");
  const Eigen::Index n = w.size();
  PositivityResult out;

  if (method == PositivityMethod::Barrier) {
    QpProblem p;
    p.h = 2.0 * Matrix::Identity(n, n);
    p.c = -2.0 * w;
    p.b_mat = a;
    p.b = target;
    if (a.rows() > 0) {
      try {
        (void)qr_row_reduce(a, target);
      } catch (const TomoError& e) {
        if (e.kind() != ErrorKind::InconsistentSystem) throw;
        p.b = a * min_norm_least_squares(a, target);
      }
    }
    QpResult r = solve_qp_barrier(p, qp);
    out.weights = r.x;
    out.iterations = r.state.iteration;
    out.residual = (a * out.weights - target).norm();
    return out;
  }

  // None and Naive both start from the unconstrained least-squares solution.
  std::vector<char> fixed(static_cast<std::size_t>(n), 0);
  const int cap = std::max<int>(1, static_cast<int>(n));
  for (out.iterations = 1;; ++out.iterations) {
    std::vector<Eigen::Index> free;
    for (Eigen::Index i = 0; i < n; ++i)
      if (!fixed[static_cast<std::size_t>(i)]) free.push_back(i);
    Matrix af(a.rows(), static_cast<Eigen::Index>(free.size()));
    Vector wf(static_cast<Eigen::Index>(free.size()));
    for (std::size_t k = 0; k < free.size(); ++k) {
      af.col(static_cast<Eigen::Index>(k)) = a.col(free[k]);
      wf[static_cast<Eigen::Index>(k)] = w[free[k]];
    }
    Vector xf = wf;
    if (!free.empty()) xf += min_norm_least_squares(af, target - af * wf);
    out.weights = Vector::Zero(n);
    bool any_negative = false;
    for (std::size_t k = 0; k < free.size(); ++k) {
      const double v = xf[static_cast<Eigen::Index>(k)];
      out.weights[free[k]] = v;
      if (method == PositivityMethod::Naive && v < 0.0) {
        fixed[static_cast<std::size_t>(free[k])] = 1;
        out.zeroed.push_back(static_cast<std::size_t>(free[k]));
        any_negative = true;
      }
    }
    if (!any_negative || out.iterations >= cap) break;
  }
  if (method == PositivityMethod::Naive) out.weights = out.weights.cwiseMax(0.0);
  std::sort(out.zeroed.begin(), out.zeroed.end());
  out.residual = (a * out.weights - target).norm();
  return out;
}

}  // namespace tomo
