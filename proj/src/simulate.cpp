#include "tomo/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <random>
#include <set>
#include <string>

#include "tomo/errors.hpp"

namespace tomo {

void SimConfig::validate() const {
  if (m < 2 || d < 1 || d >= m) throw TomoError(ErrorKind::InvalidArgument, "need 1 <= d < m");
  if ((m * d) % 2 != 0) throw TomoError(ErrorKind::InvalidArgument, "m * d must be even for a d-regular graph");
  if (n < 2 || n > m) throw TomoError(ErrorKind::InvalidArgument, "need 2 <= n <= m");
  if (!(gamma_s > 0.0 && gamma_l > 0.0)) throw TomoError(ErrorKind::InvalidArgument, "dwell parameters must be > 0");
  if (loss_levels.empty()) throw TomoError(ErrorKind::InvalidArgument, "empty loss level set");
  for (double p : loss_levels)
    if (!(p > 0.0 && p < 1.0)) throw TomoError(ErrorKind::InvalidArgument, "loss levels must lie in (0, 1)");
  if (packets_per_window < 1 || num_windows < 1) throw TomoError(ErrorKind::InvalidArgument, "need packets and windows >= 1");
}

namespace {

std::string vertex_name(int i, int m) {
  const int width = static_cast<int>(std::to_string(m - 1).size());
  std::string s = std::to_string(i);
  return "v" + std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(s.size()))), '0') + s;
}

// configuration model; empty result when the pairing has a loop or multi-edge
std::vector<std::pair<int, int>> try_regular(int m, int d, std::mt19937_64& gen) {
  std::vector<int> stubs;
  for (int v = 0; v < m; ++v)
    for (int k = 0; k < d; ++k) stubs.push_back(v);
  std::shuffle(stubs.begin(), stubs.end(), gen);
  std::set<std::pair<int, int>> seen;
  std::vector<std::pair<int, int>> out;
  for (std::size_t i = 0; i < stubs.size(); i += 2) {
    int a = std::min(stubs[i], stubs[i + 1]), b = std::max(stubs[i], stubs[i + 1]);
    if (a == b || !seen.insert({a, b}).second) return {};
    out.emplace_back(a, b);
  }
  return out;
}

struct Arc {
  int to;
  double w;
};

// shortest paths from s; boundary vertices other than s are never expanded
std::vector<int> dijkstra(const std::vector<std::vector<Arc>>& adj, int s, const std::vector<char>& boundary) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(adj.size(), inf);
  std::vector<int> prev(adj.size(), -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[s] = 0.0;
  pq.push({0.0, s});
  while (!pq.empty()) {
    auto [dv, v] = pq.top();
    pq.pop();
    if (dv > dist[v]) continue;
    if (v != s && boundary[v]) continue;
    for (const Arc& a : adj[v]) {
      if (dv + a.w < dist[a.to]) {
        dist[a.to] = dv + a.w;
        prev[a.to] = v;
        pq.push({dist[a.to], a.to});
      }
    }
  }
  return prev;
}

}  // namespace

GroundTruth random_network(const SimConfig& config) {
  config.validate();
  const int m = config.m;
  auto gen = substream(config.seed, "network");
  std::uniform_real_distribution<double> routing(1.0, 10.0), metric(1.0, 2.0);

  for (int attempt = 0; attempt < config.max_retries; ++attempt) {
    // a simple pairing turns up with probability about exp(-(d*d - 1) / 4)
    std::vector<std::pair<int, int>> und;
    for (int k = 0; k < 100000 && und.empty(); ++k) und = try_regular(m, config.d, gen);
    if (und.empty()) throw TomoError(ErrorKind::InvalidArgument, "no simple d-regular pairing found");

    std::vector<std::vector<Arc>> adj(m);
    for (auto [a, b] : und) {
      const double w = routing(gen);
      adj[a].push_back({b, w});
      adj[b].push_back({a, config.symmetric_routing ? w : routing(gen)});
    }
    std::vector<int> ids(m);
    for (int i = 0; i < m; ++i) ids[i] = i;
    std::shuffle(ids.begin(), ids.end(), gen);
    std::vector<int> bnd(ids.begin(), ids.begin() + config.n);
    std::sort(bnd.begin(), bnd.end());
    std::vector<char> is_b(m, 0);
    for (int b : bnd) is_b[b] = 1;

    bool ok = true;
    std::vector<PathSpec> specs;
    std::set<std::pair<int, int>> used;
    for (int u : bnd) {
      const auto prev = dijkstra(adj, u, is_b);
      for (int v : bnd) {
        if (v == u) continue;
        if (prev[v] < 0) {
          ok = false;
          break;
        }
        std::vector<int> seq{v};
        while (seq.back() != u) seq.push_back(prev[seq.back()]);
        std::reverse(seq.begin(), seq.end());
        PathSpec s{vertex_name(u, m), vertex_name(v, m), {}};
        for (std::size_t k = 0; k + 1 < seq.size(); ++k) {
          s.edges.push_back(vertex_name(seq[k], m) + "-" + vertex_name(seq[k + 1], m));
          used.insert({seq[k], seq[k + 1]});
        }
        specs.push_back(std::move(s));
      }
      if (!ok) break;
    }
    if (!ok) continue;

    std::set<VertexId> verts;
    std::vector<Edge> edges;
    for (auto [a, b] : used) {
      edges.push_back({vertex_name(a, m) + "-" + vertex_name(b, m), vertex_name(a, m), vertex_name(b, m), metric(gen)});
      verts.insert(vertex_name(a, m));
      verts.insert(vertex_name(b, m));
    }
    std::vector<VertexId> boundary;
    for (int b : bnd) boundary.push_back(vertex_name(b, m));
    GroundTruth gt;
    gt.physical = PartialNetworkGraph::build({verts.begin(), verts.end()}, std::move(edges), boundary, std::move(specs));
    gt.logical = logical_subgraph(gt.physical);
    return gt;
  }
  throw TomoError(ErrorKind::Disconnected, "no connected routing after " + std::to_string(config.max_retries) + " attempts");
}

double lossy_occupancy(double gamma_s, double gamma_l) {
  // E[max(1, K)] for K ~ Poisson(g) is g + exp(-g)
  const double el = gamma_l + std::exp(-gamma_l), es = gamma_s + std::exp(-gamma_s);
  return el / (el + es);
}

EdgeStateTrace edge_trace(const EdgeId& edge, const SimConfig& config) {
  auto gen = substream(config.seed, "trace/" + edge);
  EdgeStateTrace t;
  t.edge = edge;
  std::uniform_int_distribution<std::size_t> level(0, config.loss_levels.size() - 1);
  t.lossy_drop = config.loss_levels[level(gen)];
  std::bernoulli_distribution start(lossy_occupancy(config.gamma_s, config.gamma_l));
  std::poisson_distribution<int> dwell_l(config.gamma_l), dwell_s(config.gamma_s);
  bool lossy = start(gen);
  int covered = 0;
  while (covered < config.num_windows) {
    const int k = std::max(1, lossy ? dwell_l(gen) : dwell_s(gen));
    const int len = std::min(k, config.num_windows - covered);
    t.runs.emplace_back(lossy, len);
    t.drop.insert(t.drop.end(), static_cast<std::size_t>(len), lossy ? t.lossy_drop : 0.0);
    covered += len;
    lossy = !lossy;
  }
  return t;
}

std::vector<double> MeasurementSet::series(const VertexId& source, const VertexId& receiver) const {
  for (std::size_t p = 0; p < pairs.size(); ++p)
    if (pairs[p].first == source && pairs[p].second == receiver) {
      const auto col = received.col(static_cast<Eigen::Index>(p));
      return {col.data(), col.data() + col.size()};
    }
  throw TomoError(ErrorKind::UnknownPath, "no series for " + source + ">" + receiver);
}

MeasurementSet generate_measurements(const PartialNetworkGraph& graph, const SimConfig& config, double lossy_fraction,
                                     Backend backend) {
  config.validate();
  if (!(lossy_fraction >= 0.0 && lossy_fraction <= 1.0))
    throw TomoError(ErrorKind::InvalidArgument, "lossy fraction must lie in [0, 1]");
  const auto& edges = graph.edges();
  const std::size_t ne = edges.size();
  const auto n_lossy = static_cast<std::size_t>(std::floor(lossy_fraction * static_cast<double>(ne) + 1e-9));

  std::vector<std::size_t> order(ne);
  for (std::size_t i = 0; i < ne; ++i) order[i] = i;
  auto pick = substream(config.seed, "lossy-set");
  std::shuffle(order.begin(), order.end(), pick);
  std::vector<char> lossy(ne, 0);
  for (std::size_t i = 0; i < n_lossy; ++i) lossy[order[i]] = 1;

  MeasurementSet ms;
  ms.packets_per_window = config.packets_per_window;
  Matrix drop = Matrix::Zero(config.num_windows, static_cast<Eigen::Index>(ne));
  const double q = lossy_occupancy(config.gamma_s, config.gamma_l);
  for (std::size_t e = 0; e < ne; ++e) {
    EdgeTruth& tr = ms.truth[edges[e].id];
    if (!lossy[e]) continue;
    EdgeStateTrace t = edge_trace(edges[e].id, config);
    double sum = 0.0, lsum = 0.0, lsq = 0.0;
    for (int k = 0; k < config.num_windows; ++k) {
      const double p = t.drop[static_cast<std::size_t>(k)];
      drop(k, static_cast<Eigen::Index>(e)) = p;
      sum += p;
      lsum += std::log1p(-p);
      lsq += std::log1p(-p) * std::log1p(-p);
    }
    const double nw = config.num_windows;
    tr.lossy = true;
    tr.drop = t.lossy_drop;
    tr.mean_loss = sum / nw;
    tr.log_variance = nw > 1 ? (lsq - lsum * lsum / nw) / (nw - 1) : 0.0;
    const double l = std::log1p(-t.lossy_drop);
    tr.model_variance = q * (1.0 - q) * l * l;
    ms.traces.push_back(std::move(t));
  }

  std::vector<std::vector<std::size_t>> paths;
  std::vector<std::string> keys;
  for (const auto& p : graph.paths()) {
    ms.pairs.emplace_back(p.source, p.receiver);
    paths.push_back(p.edges);
    keys.push_back("packets/" + p.source + ">" + p.receiver);
  }
  ms.received = simulate_received(drop, paths, keys, config.packets_per_window, config.seed, backend);
  return ms;
}

}  // namespace tomo
