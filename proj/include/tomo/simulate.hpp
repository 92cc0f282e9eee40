#pragma once

// Random routed networks and a two-state (lossless / lossy) packet loss model.

#include <cstdint>
#include <map>
#include <vector>

#include "tomo/consistency.hpp"
#include "tomo/kernels.hpp"
#include "tomo/netgraph.hpp"

namespace tomo {

struct SimConfig {
  int m = 40;  ///< vertices of the underlying graph
  int d = 4;   ///< degree
  int n = 6;   ///< boundary vertices
  double gamma_s = 10.0;  ///< mean lossless dwell, windows
  double gamma_l = 10.0;  ///< mean lossy dwell, windows
  std::vector<double> loss_levels{0.05, 0.10};
  int packets_per_window = 1000;
  int num_windows = 400;
  bool symmetric_routing = false;
  std::uint64_t seed = 1;
  int max_retries = 200;

  void validate() const;
};

struct GroundTruth {
  PartialNetworkGraph physical;  ///< path edges only, random positive weights
  PartialNetworkGraph logical;
};

/// Random d-regular graph, random routing weights, n boundary vertices and
/// shortest-path routes between every ordered boundary pair. Routes never pass
/// through a third boundary vertex. Throws Disconnected after max_retries.
GroundTruth random_network(const SimConfig& config);

struct EdgeStateTrace {
  EdgeId edge;
  std::vector<std::pair<bool, int>> runs;  ///< (lossy, windows)
  double lossy_drop = 0.0;
  std::vector<double> drop;                ///< per window
};

struct EdgeTruth {
  bool lossy = false;
  double drop = 0.0;            ///< drop probability in the lossy state
  double mean_loss = 0.0;       ///< realised mean drop probability
  double log_variance = 0.0;    ///< realised variance of log(1 - p_k)
  double model_variance = 0.0;  ///< stationary variance of log(1 - p_k)
};

struct MeasurementSet {
  std::vector<BoundaryPair> pairs;  ///< graph path order
  Matrix received;                  ///< windows x pairs, received fractions
  int packets_per_window = 0;
  std::vector<EdgeStateTrace> traces;  ///< lossy edges only
  std::map<EdgeId, EdgeTruth> truth;   ///< every edge

  std::vector<double> series(const VertexId& source, const VertexId& receiver) const;
};

/// Long-run fraction of windows spent lossy (dwell times are max(1, Poisson)).
double lossy_occupancy(double gamma_s, double gamma_l);

EdgeStateTrace edge_trace(const EdgeId& edge, const SimConfig& config);

MeasurementSet generate_measurements(const PartialNetworkGraph& graph, const SimConfig& config, double lossy_fraction,
                                     Backend backend = Backend::Parallel);

}  // namespace tomo
