#pragma once

// Five-stage experiment: infer trees from simulated measurements, prune them,
// make them mutually consistent, fuse them into one graph, prune that graph,
// and score it against the simulated ground truth.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tomo/consistency.hpp"
#include "tomo/evalmetric.hpp"
#include "tomo/pruning.hpp"
#include "tomo/simulate.hpp"

namespace tomo {

struct PipelineOptions {
  PositivityMethod positivity = PositivityMethod::Naive;
  double tau_factor = 10.0;      ///< fusion tolerance = tau_factor * intrinsic residual (floored)
  double delta_max = 0.2;        ///< pruning factor cap for the fused graph
  double tree_delta_max = 0.2;   ///< pruning factor cap for the inferred trees
  bool noise_correction = true;  ///< remove binomial sampling variance from leaf edges
  bool exact = false;            ///< use ground-truth trees, skip sampling and pruning
  /// When set, the fused graph is pruned with this factor instead of the
  /// selected one (the "delta" sweep axis).
  double fixed_delta = -1.0;
  GapRule gap_rule = GapRule::Interior;
  /// Score only logical edges that contain a lossy physical edge. Off by
  /// default: lossless edges count as misses in TM2 and weigh 0 in TM1.
  bool identifiable_only = false;
};

enum class SweepAxis { NumWindows, LossyFraction, Delta };

std::string to_string(SweepAxis a);
SweepAxis sweep_axis_from_string(const std::string& s);

struct ExperimentConfig {
  SimConfig sim;
  double lossy_fraction = 1.0;
  SweepAxis axis = SweepAxis::NumWindows;
  std::vector<double> sweep_values{400};
  int repetitions = 50;
  std::uint64_t seed = 1;
  int jobs = 0;  ///< 0: OpenMP default
  PipelineOptions pipeline;

  void validate() const;
};

/// Reads the TOML experiment description (see README).
ExperimentConfig load_config(const std::filesystem::path& file);
ExperimentConfig parse_config(const std::string& toml_text);

struct RunRecord {
  double point = 0.0;
  int rep = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double tm1 = 0.0;
  double tm2 = 0.0;
  std::size_t classes = 0;
  std::size_t unmatched = 0;
  double tree_delta_mean = 0.0;   ///< mean selected pruning factor over trees
  double final_delta = 0.0;       ///< pruning factor of the fused graph
  std::size_t tree_edges_pruned = 0;
  double tree_prune_residual = 0.0;
  double asymmetry_norm = 0.0;    ///< ||A w|| before intrinsic adjustment
  double error_bound = 0.0;       ///< ||A w||^2 / 2
  double adjustment_sq = 0.0;     ///< ||w_adj - w||^2
  double intrinsic_residual = 0.0;
  std::size_t positivity_zeroed = 0;
  double tau = 0.0;
  std::size_t fused_vertices = 0;
  std::size_t fused_edges = 0;
  double fusion_residual = 0.0;
  std::size_t final_edges = 0;
  double final_prune_residual = 0.0;
  double ms_simulate = 0.0, ms_infer = 0.0, ms_tree_prune = 0.0, ms_intrinsic = 0.0, ms_fuse = 0.0,
         ms_final_prune = 0.0, ms_metric = 0.0;
};

struct PointSummary {
  double point = 0.0;
  int runs = 0;
  int failed = 0;
  double tm1_mean = 0.0, tm1_std = 0.0;
  double tm2_mean = 0.0, tm2_std = 0.0;
  double gap_mean = 0.0;  ///< mean |tm1 - tm2|
  double tree_delta_mean = 0.0;
  double final_delta_mean = 0.0;
};

struct Report {
  std::vector<RunRecord> runs;  ///< sorted by (point, rep)
  std::vector<PointSummary> summary;
};

std::uint64_t repetition_seed(std::uint64_t base, int rep);

/// Ground truth scored by the metrics: the logical graph weighted by the
/// stationary log-loss variance of its lossy members, and the set of logical
/// edges containing at least one lossy physical edge.
struct ScoredTruth {
  PartialNetworkGraph graph;
  std::set<EdgeId> identifiable;
};
ScoredTruth scored_truth(const GroundTruth& gt, const MeasurementSet& ms);

/// One repetition at one sweep point. Errors are caught into the record.
RunRecord run_once(const ExperimentConfig& config, double point, int rep);

Report run_pipeline(const ExperimentConfig& config);
std::vector<PointSummary> summarize(const std::vector<RunRecord>& runs);

void write_runs_csv(const std::filesystem::path& file, const std::vector<RunRecord>& runs);
void write_summary_csv(const std::filesystem::path& file, const std::vector<PointSummary>& summary);

}  // namespace tomo
