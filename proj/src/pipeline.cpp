#include "tomo/pipeline.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <toml.hpp>

#include "tomo/errors.hpp"
#include "tomo/fusion.hpp"
#include "tomo/inference.hpp"
#include "tomo/pruning.hpp"

namespace tomo {

std::string to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::NumWindows: return "num_windows";
    case SweepAxis::LossyFraction: return "lossy_fraction";
    case SweepAxis::Delta: return "delta";
  }
  return "?";
}

SweepAxis sweep_axis_from_string(const std::string& s) {
  if (s == "num_windows") return SweepAxis::NumWindows;
  if (s == "lossy_fraction") return SweepAxis::LossyFraction;
  if (s == "delta") return SweepAxis::Delta;
  throw TomoError(ErrorKind::InvalidArgument, "unknown sweep axis '" + s + "'");
}

void ExperimentConfig::validate() const {
  sim.validate();
  if (repetitions < 1) throw TomoError(ErrorKind::InvalidArgument, "repetitions must be >= 1");
  if (sweep_values.empty()) throw TomoError(ErrorKind::InvalidArgument, "empty sweep");
  for (std::size_t i = 1; i < sweep_values.size(); ++i)
    if (!(sweep_values[i] > sweep_values[i - 1])) throw TomoError(ErrorKind::InvalidArgument, "sweep values must increase strictly");
  for (double v : sweep_values) {
    if (axis == SweepAxis::NumWindows && (v < 2 || v != std::floor(v)))
      throw TomoError(ErrorKind::InvalidArgument, "window counts must be integers >= 2");
    if (axis == SweepAxis::LossyFraction && !(v >= 0.0 && v <= 1.0))
      throw TomoError(ErrorKind::InvalidArgument, "lossy fractions must lie in [0, 1]");
    if (axis == SweepAxis::Delta && !(v >= 0.0 && v <= 1.0))
      throw TomoError(ErrorKind::InvalidArgument, "pruning factors must lie in [0, 1]");
  }
  if (!(lossy_fraction >= 0.0 && lossy_fraction <= 1.0)) throw TomoError(ErrorKind::InvalidArgument, "lossy fraction must lie in [0, 1]");
  if (!(pipeline.tau_factor >= 0.0)) throw TomoError(ErrorKind::InvalidArgument, "tau_factor must be >= 0");
  if (!(pipeline.delta_max > 0.0 && pipeline.delta_max <= 1.0) || !(pipeline.tree_delta_max > 0.0 && pipeline.tree_delta_max <= 1.0))
    throw TomoError(ErrorKind::InvalidArgument, "delta_max must lie in (0, 1]");
}

ExperimentConfig parse_config(const std::string& text) {
  toml::table t;
  try {
    t = toml::parse(text);
  } catch (const toml::parse_error& e) {
    throw TomoError(ErrorKind::Io, std::string("config: ") + e.what());
  }
  ExperimentConfig c;
  c.seed = t["seed"].value_or<std::int64_t>(1);
  c.repetitions = t["repetitions"].value_or(c.repetitions);
  c.lossy_fraction = t["lossy_fraction"].value_or(c.lossy_fraction);
  c.jobs = t["jobs"].value_or(c.jobs);

  auto net = t["network"];
  c.sim.m = net["m"].value_or(c.sim.m);
  c.sim.d = net["d"].value_or(c.sim.d);
  c.sim.n = net["n"].value_or(c.sim.n);
  c.sim.symmetric_routing = net["symmetric_routing"].value_or(c.sim.symmetric_routing);
  c.sim.max_retries = net["max_retries"].value_or(c.sim.max_retries);

  auto tr = t["traffic"];
  c.sim.gamma_s = tr["gamma_s"].value_or(c.sim.gamma_s);
  c.sim.gamma_l = tr["gamma_l"].value_or(c.sim.gamma_l);
  c.sim.packets_per_window = tr["packets_per_window"].value_or(c.sim.packets_per_window);
  c.sim.num_windows = tr["num_windows"].value_or(c.sim.num_windows);
  if (auto arr = tr["loss_levels"].as_array()) {
    c.sim.loss_levels.clear();
    for (auto& v : *arr) c.sim.loss_levels.push_back(v.value_or(0.0));
  }

  auto sw = t["sweep"];
  if (auto axis = sw["axis"].value<std::string>()) c.axis = sweep_axis_from_string(*axis);
  if (auto arr = sw["values"].as_array()) {
    c.sweep_values.clear();
    for (auto& v : *arr) c.sweep_values.push_back(v.value_or(0.0));
  } else if (c.axis == SweepAxis::NumWindows) {
    c.sweep_values = {static_cast<double>(c.sim.num_windows)};
  } else if (c.axis == SweepAxis::LossyFraction) {
    c.sweep_values = {c.lossy_fraction};
  }

  auto pl = t["pipeline"];
  if (auto p = pl["positivity"].value<std::string>()) c.pipeline.positivity = positivity_from_string(*p);
  c.pipeline.tau_factor = pl["tau_factor"].value_or(c.pipeline.tau_factor);
  c.pipeline.delta_max = pl["delta_max"].value_or(c.pipeline.delta_max);
  c.pipeline.tree_delta_max = pl["tree_delta_max"].value_or(c.pipeline.tree_delta_max);
  c.pipeline.noise_correction = pl["noise_correction"].value_or(c.pipeline.noise_correction);
  c.pipeline.exact = pl["exact"].value_or(c.pipeline.exact);
  c.pipeline.identifiable_only = pl["identifiable_only"].value_or(c.pipeline.identifiable_only);
  c.pipeline.fixed_delta = pl["fixed_delta"].value_or(c.pipeline.fixed_delta);
  if (auto g = pl["gap_rule"].value<std::string>()) {
    if (*g == "interior") c.pipeline.gap_rule = GapRule::Interior;
    else if (*g == "closed") c.pipeline.gap_rule = GapRule::ClosedByMax;
    else throw TomoError(ErrorKind::InvalidArgument, "gap_rule must be interior or closed");
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw TomoError(ErrorKind::Io, "cannot open " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::uint64_t repetition_seed(std::uint64_t base, int rep) {
  return splitmix64(base ^ splitmix64(static_cast<std::uint64_t>(rep) + 0x51ed270bULL));
}

ScoredTruth scored_truth(const GroundTruth& gt, const MeasurementSet& ms) {
  ScoredTruth out;
  std::vector<double> w;
  for (const auto& e : gt.logical.edges()) {
    double v = 0.0;
    bool lossy = false;
    std::stringstream parts(e.id);
    std::string part;
    while (std::getline(parts, part, '+')) {
      auto it = ms.truth.find(part);
      if (it != ms.truth.end() && it->second.lossy) {
        lossy = true;
        v += it->second.model_variance;
      }
    }
    if (lossy) out.identifiable.insert(e.id);
    w.push_back(v);
  }
  out.graph = gt.logical.with_weights(w);
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) { return std::chrono::duration<double, std::milli>(Clock::now() - t0).count(); }

// per-window log received fraction; zero counts are floored at half a packet
PathSeries log_series(const MeasurementSet& ms, const VertexId& s, const VertexId& r, const VertexId& root,
                      Orientation o, double* noise) {
  PathSeries out;
  out.root = root;
  out.leaf = root == s ? r : s;
  out.orientation = o;
  const auto raw = ms.series(s, r);
  const double floor = 0.5 / ms.packets_per_window;
  double nv = 0.0;
  for (double p : raw) {
    const double q = std::max(p, floor);
    out.values.push_back(std::log(q));
    nv += (1.0 - q) / (ms.packets_per_window * q);  // delta-method variance of log(p_hat)
  }
  if (noise) *noise = nv / static_cast<double>(raw.size());
  return out;
}

Tree prune_inferred(const Tree& tree, double delta_max, GapRule rule, double& delta, std::size_t& pruned, double& residual) {
  const PartialNetworkGraph g = tree_as_graph(tree, GraphCheck::Structural);
  const auto w = g.weights();
  delta = select_pruning_factor(std::span<const double>(w), delta_max, rule);
  const auto set = admissible_prune_set(g, edges_below_factor(g, delta));
  if (set.empty()) return tree;
  TreePruneResult r = prune_tree(tree, set, {PositivityMethod::Naive, {}});
  pruned += r.pruned.size();
  residual = std::max(residual, r.residual);
  return r.tree;
}

}  // namespace

RunRecord run_once(const ExperimentConfig& config, double point, int rep) {
  RunRecord r;
  r.point = point;
  r.rep = rep;
  r.seed = repetition_seed(config.seed, rep);
  try {
    SimConfig sim = config.sim;
    sim.seed = r.seed;
    double fraction = config.lossy_fraction;
    PipelineOptions po = config.pipeline;
    switch (config.axis) {
      case SweepAxis::NumWindows: sim.num_windows = static_cast<int>(point); break;
      case SweepAxis::LossyFraction: fraction = point; break;
      case SweepAxis::Delta: po.fixed_delta = point; break;
    }

    auto t0 = Clock::now();
    const GroundTruth gt = random_network(sim);
    ScoredTruth truth;
    TreeCollection trees;

    if (po.exact) {
      truth.graph = gt.logical;
      for (const auto& e : gt.logical.edges()) truth.identifiable.insert(e.id);
      trees = TreeCollection::from_graph(gt.logical, true);
      r.ms_simulate = ms_since(t0);
    } else {
      const MeasurementSet ms = generate_measurements(gt.physical, sim, fraction, Backend::Serial);
      truth = scored_truth(gt, ms);
      r.ms_simulate = ms_since(t0);

      t0 = Clock::now();
      const auto& bnd = gt.physical.boundary();
      std::vector<Tree> src, rcv;
      for (const auto& b : bnd) {
        for (Orientation o : {Orientation::Source, Orientation::Receiver}) {
          std::vector<PathSeries> series;
          ReconstructOptions ro;
          ro.backend = Backend::Serial;
          for (const auto& v : bnd) {
            if (v == b) continue;
            double noise = 0.0;
            series.push_back(o == Orientation::Source ? log_series(ms, b, v, b, o, &noise)
                                                      : log_series(ms, v, b, b, o, &noise));
            ro.leaf_noise.push_back(po.noise_correction ? noise : 0.0);
          }
          InferredTree it = reconstruct_tree(b, o, series, ro);
          (o == Orientation::Source ? src : rcv).push_back(std::move(it.tree));
        }
      }
      r.ms_infer = ms_since(t0);

      t0 = Clock::now();
      double delta_sum = 0.0;
      for (auto* group : {&rcv, &src})
        for (auto& t : *group) {
          double d = 0.0;
          t = prune_inferred(t, po.tree_delta_max, po.gap_rule, d, r.tree_edges_pruned, r.tree_prune_residual);
          delta_sum += d;
        }
      r.tree_delta_mean = delta_sum / static_cast<double>(2 * bnd.size());
      trees = TreeCollection::build(bnd, std::move(rcv), std::move(src));
      r.ms_tree_prune = ms_since(t0);
    }

    t0 = Clock::now();
    const ConsistencyResult ic = intrinsic_adjust(trees);
    r.error_bound = ic.error_bound.value_or(0.0);
    r.asymmetry_norm = std::sqrt(2.0 * r.error_bound);
    r.adjustment_sq = ic.adjustment_norm * ic.adjustment_norm;
    Vector w = ic.weights;
    const Matrix a = signed_incidence(trees);
    if (!ic.negative_entries.empty() && po.positivity != PositivityMethod::None) {
      const PositivityResult pr = enforce_positivity(a, w, Vector::Zero(a.rows()), po.positivity);
      w = pr.weights;
      r.positivity_zeroed = pr.zeroed.size();
    }
    trees = trees.with_weights(w);
    r.intrinsic_residual = (a * w).norm();
    r.ms_intrinsic = ms_since(t0);

    t0 = Clock::now();
    const FusedGraph fused = fuse_network(trees, po.tau_factor * r.intrinsic_residual);
    r.tau = fused.tau;
    r.fused_vertices = fused.graph.vertex_count();
    r.fused_edges = fused.graph.edge_count();
    r.fusion_residual = fused.fit_residual;
    r.ms_fuse = ms_since(t0);

    t0 = Clock::now();
    PartialNetworkGraph final_graph = fused.graph;
    if (!po.exact) {
      const auto fw = fused.graph.weights();
      r.final_delta = po.fixed_delta >= 0.0 ? po.fixed_delta : select_pruning_factor(std::span<const double>(fw), po.delta_max, po.gap_rule);
      if (r.final_delta > 0.0) {
        PruneResult pr = prune_by_factor(fused.graph, r.final_delta, {po.positivity, {}});
        r.final_prune_residual = pr.residual;
        final_graph = std::move(pr.graph);
      }
    }
    r.final_edges = final_graph.edge_count();
    r.ms_final_prune = ms_since(t0);

    t0 = Clock::now();
    const TmResult tm = tm_metrics(truth.graph, final_graph, po.identifiable_only ? &truth.identifiable : nullptr);
    r.tm1 = tm.tm1;
    r.tm2 = tm.tm2;
    r.classes = tm.classes;
    r.unmatched = tm.unmatched;
    r.ms_metric = ms_since(t0);
    r.ok = true;
  } catch (const std::exception& e) {
    r.ok = false;
    r.error = e.what();
  }
  return r;
}

std::vector<PointSummary> summarize(const std::vector<RunRecord>& runs) {
  std::vector<PointSummary> out;
  std::vector<double> points;
  for (const auto& r : runs)
    if (std::find(points.begin(), points.end(), r.point) == points.end()) points.push_back(r.point);
  std::sort(points.begin(), points.end());
  for (double p : points) {
    PointSummary s;
    s.point = p;
    std::vector<const RunRecord*> ok;
    for (const auto& r : runs) {
      if (r.point != p) continue;
      ++s.runs;
      if (r.ok)
        ok.push_back(&r);
      else
        ++s.failed;
    }
    if (!ok.empty()) {
      const double n = static_cast<double>(ok.size());
      for (auto* r : ok) {
        s.tm1_mean += r->tm1 / n;
        s.tm2_mean += r->tm2 / n;
        s.gap_mean += std::abs(r->tm1 - r->tm2) / n;
        s.tree_delta_mean += r->tree_delta_mean / n;
        s.final_delta_mean += r->final_delta / n;
      }
      if (ok.size() > 1) {
        for (auto* r : ok) {
          s.tm1_std += (r->tm1 - s.tm1_mean) * (r->tm1 - s.tm1_mean);
          s.tm2_std += (r->tm2 - s.tm2_mean) * (r->tm2 - s.tm2_mean);
        }
        s.tm1_std = std::sqrt(s.tm1_std / (n - 1));
        s.tm2_std = std::sqrt(s.tm2_std / (n - 1));
      }
    }
    out.push_back(s);
  }
  return out;
}

Report run_pipeline(const ExperimentConfig& config) {
  config.validate();
  std::vector<std::pair<double, int>> jobs;
  for (double p : config.sweep_values)
    for (int k = 0; k < config.repetitions; ++k) jobs.emplace_back(p, k);
  Report rep;
  rep.runs.resize(jobs.size());
  const int threads = config.jobs > 0 ? config.jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::size_t j = 0; j < jobs.size(); ++j) rep.runs[j] = run_once(config, jobs[j].first, jobs[j].second);
  rep.summary = summarize(rep.runs);
  return rep;
}

void write_runs_csv(const std::filesystem::path& file, const std::vector<RunRecord>& runs) {
  std::ofstream out(file);
  if (!out) throw TomoError(ErrorKind::Io, "cannot write " + file.string());
  out << std::setprecision(10);
  out << "point,rep,seed,ok,tm1,tm2,classes,unmatched,tree_delta_mean,final_delta,tree_edges_pruned,"
         "tree_prune_residual,asymmetry_norm,error_bound,adjustment_sq,intrinsic_residual,positivity_zeroed,tau,"
         "fused_vertices,fused_edges,fusion_residual,final_edges,final_prune_residual,ms_simulate,ms_infer,"
         "ms_tree_prune,ms_intrinsic,ms_fuse,ms_final_prune,ms_metric,error\n";
  for (const auto& r : runs) {
    std::string err = r.error;
    std::replace(err.begin(), err.end(), '"', '\'');
    out << r.point << "," << r.rep << "," << r.seed << "," << (r.ok ? 1 : 0) << "," << r.tm1 << "," << r.tm2 << ","
        << r.classes << "," << r.unmatched << "," << r.tree_delta_mean << "," << r.final_delta << ","
        << r.tree_edges_pruned << "," << r.tree_prune_residual << "," << r.asymmetry_norm << "," << r.error_bound
        << "," << r.adjustment_sq << "," << r.intrinsic_residual << "," << r.positivity_zeroed << "," << r.tau << ","
        << r.fused_vertices << "," << r.fused_edges << "," << r.fusion_residual << "," << r.final_edges << ","
        << r.final_prune_residual << "," << r.ms_simulate << "," << r.ms_infer << "," << r.ms_tree_prune << ","
        << r.ms_intrinsic << "," << r.ms_fuse << "," << r.ms_final_prune << "," << r.ms_metric << ",\"" << err
        << "\"\n";
  }
}

void write_summary_csv(const std::filesystem::path& file, const std::vector<PointSummary>& summary) {
  std::ofstream out(file);
  if (!out) throw TomoError(ErrorKind::Io, "cannot write " + file.string());
  out << std::setprecision(10);
  out << "point,runs,failed,tm1_mean,tm1_std,tm2_mean,tm2_std,gap_mean,tree_delta_mean,final_delta_mean\n";
  for (const auto& s : summary)
    out << s.point << "," << s.runs << "," << s.failed << "," << s.tm1_mean << "," << s.tm1_std << "," << s.tm2_mean
        << "," << s.tm2_std << "," << s.gap_mean << "," << s.tree_delta_mean << "," << s.final_delta_mean << "\n";
}

}  // namespace tomo
