// tomo: command line front end.
//
//   tomo run --config exp.toml --out results/ [--jobs N] [--seed S]
//   tomo selftest
//   tomo metric --true a.json --inferred b.json
//   tomo adjust --trees trees.json [--out adjusted.json]
//   tomo prune --graph g.json --delta 0.05 [--out pruned.json]

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <iostream>

#include "tomo/consistency.hpp"
#include "tomo/errors.hpp"
#include "tomo/evalmetric.hpp"
#include "tomo/io.hpp"
#include "tomo/pipeline.hpp"
#include "tomo/pruning.hpp"

namespace {

using namespace tomo;

int selftest() {
  int failures = 0;
  auto check = [&](const char* name, bool ok) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << "\n";
    failures += !ok;
  };

  // four crossing paths whose targets cannot all be met
  {
    std::vector<Edge> e{{"e1", "b1", "x", 10}, {"e2", "b2", "x", 10}, {"e3", "x", "b3", 10}, {"e4", "x", "b4", 10}};
    auto g = PartialNetworkGraph::build({"b1", "b2", "b3", "b4", "x"}, e, {"b1", "b2", "b3", "b4"},
                                        {{"b1", "b3", {"e1", "e3"}},
                                         {"b2", "b3", {"e2", "e3"}},
                                         {"b1", "b4", {"e1", "e4"}},
                                         {"b2", "b4", {"e2", "e4"}}});
    TargetWeights z;
    z.values = {{{"b1", "b3"}, 22}, {{"b2", "b3"}, 21}, {{"b1", "b4"}, 21}, {{"b2", "b4"}, 22}};
    const auto r = extrinsic_adjust(g, z);
    bool ok = true;
    for (Eigen::Index i = 0; i < r.weights.size(); ++i) ok = ok && std::abs(r.weights[i] - 10.75) < 1e-9;
    check("crossing paths: least-squares weights 10.75", ok);
  }

  // 3-star: hub edge first in every tree, then the boundary edges alphabetically
  {
    const std::vector<std::string> b{"a", "b", "c"};
    std::vector<Tree> rs, ss;
    for (const auto& root : b) {
      for (Orientation o : {Orientation::Receiver, Orientation::Source}) {
        Tree t;
        t.root = root;
        t.orientation = o;
        t.vertices = {root, "h"};
        const bool src = o == Orientation::Source;
        t.edges.push_back(src ? Edge{"1", root, "h", 1.0} : Edge{"1", "h", root, 1.0});
        for (const auto& x : b) {
          if (x == root) continue;
          t.vertices.push_back(x);
          t.edges.push_back(src ? Edge{x, "h", x, 1.0} : Edge{x, x, "h", 1.0});
          t.leaves.push_back(x);
          t.leaf_paths.push_back(src ? std::vector<std::size_t>{0, t.edges.size() - 1}
                                     : std::vector<std::size_t>{t.edges.size() - 1, 0});
        }
        (src ? ss : rs).push_back(std::move(t));
      }
    }
    const auto trees = TreeCollection::build(b, rs, ss);
    Vector w = trees.weights();
    const double eps = 1.0;
    w[0] += eps;
    const auto r = intrinsic_adjust(trees.with_weights(w));
    const double expect[18] = {52, -19, -19, 4, -1, 5, 4, -1, 5, 2, 1, 1, 14, 19, -5, 14, 19, -5};
    bool ok = true;
    for (int i = 0; i < 18; ++i) ok = ok && std::abs(r.weights[i] - (1.0 + eps * expect[i] / 90.0)) < 1e-9;
    check("3-star: intrinsic adjustment", ok);
    const Matrix a = signed_incidence(trees);
    check("3-star: smallest eigenvalue of AA' is 2", std::abs(smallest_eigenvalue(a * a.transpose()) - 2.0) < 1e-9);
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"consistent edge weights for network tomography"};
  app.require_subcommand(1);

  std::string config_file, out_dir = "results";
  int jobs = 0;
  long long seed = -1;
  auto* run = app.add_subcommand("run", "run an experiment sweep");
  run->add_option("--config", config_file, "experiment TOML")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--jobs", jobs, "worker threads (0: all)");
  run->add_option("--seed", seed, "override the base seed");

  app.add_subcommand("selftest", "check the built-in worked examples");

  std::string true_file, inferred_file;
  auto* metric = app.add_subcommand("metric", "TM1 / TM2 of an inferred graph");
  metric->add_option("--true", true_file)->required()->check(CLI::ExistingFile);
  metric->add_option("--inferred", inferred_file)->required()->check(CLI::ExistingFile);

  std::string trees_file, out_file;
  auto* adjust = app.add_subcommand("adjust", "intrinsic adjustment of a tree collection");
  adjust->add_option("--trees", trees_file)->required()->check(CLI::ExistingFile);
  adjust->add_option("--out", out_file, "write the adjusted trees here");

  std::string graph_file;
  double delta = 0.0;
  auto* prune = app.add_subcommand("prune", "prune a graph and redistribute weights");
  prune->add_option("--graph", graph_file)->required()->check(CLI::ExistingFile);
  prune->add_option("--delta", delta, "pruning factor; negative selects one")->required();
  prune->add_option("--out", out_file, "write the pruned graph here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("selftest")) return selftest();

    if (app.got_subcommand(run)) {
      ExperimentConfig cfg = load_config(config_file);
      if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
      if (jobs > 0) cfg.jobs = jobs;
      std::filesystem::create_directories(out_dir);
      const Report rep = run_pipeline(cfg);
      write_runs_csv(std::filesystem::path(out_dir) / "runs.csv", rep.runs);
      write_summary_csv(std::filesystem::path(out_dir) / "summary.csv", rep.summary);
      for (const auto& s : rep.summary)
        std::cout << to_string(cfg.axis) << "=" << s.point << " tm1=" << s.tm1_mean << " tm2=" << s.tm2_mean
                  << " failed=" << s.failed << "/" << s.runs << "\n";
      return 0;
    }

    if (app.got_subcommand(metric)) {
      const auto g = graph_from_json(read_json(true_file), GraphCheck::Structural);
      const auto h = graph_from_json(read_json(inferred_file), GraphCheck::Structural);
      const TmResult r = tm_metrics(g, h);
      std::cout << "tm1," << r.tm1 << "\ntm2," << r.tm2 << "\nclasses," << r.classes << "\nunmatched," << r.unmatched << "\n";
      return 0;
    }

    if (app.got_subcommand(adjust)) {
      const TreeCollection trees = trees_from_json(read_json(trees_file));
      const ConsistencyResult r = intrinsic_adjust(trees);
      std::cout << "asymmetry," << std::sqrt(2.0 * r.error_bound.value_or(0.0)) << "\nadjustment," << r.adjustment_norm
                << "\nbound," << std::sqrt(r.error_bound.value_or(0.0)) << "\nnegative," << r.negative_entries.size()
                << "\n";
      if (!out_file.empty()) write_json(out_file, trees_to_json(trees.with_weights(r.weights)));
      return 0;
    }

    if (app.got_subcommand(prune)) {
      const auto g = graph_from_json(read_json(graph_file), GraphCheck::Structural);
      const double d = delta < 0.0 ? select_pruning_factor(g) : delta;
      const PruneResult r = prune_by_factor(g, d, {PositivityMethod::Naive, {}});
      std::cout << "delta," << d << "\npruned," << r.pruned.size() << "\nresidual," << r.residual << "\n";
      if (!out_file.empty()) write_json(out_file, graph_to_json(r.graph));
      return 0;
    }
  } catch (const TomoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
