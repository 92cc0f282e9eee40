#pragma once

// JSON and CSV formats used by the command line tool.
//
// graph:  {"vertices": [...], "boundary": [...],
//          "edges": [{"id","tail","head","weight"}], "paths": {"u>v": [edge ids]}}
// trees:  {"boundary": [...], "trees": [{"root","orientation","edges": [...],
//          "paths": {"leaf": [edge ids, travel order]}}]}
// series: CSV with header root,leaf,orientation,t_a then one value per window.

#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "tomo/consistency.hpp"
#include "tomo/fusion.hpp"
#include "tomo/inference.hpp"
#include "tomo/netgraph.hpp"

namespace tomo {

using Json = nlohmann::json;

Json graph_to_json(const PartialNetworkGraph& graph);
PartialNetworkGraph graph_from_json(const Json& j, GraphCheck check = GraphCheck::Full);

Json tree_to_json(const Tree& tree);
Tree tree_from_json(const Json& j);

Json trees_to_json(const TreeCollection& trees);
TreeCollection trees_from_json(const Json& j);

/// Graph JSON plus "provenance": {vertex: [tree vertices]}.
Json fused_to_json(const FusedGraph& fused);

Json read_json(const std::filesystem::path& file);
void write_json(const std::filesystem::path& file, const Json& j);

/// One series per file.
void write_series_csv(const std::filesystem::path& file, const PathSeries& s);
PathSeries read_series_csv(const std::filesystem::path& file);

}  // namespace tomo
