#include "tomo/io.hpp"

#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "tomo/errors.hpp"

namespace tomo {

namespace {

Json edge_json(const Edge& e) { return {{"id", e.id}, {"tail", e.tail}, {"head", e.head}, {"weight", e.weight}}; }

Edge edge_from(const Json& j) { return {j.at("id").get<std::string>(), j.at("tail").get<std::string>(), j.at("head").get<std::string>(), j.at("weight").get<double>()}; }

// nlohmann throws its own exceptions; report them as Io
template <class F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw TomoError(ErrorKind::Io, std::string(what) + ": " + e.what());
  }
}

}  // namespace

Json graph_to_json(const PartialNetworkGraph& graph) {
  Json j;
  j["vertices"] = graph.vertices();
  j["boundary"] = graph.boundary();
  j["edges"] = Json::array();
  for (const auto& e : graph.edges()) j["edges"].push_back(edge_json(e));
  j["paths"] = Json::object();
  for (const auto& p : graph.path_specs()) j["paths"][p.source + ">" + p.receiver] = p.edges;
  return j;
}

PartialNetworkGraph graph_from_json(const Json& j, GraphCheck check) {
  return guarded("graph", [&] {
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) edges.push_back(edge_from(e));
    std::vector<PathSpec> paths;
    for (const auto& [key, ids] : j.at("paths").items()) {
      const auto cut = key.find('>');
      if (cut == std::string::npos) throw TomoError(ErrorKind::Io, "path key '" + key + "' is not of the form u>v");
      paths.push_back({key.substr(0, cut), key.substr(cut + 1), ids.get<std::vector<std::string>>()});
    }
    std::vector<VertexId> vertices;
    if (j.contains("vertices")) {
      vertices = j.at("vertices").get<std::vector<std::string>>();
    } else {
      std::set<VertexId> vs;
      for (const auto& e : edges) vs.insert({e.tail, e.head});
      for (const auto& b : j.at("boundary")) vs.insert(b.get<std::string>());
      vertices.assign(vs.begin(), vs.end());
    }
    return PartialNetworkGraph::build(std::move(vertices), std::move(edges),
                                      j.at("boundary").get<std::vector<std::string>>(), std::move(paths), check);
  });
}

Json tree_to_json(const Tree& tree) {
  Json j{{"root", tree.root}, {"orientation", to_string(tree.orientation)}};
  j["edges"] = Json::array();
  for (const auto& e : tree.edges) j["edges"].push_back(edge_json(e));
  j["paths"] = Json::object();
  for (std::size_t l = 0; l < tree.leaves.size(); ++l) {
    std::vector<std::string> ids;
    for (auto e : tree.leaf_paths[l]) ids.push_back(tree.edges[e].id);
    j["paths"][tree.leaves[l]] = ids;
  }
  return j;
}

Tree tree_from_json(const Json& j) {
  return guarded("tree", [&] {
    Tree t;
    t.root = j.at("root").get<std::string>();
    t.orientation = orientation_from_string(j.at("orientation").get<std::string>());
    std::map<EdgeId, std::size_t> index;
    std::set<VertexId> vs{t.root};
    for (const auto& e : j.at("edges")) {
      t.edges.push_back(edge_from(e));
      if (!index.emplace(t.edges.back().id, t.edges.size() - 1).second)
        throw TomoError(ErrorKind::Io, "duplicate tree edge " + t.edges.back().id);
      vs.insert({t.edges.back().tail, t.edges.back().head});
    }
    t.vertices.push_back(t.root);
    for (const auto& v : vs)
      if (v != t.root) t.vertices.push_back(v);
    for (const auto& [leaf, ids] : j.at("paths").items()) {
      t.leaves.push_back(leaf);
      std::vector<std::size_t> path;
      for (const auto& id : ids) {
        auto it = index.find(id.get<std::string>());
        if (it == index.end()) throw TomoError(ErrorKind::Io, "tree path uses unknown edge " + id.get<std::string>());
        path.push_back(it->second);
      }
      t.leaf_paths.push_back(std::move(path));
    }
    t.validate();
    return t;
  });
}

Json trees_to_json(const TreeCollection& trees) {
  Json j{{"boundary", trees.boundary()}, {"trees", Json::array()}};
  for (std::size_t i = 0; i < trees.size(); ++i) j["trees"].push_back(tree_to_json(trees.source(i)));
  for (std::size_t i = 0; i < trees.size(); ++i) j["trees"].push_back(tree_to_json(trees.receiver(i)));
  return j;
}

TreeCollection trees_from_json(const Json& j) {
  return guarded("trees", [&] {
    const auto boundary = j.at("boundary").get<std::vector<std::string>>();
    std::map<VertexId, Tree> src, rcv;
    for (const auto& tj : j.at("trees")) {
      Tree t = tree_from_json(tj);
      auto& slot = t.orientation == Orientation::Source ? src : rcv;
      if (!slot.emplace(t.root, t).second) throw TomoError(ErrorKind::Io, "two " + to_string(t.orientation) + " trees at " + t.root);
    }
    std::vector<Tree> rs, ss;
    for (const auto& b : boundary) {
      if (!src.contains(b) || !rcv.contains(b)) throw TomoError(ErrorKind::Io, "missing tree for boundary vertex " + b);
      rs.push_back(rcv.at(b));
      ss.push_back(src.at(b));
    }
    return TreeCollection::build(boundary, std::move(rs), std::move(ss));
  });
}

Json fused_to_json(const FusedGraph& fused) {
  Json j = graph_to_json(fused.graph);
  j["provenance"] = fused.provenance;
  return j;
}

Json read_json(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw TomoError(ErrorKind::Io, "cannot open " + file.string());
  return guarded("parse", [&] { return Json::parse(in); });
}

void write_json(const std::filesystem::path& file, const Json& j) {
  std::ofstream out(file);
  if (!out) throw TomoError(ErrorKind::Io, "cannot write " + file.string());
  out << j.dump(2) << "\n";
}

void write_series_csv(const std::filesystem::path& file, const PathSeries& s) {
  std::ofstream out(file);
  if (!out) throw TomoError(ErrorKind::Io, "cannot write " + file.string());
  out << "root,leaf,orientation,t_a\n";
  out << s.root << "," << s.leaf << "," << to_string(s.orientation) << "," << s.window_length << "\n";
  out << std::setprecision(17);
  for (double v : s.values) out << v << "\n";
}

PathSeries read_series_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw TomoError(ErrorKind::Io, "cannot open " + file.string());
  std::string line;
  std::getline(in, line);
  if (line != "root,leaf,orientation,t_a") throw TomoError(ErrorKind::Io, "unexpected series header in " + file.string());
  std::getline(in, line);
  std::stringstream meta(line);
  std::string root, leaf, orient, ta;
  std::getline(meta, root, ',');
  std::getline(meta, leaf, ',');
  std::getline(meta, orient, ',');
  std::getline(meta, ta, ',');
  PathSeries s;
  s.root = root;
  s.leaf = leaf;
  s.orientation = orientation_from_string(orient);
  try {
    s.window_length = std::stod(ta);
    while (std::getline(in, line))
      if (!line.empty()) s.values.push_back(std::stod(line));
  } catch (const std::exception&) {
    throw TomoError(ErrorKind::Io, "bad number in " + file.string());
  }
  return s;
}

}  // namespace tomo
