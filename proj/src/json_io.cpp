#include "hgoe/json_io.hpp"

#include <fstream>

#include <json.hpp>

#include "hgoe/error.hpp"
#include "hgoe/outliers.hpp"

namespace hgoe {
namespace {

using nlohmann::json;

json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(path + ": " + e.what());
  }
}

Graph graph_from_json(const json& jg, int feature_dim, int graph_id, const std::string& path) {
  const std::string where = path + ": graphs[" + std::to_string(graph_id) + "]";
  if (!jg.contains("n") || !jg["n"].is_number_integer())
    throw DataError(where + ": missing integer field 'n'");
  Graph g;
  g.node_count = jg["n"].get<int>();
  g.graph_id = graph_id;
  if (g.node_count < 1) throw DataError(where + ": n must be >= 1");
  if (jg.contains("source_dataset")) g.source_dataset = jg["source_dataset"].get<std::string>();

  std::vector<std::pair<int, int>> edges;
  for (const json& je : jg.value("edges", json::array())) {
    if (!je.is_array() || je.size() != 2)
      throw DataError(where + ": edge must be a pair of node ids");
    const int a = je[0].get<int>();
    const int b = je[1].get<int>();
    if (a < 0 || b < 0 || a >= g.node_count || b >= g.node_count)
      throw DataError(where + ": edge index out of range [0, " +
                      std::to_string(g.node_count) + ")");
    edges.emplace_back(a, b);
  }
  g.edges = canonical_edges(g.node_count, std::move(edges));

  const json& jf = jg.value("features", json::array());
  if (static_cast<int>(jf.size()) != g.node_count)
    throw DataError(where + ": " + std::to_string(jf.size()) + " feature rows for " +
                    std::to_string(g.node_count) + " nodes");
  g.features.resize(g.node_count, feature_dim);
  for (int i = 0; i < g.node_count; ++i) {
    const json& row = jf[static_cast<std::size_t>(i)];
    if (static_cast<int>(row.size()) != feature_dim)
      throw DataError(where + ": ragged feature row " + std::to_string(i) + " (" +
                      std::to_string(row.size()) + " of " + std::to_string(feature_dim) +
                      " values)");
    for (int j = 0; j < feature_dim; ++j)
      g.features(i, j) = row[static_cast<std::size_t>(j)].get<double>();
  }
  return g;
}

json graph_to_json(const Graph& g) {
  json jg;
  jg["n"] = g.node_count;
  json edges = json::array();
  for (const auto& [a, b] : g.edges) edges.push_back(json::array({a, b}));
  jg["edges"] = std::move(edges);
  json rows = json::array();
  for (int i = 0; i < g.node_count; ++i) {
    json row = json::array();
    for (int j = 0; j < g.feature_dim(); ++j) row.push_back(g.features(i, j));
    rows.push_back(std::move(row));
  }
  jg["features"] = std::move(rows);
  if (!g.source_dataset.empty()) jg["source_dataset"] = g.source_dataset;
  return jg;
}

void write_json(const json& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << doc.dump(1) << "\n";
}

}  // namespace

GraphDataset load_json_dataset(const std::string& path) {
  const json doc = parse_file(path);
  if (!doc.contains("feature_dim")) throw DataError(path + ": missing 'feature_dim'");
  GraphDataset dataset;
  dataset.name = doc.value("name", std::string{});
  dataset.feature_dim = doc["feature_dim"].get<int>();
  if (dataset.feature_dim < 1) throw DataError(path + ": feature_dim must be >= 1");
  int graph_id = 0;
  for (const json& jg : doc.value("graphs", json::array())) {
    Graph g = graph_from_json(jg, dataset.feature_dim, graph_id++, path);
    if (g.source_dataset.empty()) g.source_dataset = dataset.name;
    dataset.graphs.push_back(std::move(g));
  }
  dataset.validate();
  return dataset;
}

void save_json_dataset(const GraphDataset& dataset, const std::string& path) {
  json doc;
  doc["name"] = dataset.name;
  doc["feature_dim"] = dataset.feature_dim;
  json graphs = json::array();
  for (const Graph& g : dataset.graphs) graphs.push_back(graph_to_json(g));
  doc["graphs"] = std::move(graphs);
  write_json(doc, path);
}

void save_outlier_set(const OutlierSet& set, const std::string& name, const std::string& path,
                      const std::string& config_digest) {
  json doc;
  doc["name"] = name;
  doc["feature_dim"] = set.graphs.empty() ? 1 : set.graphs.front().feature_dim();
  if (!config_digest.empty()) doc["config_digest"] = config_digest;
  json graphs = json::array();
  for (std::size_t i = 0; i < set.graphs.size(); ++i) {
    json jg = graph_to_json(set.graphs[i]);
    jg["origin"] = set.origins[i] == OutlierOrigin::external ? "external" : "internal";
    graphs.push_back(std::move(jg));
  }
  doc["graphs"] = std::move(graphs);
  write_json(doc, path);
}

}  // namespace hgoe
