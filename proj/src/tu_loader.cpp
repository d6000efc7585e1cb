#include "hgoe/tu_loader.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "hgoe/error.hpp"

namespace hgoe {
namespace {

namespace fs = std::filesystem;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  return fields;
}

long parse_int(const std::string& token, const std::string& file, std::size_t line_no) {
  long value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw DataError(file + " line " + std::to_string(line_no) + ": expected integer, got '" +
                    token + "'");
  return value;
}

double parse_real(const std::string& token, const std::string& file, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double value = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return value;
  } catch (const std::exception&) {
    throw DataError(file + " line " + std::to_string(line_no) + ": expected real, got '" +
                    token + "'");
  }
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  return lines;
}

}  // namespace

DefaultFeaturePolicy feature_policy_from_string(const std::string& name) {
  if (name == "label_one_hot") return DefaultFeaturePolicy::label_one_hot;
  if (name == "constant_one") return DefaultFeaturePolicy::constant_one;
  throw DataError("unknown feature policy '" + name + "'");
}

GraphDataset load_tu_dataset(const std::string& directory, const std::string& name,
                             DefaultFeaturePolicy policy) {
  const fs::path dir(directory);
  const fs::path edge_path = dir / (name + "_A.txt");
  const fs::path indicator_path = dir / (name + "_graph_indicator.txt");
  const fs::path attr_path = dir / (name + "_node_attributes.txt");
  const fs::path label_path = dir / (name + "_node_labels.txt");

  if (!fs::exists(edge_path)) throw DataError("missing required file: " + edge_path.string());
  if (!fs::exists(indicator_path))
    throw DataError("missing required file: " + indicator_path.string());

  // Node -> graph map. Graph ids keep first-appearance order so splits are
  // reproducible across runs.
  const std::vector<std::string> indicator_lines = read_lines(indicator_path);
  const std::size_t total_nodes = indicator_lines.size();
  if (total_nodes == 0) throw DataError(indicator_path.string() + ": no nodes");

  std::vector<int> node_graph(total_nodes);   // graph index per global node
  std::vector<int> node_local(total_nodes);   // local node index within its graph
  std::map<long, int> graph_index_of;         // raw indicator value -> dense index
  std::vector<int> graph_sizes;
  for (std::size_t i = 0; i < total_nodes; ++i) {
    const long raw = parse_int(trim(indicator_lines[i]), indicator_path.string(), i + 1);
    auto [it, inserted] = graph_index_of.emplace(raw, static_cast<int>(graph_sizes.size()));
    if (inserted) graph_sizes.push_back(0);
    node_graph[i] = it->second;
    node_local[i] = graph_sizes[static_cast<std::size_t>(it->second)]++;
  }
  const int graph_count = static_cast<int>(graph_sizes.size());

  // Edges; the file stores 1-based global node ids. Asymmetric lists are
  // symmetrized and duplicates collapse in canonical_edges.
  std::vector<std::vector<std::pair<int, int>>> edges(static_cast<std::size_t>(graph_count));
  const std::vector<std::string> edge_lines = read_lines(edge_path);
  for (std::size_t i = 0; i < edge_lines.size(); ++i) {
    const std::string line = trim(edge_lines[i]);
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv(line);
    if (fields.size() != 2)
      throw DataError(edge_path.string() + " line " + std::to_string(i + 1) +
                      ": expected 'u, v'");
    const long u = parse_int(fields[0], edge_path.string(), i + 1);
    const long v = parse_int(fields[1], edge_path.string(), i + 1);
    if (u < 1 || v < 1 || u > static_cast<long>(total_nodes) ||
        v > static_cast<long>(total_nodes))
      throw DataError(edge_path.string() + " line " + std::to_string(i + 1) +
                      ": node id out of range");
    const std::size_t gu = static_cast<std::size_t>(u) - 1;
    const std::size_t gv = static_cast<std::size_t>(v) - 1;
    if (node_graph[gu] != node_graph[gv])
      throw DataError(edge_path.string() + " line " + std::to_string(i + 1) +
                      ": edge crosses graph boundary");
    edges[static_cast<std::size_t>(node_graph[gu])].emplace_back(node_local[gu], node_local[gv]);
  }

  // Features: attributes file wins; otherwise fall back per policy.
  Eigen::MatrixXd all_features;
  int feature_dim = 0;
  if (fs::exists(attr_path)) {
    const std::vector<std::string> attr_lines = read_lines(attr_path);
    if (attr_lines.size() != total_nodes)
      throw DataError(attr_path.string() + ": " + std::to_string(attr_lines.size()) +
                      " rows for " + std::to_string(total_nodes) + " nodes");
    for (std::size_t i = 0; i < attr_lines.size(); ++i) {
      const std::vector<std::string> fields = split_csv(trim(attr_lines[i]));
      if (i == 0) {
        feature_dim = static_cast<int>(fields.size());
        if (feature_dim < 1) throw DataError(attr_path.string() + " line 1: empty row");
        all_features.resize(static_cast<Eigen::Index>(total_nodes), feature_dim);
      }
      if (static_cast<int>(fields.size()) != feature_dim)
        throw DataError(attr_path.string() + " line " + std::to_string(i + 1) +
                        ": ragged row (" + std::to_string(fields.size()) + " of " +
                        std::to_string(feature_dim) + " values)");
      for (int j = 0; j < feature_dim; ++j)
        all_features(static_cast<Eigen::Index>(i), j) =
            parse_real(fields[static_cast<std::size_t>(j)], attr_path.string(), i + 1);
    }
  } else if (policy == DefaultFeaturePolicy::label_one_hot && fs::exists(label_path)) {
    const std::vector<std::string> label_lines = read_lines(label_path);
    if (label_lines.size() != total_nodes)
      throw DataError(label_path.string() + ": " + std::to_string(label_lines.size()) +
                      " rows for " + std::to_string(total_nodes) + " nodes");
    std::vector<long> raw(total_nodes);
    std::map<long, int> slot;
    for (std::size_t i = 0; i < total_nodes; ++i) {
      raw[i] = parse_int(trim(label_lines[i]), label_path.string(), i + 1);
      slot.emplace(raw[i], 0);
    }
    int next = 0;
    for (auto& [value, index] : slot) index = next++;
    feature_dim = next;
    all_features = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(total_nodes), feature_dim);
    for (std::size_t i = 0; i < total_nodes; ++i)
      all_features(static_cast<Eigen::Index>(i), slot[raw[i]]) = 1.0;
  } else {
    feature_dim = 1;
    all_features = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(total_nodes), 1);
  }

  GraphDataset dataset;
  dataset.name = name;
  dataset.feature_dim = feature_dim;
  dataset.graphs.resize(static_cast<std::size_t>(graph_count));
  for (int g = 0; g < graph_count; ++g) {
    Graph& graph = dataset.graphs[static_cast<std::size_t>(g)];
    graph.node_count = graph_sizes[static_cast<std::size_t>(g)];
    graph.source_dataset = name;
    graph.graph_id = g;
    graph.features.resize(graph.node_count, feature_dim);
    graph.edges = canonical_edges(graph.node_count, std::move(edges[static_cast<std::size_t>(g)]));
  }
  for (std::size_t i = 0; i < total_nodes; ++i) {
    Graph& graph = dataset.graphs[static_cast<std::size_t>(node_graph[i])];
    graph.features.row(node_local[i]) = all_features.row(static_cast<Eigen::Index>(i));
  }
  dataset.validate();
  return dataset;
}

}  // namespace hgoe
