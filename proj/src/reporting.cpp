#include "hgoe/reporting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hgoe/error.hpp"

namespace hgoe {

using nlohmann::json;

void export_score_histogram(const std::vector<ScoreRecord>& records, int bins,
                            const std::string& path, const std::string& config_digest) {
  if (bins < 1) throw DataError("histogram: bins must be >= 1");
  std::vector<long> id_count(static_cast<std::size_t>(bins), 0);
  std::vector<long> ood_count(static_cast<std::size_t>(bins), 0);
  for (const ScoreRecord& rec : records) {
    if (!rec.label.has_value())
      throw DataError("histogram: record " + std::to_string(rec.graph_id) + " has no label");
    auto bin = static_cast<int>(std::floor(rec.normalized * bins));
    bin = std::clamp(bin, 0, bins - 1);  // s == 1.0 falls into the last bin
    if (*rec.label == 0)
      ++id_count[static_cast<std::size_t>(bin)];
    else
      ++ood_count[static_cast<std::size_t>(bin)];
  }

  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  if (!config_digest.empty()) out << "# config_digest=" << config_digest << "\n";
  out << "bin_lo,bin_hi,id_count,ood_count\n";
  char buf[40];
  for (int b = 0; b < bins; ++b) {
    std::snprintf(buf, sizeof(buf), "%.10g", static_cast<double>(b) / bins);
    out << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.10g", static_cast<double>(b + 1) / bins);
    out << buf << ',' << id_count[static_cast<std::size_t>(b)] << ','
        << ood_count[static_cast<std::size_t>(b)] << "\n";
  }
}

void export_graphon_heatmap(const Graphon& graphon, const std::string& path,
                            const GraphonExportMeta& meta) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  char buf[40];
  for (int i = 0; i < graphon.resolution; ++i) {
    for (int j = 0; j < graphon.resolution; ++j) {
      std::snprintf(buf, sizeof(buf), "%.6g", graphon.matrix(i, j));
      out << (j == 0 ? "" : ",") << buf;
    }
    out << "\n";
  }
  out.close();

  json doc;
  doc["resolution"] = graphon.resolution;
  if (meta.source_subgroups.has_value())
    doc["source_subgroups"] = json::array({meta.source_subgroups->first,
                                           meta.source_subgroups->second});
  if (meta.lambda.has_value()) doc["lambda"] = *meta.lambda;
  if (!meta.config_digest.empty()) doc["config_digest"] = meta.config_digest;
  std::filesystem::path meta_path(path);
  meta_path.replace_extension(".meta.json");
  std::ofstream meta_out(meta_path);
  if (!meta_out) throw DataError("cannot write " + meta_path.string());
  meta_out << doc.dump(1) << "\n";
}

Graphon load_graphon_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  const int d = static_cast<int>(rows.size());
  Graphon g;
  g.resolution = d;
  g.matrix.resize(d, d);
  for (int i = 0; i < d; ++i) {
    if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != d)
      throw DataError(path + ": row " + std::to_string(i) + " is not square");
    for (int j = 0; j < d; ++j) g.matrix(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return g;
}

void save_graphon_json(const Graphon& graphon, const std::string& path) {
  json doc;
  doc["resolution"] = graphon.resolution;
  json rows = json::array();
  for (int i = 0; i < graphon.resolution; ++i) {
    json row = json::array();
    for (int j = 0; j < graphon.resolution; ++j) row.push_back(graphon.matrix(i, j));
    rows.push_back(std::move(row));
  }
  doc["rows"] = std::move(rows);
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << doc.dump(1) << "\n";
}

Graphon load_graphon_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(path + ": " + e.what());
  }
  Graphon g;
  g.resolution = doc.at("resolution").get<int>();
  const json& rows = doc.at("rows");
  if (static_cast<int>(rows.size()) != g.resolution)
    throw DataError(path + ": row count != resolution");
  g.matrix.resize(g.resolution, g.resolution);
  for (int i = 0; i < g.resolution; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (static_cast<int>(row.size()) != g.resolution)
      throw DataError(path + ": ragged row " + std::to_string(i));
    for (int j = 0; j < g.resolution; ++j)
      g.matrix(i, j) = row[static_cast<std::size_t>(j)].get<double>();
  }
  return g;
}

ExperimentReport summarize(std::string config_digest, std::vector<SeedResult> per_seed) {
  if (per_seed.empty()) throw DataError("report: no successful seeds");
  std::sort(per_seed.begin(), per_seed.end(),
            [](const SeedResult& a, const SeedResult& b) { return a.seed < b.seed; });
  ExperimentReport report;
  report.config_digest = std::move(config_digest);
  report.per_seed = std::move(per_seed);
  double sum = 0.0;
  for (const SeedResult& r : report.per_seed) sum += r.auc;
  report.mean = sum / static_cast<double>(report.per_seed.size());
  double var = 0.0;
  for (const SeedResult& r : report.per_seed) {
    const double d = r.auc - report.mean;
    var += d * d;
  }
  report.std_dev = std::sqrt(var / static_cast<double>(report.per_seed.size()));
  return report;
}

void write_report_json(const ExperimentReport& report, const std::string& path) {
  json doc;
  doc["config_digest"] = report.config_digest;
  json seeds = json::array();
  for (const SeedResult& r : report.per_seed)
    seeds.push_back({{"seed", r.seed}, {"auc", r.auc}});
  doc["per_seed"] = std::move(seeds);
  doc["mean"] = report.mean;
  doc["std"] = report.std_dev;
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << doc.dump(1) << "\n";
}

void write_timings_json(const ExperimentReport& report, const std::string& path) {
  json doc;
  doc["config_digest"] = report.config_digest;
  json seeds = json::array();
  for (const SeedResult& r : report.per_seed)
    seeds.push_back({{"seed", r.seed}, {"runtime_s", r.runtime_seconds}});
  doc["per_seed"] = std::move(seeds);
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << doc.dump(1) << "\n";
}

std::string format_summary_table(
    const std::vector<std::pair<std::string, ExperimentReport>>& rows) {
  std::size_t label_width = 5;
  for (const auto& [label, report] : rows) label_width = std::max(label_width, label.size());
  std::ostringstream out;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-*s  %8s  %8s  %5s  %10s\n",
                static_cast<int>(label_width), "run", "auc_mean", "auc_std", "seeds", "runtime_s");
  out << buf;
  for (const auto& [label, report] : rows) {
    double runtime = 0.0;
    for (const SeedResult& r : report.per_seed) runtime += r.runtime_seconds;
    std::snprintf(buf, sizeof(buf), "%-*s  %8.4f  %8.4f  %5zu  %10.2f\n",
                  static_cast<int>(label_width), label.c_str(), report.mean, report.std_dev,
                  report.per_seed.size(), runtime);
    out << buf;
  }
  return out.str();
}

}  // namespace hgoe
