#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hgoe/detector.hpp"
#include "hgoe/graphon.hpp"

namespace hgoe {

// Equal-width histogram of normalized scores on [0, 1], one CSV row per bin:
// bin_lo, bin_hi, id_count, ood_count. The upper edge of the last bin is
// inclusive. All records must carry a label.
void export_score_histogram(const std::vector<ScoreRecord>& records, int bins,
                            const std::string& path, const std::string& config_digest = "");

struct GraphonExportMeta {
  std::optional<std::pair<int, int>> source_subgroups;
  std::optional<double> lambda;
  std::string config_digest;
};

// CSV matrix with 6 significant digits plus a companion <stem>.meta.json
// holding resolution and provenance.
void export_graphon_heatmap(const Graphon& graphon, const std::string& path,
                            const GraphonExportMeta& meta = {});
Graphon load_graphon_csv(const std::string& path);

// JSON form: {"resolution": D, "rows": [[...], ...]}.
void save_graphon_json(const Graphon& graphon, const std::string& path);
Graphon load_graphon_json(const std::string& path);

struct SeedResult {
  std::uint64_t seed = 0;
  double auc = 0.0;
  double runtime_seconds = 0.0;
  std::vector<ScoreRecord> records;
};

struct ExperimentReport {
  std::string config_digest;
  std::vector<SeedResult> per_seed;  // sorted by seed
  double mean = 0.0;
  double std_dev = 0.0;  // population standard deviation over seeds
};

ExperimentReport summarize(std::string config_digest, std::vector<SeedResult> per_seed);

// Canonical report: {"config_digest", "per_seed":[{"seed","auc"}], "mean",
// "std"}. Wall-clock timings are written separately (write_timings_json) so
// two runs with the same config and seeds produce byte-identical reports.
void write_report_json(const ExperimentReport& report, const std::string& path);
void write_timings_json(const ExperimentReport& report, const std::string& path);

// Fixed-width human summary; one row per labeled report.
std::string format_summary_table(const std::vector<std::pair<std::string, ExperimentReport>>& rows);

}  // namespace hgoe
