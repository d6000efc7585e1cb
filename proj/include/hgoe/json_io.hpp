#pragma once

#include <string>

#include "hgoe/graph.hpp"

namespace hgoe {

struct OutlierSet;  // outliers.hpp

// JSON interchange format:
//   {"name": str, "feature_dim": int,
//    "graphs": [{"n": int, "edges": [[i, j], ...], "features": [[...], ...]}, ...]}
// Node ids are 0-based; unknown keys are ignored on read, so outlier-set
// exports (which add an "origin" tag per graph) load as plain datasets.
GraphDataset load_json_dataset(const std::string& path);
void save_json_dataset(const GraphDataset& dataset, const std::string& path);

void save_outlier_set(const OutlierSet& set, const std::string& name, const std::string& path,
                      const std::string& config_digest = "");

}  // namespace hgoe
