#pragma once

#include <string>

#include "hgoe/graph.hpp"

namespace hgoe {

// Fallback used when `NAME_node_attributes.txt` is absent.
enum class DefaultFeaturePolicy {
  label_one_hot,  // one-hot of node labels when present, else constant 1
  constant_one,   // always a single constant feature of 1.0
};

DefaultFeaturePolicy feature_policy_from_string(const std::string& name);

// Reads the plain-text TU layout from `directory`:
//   NAME_A.txt               comma-separated 1-based node-id pairs (required)
//   NAME_graph_indicator.txt one 1-based graph id per node line    (required)
//   NAME_node_attributes.txt comma-separated reals per node line   (optional)
//   NAME_node_labels.txt     one integer per node line             (optional)
// Edge lists are symmetrized on read; duplicate edges and self-loops collapse.
GraphDataset load_tu_dataset(const std::string& directory, const std::string& name,
                             DefaultFeaturePolicy policy = DefaultFeaturePolicy::label_one_hot);

}  // namespace hgoe
