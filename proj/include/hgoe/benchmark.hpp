#pragma once

#include <cstdint>

#include "hgoe/experiment.hpp"

namespace hgoe {

// Self-contained synthetic benchmark so the full pipeline runs without any
// external data. ID graphs come from two planted-partition subgroups, OOD
// graphs are homogeneous (both blocks at the same density), and the auxiliary
// pool holds Erdos-Renyi graphs with random node features.
struct SbmBenchmarkConfig {
  std::uint64_t seed = 12345;  // fixes the data; run seeds vary splits/training
  int id_count = 200;
  int ood_count = 120;
  int aux_count = 200;
  int feature_dim = 4;
  int min_nodes = 20;
  int max_nodes = 40;
  double subgroup_a_in = 0.6;
  double subgroup_a_out = 0.1;
  double subgroup_b_in = 0.5;
  double subgroup_b_out = 0.05;
  double ood_p = 0.3;
  double aux_p_lo = 0.05;
  double aux_p_hi = 0.5;
};

DatasetBundle make_sbm_benchmark(const SbmBenchmarkConfig& config = {});

}  // namespace hgoe
