#include "hgoe/graphon.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "hgoe/error.hpp"

namespace hgoe {

void Graphon::validate() const {
  if (resolution < 2) throw DataError("graphon: resolution must be >= 2");
  if (matrix.rows() != resolution || matrix.cols() != resolution)
    throw DataError("graphon: matrix shape does not match resolution");
  if (matrix.minCoeff() < 0.0 || matrix.maxCoeff() > 1.0)
    throw DataError("graphon: entries outside [0, 1]");
  if (!matrix.isApprox(matrix.transpose()))
    throw DataError("graphon: matrix not symmetric");
}

Graphon estimate_graphon_usvt(const std::vector<const Graph*>& graphs, int resolution,
                              std::optional<double> svt_coefficient,
                              GraphonAlignment alignment) {
  if (graphs.empty()) throw DataError("usvt: no graphs to estimate from");
  if (resolution < 2) throw DataError("usvt: resolution must be >= 2");
  const int d = resolution;

  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(d, d);
  for (const Graph* g : graphs) {
    const int n = g->node_count;
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    if (alignment == GraphonAlignment::degree_sort) {
      const std::vector<int> deg = g->degrees();
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (deg[static_cast<std::size_t>(a)] != deg[static_cast<std::size_t>(b)])
          return deg[static_cast<std::size_t>(a)] > deg[static_cast<std::size_t>(b)];
        return a < b;
      });
    }
    std::vector<int> slot(static_cast<std::size_t>(n), -1);  // node -> aligned index
    const int keep = std::min(n, d);
    for (int p = 0; p < keep; ++p) slot[static_cast<std::size_t>(order[static_cast<std::size_t>(p)])] = p;
    for (const auto& [a, b] : g->edges) {
      const int pa = slot[static_cast<std::size_t>(a)];
      const int pb = slot[static_cast<std::size_t>(b)];
      if (pa < 0 || pb < 0) continue;
      mean(pa, pb) += 1.0;
      mean(pb, pa) += 1.0;
    }
  }
  mean /= static_cast<double>(graphs.size());

  const double density = mean.sum() / (static_cast<double>(d) * static_cast<double>(d));
  const double coefficient = svt_coefficient.value_or(2.02 * std::sqrt(std::max(density, 0.0)));
  const double threshold = coefficient * std::sqrt(static_cast<double>(d));

  Eigen::BDCSVD<Eigen::MatrixXd> svd(mean, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sigma = svd.singularValues();
  Eigen::MatrixXd rec = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < sigma.size(); ++i) {
    if (sigma[i] < threshold) continue;
    rec.noalias() += sigma[i] * svd.matrixU().col(i) * svd.matrixV().col(i).transpose();
  }

  rec = rec.cwiseMax(0.0).cwiseMin(1.0);
  Graphon out;
  out.resolution = d;
  out.matrix = 0.5 * (rec + rec.transpose());
  return out;
}

Graphon estimate_graphon_usvt(const std::vector<Graph>& graphs, int resolution,
                              std::optional<double> svt_coefficient,
                              GraphonAlignment alignment) {
  std::vector<const Graph*> refs;
  refs.reserve(graphs.size());
  for (const Graph& g : graphs) refs.push_back(&g);
  return estimate_graphon_usvt(refs, resolution, svt_coefficient, alignment);
}

int graphon_resolution(std::vector<int> node_counts, int cap, double percentile) {
  if (node_counts.empty()) throw DataError("graphon_resolution: no node counts");
  std::sort(node_counts.begin(), node_counts.end());
  const auto n = static_cast<double>(node_counts.size());
  auto rank = static_cast<std::size_t>(std::ceil(percentile * n));
  rank = std::min(std::max<std::size_t>(rank, 1), node_counts.size());
  return std::max(2, std::min(cap, node_counts[rank - 1]));
}

Graphon mixup_graphons(const Graphon& a, const Graphon& b, double lambda) {
  if (a.resolution != b.resolution)
    throw DataError("mixup: resolution mismatch (" + std::to_string(a.resolution) + " vs " +
                    std::to_string(b.resolution) + ")");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw DataError("mixup: lambda outside [0, 1]");
  Graphon out;
  out.resolution = a.resolution;
  out.matrix = (lambda * a.matrix + (1.0 - lambda) * b.matrix).cwiseMax(0.0).cwiseMin(1.0);
  return out;
}

int random_size(int n_max, std::uint64_t seed) {
  if (n_max < 2) throw DataError("random_size: n_max must be >= 2");
  Rng rng(Rng::derive(seed, "size"));
  return static_cast<int>(rng.uniform_int(2, n_max));
}

Eigen::MatrixXd downsample_graphon_at(const Graphon& graphon, std::vector<double> latents) {
  const int d = graphon.resolution;
  const int r = static_cast<int>(latents.size());
  if (r < 2 || r > d) throw DataError("downsample: size outside [2, resolution]");
  std::sort(latents.begin(), latents.end());
  std::vector<int> index(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) {
    const auto cell = static_cast<int>(std::ceil(latents[static_cast<std::size_t>(i)] * d));
    index[static_cast<std::size_t>(i)] = std::clamp(cell, 1, d) - 1;
  }
  Eigen::MatrixXd sub(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      sub(i, j) = graphon.matrix(index[static_cast<std::size_t>(i)],
                                 index[static_cast<std::size_t>(j)]);
  return sub;
}

Eigen::MatrixXd downsample_graphon(const Graphon& graphon, int r, Rng& rng) {
  if (r < 2 || r > graphon.resolution) throw DataError("downsample: size outside [2, resolution]");
  std::vector<double> latents(static_cast<std::size_t>(r));
  for (double& u : latents) u = rng.uniform();
  return downsample_graphon_at(graphon, std::move(latents));
}

SampledStructure bernoulli_sample(const Eigen::MatrixXd& probabilities, Rng& rng) {
  const int n = static_cast<int>(probabilities.rows());
  if (probabilities.cols() != n) throw DataError("bernoulli_sample: matrix not square");
  SampledStructure out;
  out.node_count = n;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.uniform() < probabilities(i, j)) out.edges.emplace_back(i, j);
  return out;
}

SampledStructure bernoulli_sample(const Eigen::MatrixXd& probabilities, std::uint64_t seed) {
  Rng rng(Rng::derive(seed, "bernoulli"));
  return bernoulli_sample(probabilities, rng);
}

}  // namespace hgoe
