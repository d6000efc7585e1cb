// Python bindings for the main operations: structural features, graphon
// estimation and sampling, the boundary-aware loss, AUC, and the full
// benchmark experiment.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hgoe/benchmark.hpp"
#include "hgoe/detector.hpp"
#include "hgoe/diffusion.hpp"
#include "hgoe/embedding.hpp"
#include "hgoe/experiment.hpp"
#include "hgoe/graphon.hpp"
#include "hgoe/kmeans.hpp"
#include "hgoe/metrics.hpp"

namespace py = pybind11;
using namespace hgoe;

namespace {

Graph graph_from_parts(int node_count, const std::vector<std::pair<int, int>>& edges,
                       std::optional<Eigen::MatrixXd> features) {
  Graph g;
  g.node_count = node_count;
  g.edges = canonical_edges(node_count, edges);
  g.features = features.has_value() ? std::move(*features)
                                    : Eigen::MatrixXd::Ones(node_count, 1);
  g.validate();
  return g;
}

Graphon graphon_from_matrix(const Eigen::MatrixXd& matrix) {
  Graphon g;
  g.resolution = static_cast<int>(matrix.rows());
  g.matrix = matrix;
  g.validate();
  return g;
}

}  // namespace

PYBIND11_MODULE(_hgoe, m) {
  m.doc() = "hybrid graph outlier exposure: core operations";

  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  m.def(
      "diffusion_features",
      [](int node_count, const std::vector<std::pair<int, int>>& edges, int steps) {
        return diffusion_node_features(node_count, canonical_edges(node_count, edges), steps)
            .matrix;
      },
      py::arg("node_count"), py::arg("edges"), py::arg("steps") = 16,
      "Per-node random-walk return probabilities: row i holds the diagonal of "
      "T^1..T^steps for T = A D^-1.");

  m.def(
      "summary_embedding",
      [](int node_count, const std::vector<std::pair<int, int>>& edges, int d_s,
         int wl_iterations, int wl_dim) {
        EmbeddingConfig config;
        config.d_s = d_s;
        config.wl_iterations = wl_iterations;
        config.wl_dim = wl_dim;
        return graph_summary_embedding(graph_from_parts(node_count, edges, std::nullopt),
                                       config);
      },
      py::arg("node_count"), py::arg("edges"), py::arg("d_s") = 16,
      py::arg("wl_iterations") = 3, py::arg("wl_dim") = 64,
      "Deterministic structural graph embedding (WL histogram, diffusion "
      "pooling, size summaries).");

  m.def(
      "kmeans_labels",
      [](const Eigen::MatrixXd& points, int k, std::uint64_t seed) {
        return kmeans(points, k, seed).labels;
      },
      py::arg("points"), py::arg("k"), py::arg("seed") = 0);

  m.def(
      "estimate_graphon",
      [](const std::vector<std::pair<int, std::vector<std::pair<int, int>>>>& graphs,
         int resolution, std::optional<double> svt_coefficient) {
        std::vector<Graph> parsed;
        parsed.reserve(graphs.size());
        for (const auto& [n, edges] : graphs)
          parsed.push_back(graph_from_parts(n, edges, std::nullopt));
        return estimate_graphon_usvt(parsed, resolution, svt_coefficient).matrix;
      },
      py::arg("graphs"), py::arg("resolution"), py::arg("svt_coefficient") = std::nullopt,
      "USVT step-function estimate from (node_count, edges) pairs.");

  m.def(
      "mixup_graphons",
      [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double lam) {
        return mixup_graphons(graphon_from_matrix(a), graphon_from_matrix(b), lam).matrix;
      },
      py::arg("a"), py::arg("b"), py::arg("lam"));

  m.def(
      "sample_from_graphon",
      [](const Eigen::MatrixXd& matrix, std::uint64_t seed) {
        const Graphon graphon = graphon_from_matrix(matrix);
        Rng rng(Rng::derive(seed, "py-sample"));
        const int r = static_cast<int>(rng.uniform_int(2, graphon.resolution));
        const SampledStructure s = bernoulli_sample(downsample_graphon(graphon, r, rng), rng);
        return std::make_pair(s.node_count, s.edges);
      },
      py::arg("graphon"), py::arg("seed"),
      "Random-size sample: returns (node_count, edges).");

  m.def("boundary_aware_loss", &boundary_aware_loss, py::arg("s"), py::arg("tau"),
        py::arg("l") = 2.0, py::arg("gamma") = 2.0);

  m.def(
      "tau_from_scores",
      [](const std::vector<double>& raw, const std::string& strategy) {
        return tau_from_raw_scores(raw, tau_strategy_from_string(strategy));
      },
      py::arg("raw_scores"), py::arg("strategy") = "min");

  m.def("auc", &auc, py::arg("scores"), py::arg("labels"));

  m.def(
      "mahalanobis_score",
      [](const Eigen::MatrixXd& id_embeddings, const Eigen::MatrixXd& queries, double ridge) {
        return mahalanobis_score(id_embeddings, queries, ridge);
      },
      py::arg("id_embeddings"), py::arg("queries"), py::arg("ridge") = 1e-6);

  m.def(
      "run_sbm_benchmark",
      [](std::vector<std::uint64_t> seeds, int epochs, double beta, int wl_dim) {
        const DatasetBundle bundle = make_sbm_benchmark();
        ExperimentConfig config;
        config.seeds = std::move(seeds);
        config.training.epochs = epochs;
        config.loss.beta = beta;
        config.embedding.wl_dim = wl_dim;
        const ExperimentReport report = run_experiment(config, bundle, "python", 1);
        py::dict out;
        out["mean"] = report.mean;
        out["std"] = report.std_dev;
        py::list per_seed;
        for (const SeedResult& r : report.per_seed) {
          py::dict entry;
          entry["seed"] = r.seed;
          entry["auc"] = r.auc;
          per_seed.append(entry);
        }
        out["per_seed"] = per_seed;
        return out;
      },
      py::arg("seeds") = std::vector<std::uint64_t>{1}, py::arg("epochs") = 20,
      py::arg("beta") = 1.0, py::arg("wl_dim") = 16,
      "Full pipeline on the bundled synthetic benchmark; returns mean/std AUC.");
}
