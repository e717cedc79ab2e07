#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "htsne/affinity.hpp"
#include "htsne/gradient.hpp"
#include "htsne/interpolation.hpp"
#include "htsne/kernel.hpp"
#include "htsne/optimizer.hpp"
#include "htsne/types.hpp"

namespace htsne {

struct LabeledData {
  DataMatrix data;
  Labels labels;
  /// Finer ground truth where the generator has one (dumbbell halves).
  Labels sub_labels;
};

/// `n_classes` Gaussian blobs N(offset * e_i, I_dim), `n_per_class` points
/// each, stored class by class. Throws InvalidArgument if n_classes > dim.
LabeledData gen_gaussian_clusters(std::size_t n_per_class = 100, std::size_t n_classes = 10,
                                  std::size_t dim = 10, double offset = 4.0, std::uint64_t seed = 0);

/// Ten 20-dimensional classes of 100 points whose first 50 points are shifted
/// by +2 e_{10+i} and the remaining 50 by -2 e_{10+i}. Sub-labels are 2i for
/// the shifted-up half and 2i + 1 for the other.
LabeledData gen_dumbbells(std::uint64_t seed = 0);

/// Two 10-dimensional standard Gaussian clusters of 100 points with means
/// 5 e_0 and 5 e_1, so the centroids are 5 sqrt(2) apart.
LabeledData gen_two_clusters(std::uint64_t seed = 0);

/// Embedding distances that equalise the two-cluster affinity ratio c under a
/// kernel with tail parameter alpha.
struct SeparationPrediction {
  /// sqrt((alpha + d_b^2) / (alpha + d_w^2)) = c^(-1/(2 alpha)).
  double ratio = 1.0;
  double d_b = 0.0;
};

/// Throws InvalidArgument unless alpha > 0, 0 < c < 1 and d_w >= 0.
SeparationPrediction predicted_separation(double alpha, double c, double d_w);

/// Idealised two-cluster data set with all within-cluster distances D_w and
/// all between-cluster distances D_b, calibrated at the given perplexity.
struct TheoryCase {
  double D_w = 1.0;
  double D_b = 2.0;
  std::size_t n_per_cluster = 100;
  double perplexity = 50.0;
  /// Symmetric affinities of a within- and a between-cluster pair.
  double p_w = 0.0;
  double p_b = 0.0;
  /// K(D_b) / K(D_w) for the calibrated Gaussian kernel K.
  double c = 0.0;
};

/// Throws InvalidArgument unless D_b > D_w > 0, n_per_cluster >= 2 and
/// n_per_cluster - 1 < perplexity < 2 n_per_cluster - 1.
TheoryCase make_theory_case(double D_w, double D_b, std::size_t n_per_cluster, double perplexity);

struct SweepConfig {
  double perplexity = 50.0;
  OptimizerConfig optimizer;
  InterpConfig interp;
  /// Exact for n <= 2000 and Accelerated above, unless set.
  std::optional<Solver> solver;
  InitMode init = InitMode::Pca;
  NeighborMode neighbors = NeighborMode::Exact;
  std::vector<std::size_t> knn_ks{10};
  int dbscan_min_pts = 5;
  double fixed_eps = 0.5;
  bool keep_embeddings = false;
};

inline constexpr std::size_t kSweepExactLimit = 2000;

struct SweepRow {
  double alpha = 1.0;
  /// Mean over class pairs; NaN without at least two labelled classes.
  double separation_ratio = 0.0;
  double kl = 0.0;
  std::map<std::size_t, double> knn_preservation;
  double adaptive_eps = 0.0;
  int cluster_count = 0;
  int cluster_count_fixed_eps = 0;
  double span = 0.0;
  double wall_time_seconds = 0.0;
  std::vector<std::string> warnings;
  std::optional<Embedding> embedding;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  Solver solver = Solver::Exact;
  std::vector<std::string> warnings;
};

/// One optimisation per alpha from a shared affinity matrix and a shared
/// initial embedding. Rows keep the order of `alphas`.
SweepResult sweep_alpha(const DataMatrix& data, const Labels& labels, const std::vector<double>& alphas,
                        const SweepConfig& config = {});

/// CSV table with header
/// alpha,separation_ratio,kl,knn_<k>...,adaptive_eps,cluster_count,cluster_count_fixed_eps,span,wall_time_seconds
std::string sweep_csv(const SweepResult& result);

/// Parses "a,b,c" or "start:stop:step" (inclusive, with rounding tolerance).
std::vector<double> parse_alpha_list(const std::string& text);

}  // namespace htsne
