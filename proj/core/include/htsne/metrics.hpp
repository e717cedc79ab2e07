#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "htsne/neighbors.hpp"
#include "htsne/types.hpp"

namespace htsne {

struct MetricReport {
  std::map<std::size_t, double> knn_preservation;
  double kl = 0.0;
  std::optional<double> separation;
  std::optional<int> cluster_count;
  std::optional<Labels> cluster_assignments;
};

/// Queries above this count are subsampled in knn_preservation.
inline constexpr std::size_t kKnnQueryCap = 20000;

/// Average over points of |kNN_data(i) ∩ kNN_embedding(i)| / k, with exact
/// neighbour sets in both spaces. When n exceeds `max_queries`, a seeded
/// random subset of that many points is averaged instead.
/// Throws InvalidArgument unless 0 < k < n.
double knn_preservation(const DataMatrix& data, const Embedding& emb, std::size_t k,
                        std::size_t max_queries = kKnnQueryCap, std::uint64_t seed = 0);

/// The same statistic for several k at once, sharing one neighbour search.
std::map<std::size_t, double> knn_preservation(const DataMatrix& data, const Embedding& emb,
                                               const std::vector<std::size_t>& ks,
                                               std::size_t max_queries = kKnnQueryCap,
                                               std::uint64_t seed = 0);

/// Exact k nearest neighbours of points in the plane, using a uniform grid.
/// Same ordering and tie rules as find_neighbors.
NeighborGraph plane_neighbors(const Embedding& emb, std::size_t k,
                              std::span<const std::size_t> queries);
NeighborGraph plane_neighbors(const Embedding& emb, std::size_t k);

/// ||mean_a - mean_b|| divided by the root-mean-square of all within-cluster
/// pairwise distances, pooled over both clusters.
/// Throws InvalidArgument if either cluster has fewer than two points.
double separation_ratio(const Embedding& emb, const Labels& labels, int cluster_a, int cluster_b);

/// separation_ratio averaged over every pair of distinct non-negative labels.
double mean_separation_ratio(const Embedding& emb, const Labels& labels);

struct DbscanResult {
  int cluster_count = 0;
  /// Cluster id per point, -1 for noise. Ids are numbered by the smallest
  /// core point index in each cluster.
  Labels assignments;
  std::size_t noise = 0;
};

/// DBSCAN on planar coordinates. A point is core when at least `min_pts`
/// points (itself included) lie within `eps`. Clusters are the connected
/// components of core points; a border point joins the cluster of its
/// nearest core point, so the partition does not depend on point order.
/// Throws InvalidArgument for non-positive eps or min_pts, or n < min_pts.
DbscanResult dbscan_clusters(const Embedding& emb, double eps, int min_pts);

/// `factor` times the median distance to the k-th nearest neighbour.
double adaptive_eps(const Embedding& emb, std::size_t k = 5, double factor = 2.0);

inline constexpr double kDbscanEps = 0.5;
inline constexpr int kDbscanMinPts = 5;

struct ClusterProfile {
  int label = 0;
  std::size_t size = 0;
  std::vector<double> mean;
};

/// Mean feature vector of each cluster (noise excluded), largest cluster
/// first; equal sizes are ordered by label.
/// Throws InvalidArgument if the assignment count differs from data.rows().
std::vector<ClusterProfile> cluster_mean_profiles(const DataMatrix& data, const Labels& assignments);

}  // namespace htsne
