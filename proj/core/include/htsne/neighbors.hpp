#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "htsne/types.hpp"

namespace htsne {

enum class NeighborMode { Exact, Approximate };

/// K nearest neighbours of every (query) point, closest first.
///
/// Row r holds the neighbours of query point `query(r)`; for a full graph the
/// queries are 0..n-1. Self edges never appear. Ties in distance are broken by
/// the smaller index.
struct NeighborGraph {
  std::size_t k = 0;
  std::vector<std::size_t> queries;
  std::vector<std::uint32_t> ids;
  std::vector<double> distances;

  std::size_t rows() const noexcept { return queries.size(); }
  std::size_t query(std::size_t r) const { return queries[r]; }
  std::span<const std::uint32_t> neighbors(std::size_t r) const {
    return {ids.data() + r * k, k};
  }
  std::span<const double> distances_of(std::size_t r) const {
    return {distances.data() + r * k, k};
  }
};

/// Tuning of the random projection forest used in Approximate mode.
struct ForestConfig {
  int trees = 8;
  /// Maximum points in a leaf; 0 picks max(2K, 32).
  std::size_t leaf_size = 0;
  /// Run one neighbour-of-neighbour pass over the forest candidates.
  bool refine = true;
};

/// K nearest Euclidean neighbours of every row.
/// Throws InvalidArgument if k == 0 or k >= n.
NeighborGraph find_neighbors(const DataMatrix& data, std::size_t k, NeighborMode mode,
                             std::uint64_t seed, const ForestConfig& forest = {});

/// Exact K nearest neighbours of the listed query rows against all rows.
NeighborGraph exact_neighbors(const DataMatrix& data, std::size_t k,
                              std::span<const std::size_t> queries);

/// Fraction of exact neighbours recovered by `approx` (same queries and k).
double neighbor_recall(const NeighborGraph& approx, const NeighborGraph& exact);

}  // namespace htsne
