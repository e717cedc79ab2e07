#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "htsne/neighbors.hpp"
#include "htsne/types.hpp"

namespace htsne {

/// Bandwidth search settings. The bracket is relative to the largest distance
/// in the row.
struct CalibrationConfig {
  double lower_factor = 1e-10;
  double upper_factor = 1e4;
  int max_iterations = 200;
  double relative_tolerance = 1e-5;
};

struct CalibrationResult {
  double sigma = 1.0;
  std::vector<double> row;    // p_{j|i}, sums to 1
  double perplexity = 0.0;    // achieved
  bool warning = false;       // target not reached within the bracket
};

/// exp(-sum p log p) of a probability row (0 log 0 := 0).
double row_perplexity(std::span<const double> row);

/// Finds sigma such that the Gaussian row exp(-d^2 / 2 sigma^2), normalised,
/// has the requested perplexity. Bisection on log sigma.
///
/// If every distance is equal the row is uniform for every sigma; the result
/// is that uniform row, flagged with a warning unless the target equals the
/// row length. Throws InvalidArgument for an empty row, a non-positive
/// target, or negative distances.
CalibrationResult calibrate_bandwidth(std::span<const double> distances, double perplexity,
                                      const CalibrationConfig& config = {});

/// Per-point calibrated rows p_{j|i} over a neighbour graph.
struct ConditionalAffinity {
  NeighborGraph graph;
  std::vector<double> values;        // same layout as graph.ids
  std::vector<double> sigmas;
  std::vector<double> perplexities;  // achieved per row
  std::size_t warning_rows = 0;
  double target_perplexity = 0.0;

  std::span<const double> row(std::size_t r) const {
    return {values.data() + r * graph.k, graph.k};
  }
};

/// Symmetric sparse matrix of p_ij in CSR form. Both (i,j) and (j,i) are
/// stored; diagonal entries are absent.
class SparseAffinity {
 public:
  SparseAffinity() = default;
  SparseAffinity(std::size_t n, std::vector<std::size_t> row_ptr, std::vector<std::uint32_t> cols,
                 std::vector<double> vals);

  std::size_t size() const noexcept { return n_; }
  std::size_t nonzeros() const noexcept { return vals_.size(); }

  std::span<const std::uint32_t> cols(std::size_t i) const {
    return {cols_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }
  std::span<const double> vals(std::size_t i) const {
    return {vals_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }

  /// Value of p_ij, 0 when absent.
  double at(std::size_t i, std::size_t j) const;
  double total() const;
  /// True when every stored p_ij has a bitwise-equal p_ji.
  bool is_symmetric() const;
  /// sum p_ij log p_ij over stored entries.
  double entropy_term() const;

  /// Diagnostics collected while building (calibration warnings and the like).
  std::vector<std::string> warnings;

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::uint32_t> cols_;
  std::vector<double> vals_;
};

struct AffinityOptions {
  NeighborMode mode = NeighborMode::Exact;
  std::uint64_t seed = 0;
  /// Neighbours per point; defaults to 3 * ceil(perplexity), clamped to n - 1.
  std::optional<std::size_t> neighbors;
  ForestConfig forest;
  CalibrationConfig calibration;
};

/// Neighbour count used for a given perplexity and point count.
std::size_t affinity_neighbors(double perplexity, std::size_t n);

ConditionalAffinity conditional_affinities(const DataMatrix& data, double perplexity,
                                           const AffinityOptions& options = {});

/// p_ij = (p_{j|i} + p_{i|j}) / 2n.
SparseAffinity symmetrize(const ConditionalAffinity& conditional);

SparseAffinity build_affinities(const DataMatrix& data, double perplexity,
                                const AffinityOptions& options = {});

SparseAffinity build_affinities(const DataMatrix& data, double perplexity, NeighborMode mode,
                                std::uint64_t seed);

}  // namespace htsne
