#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "htsne/types.hpp"

namespace htsne {

struct PcaResult {
  /// n x dims scores of the mean-centred data.
  DataMatrix scores;
  /// D x dims unit-norm principal axes (column c is component c).
  DataMatrix axes;
  /// Variance captured by each component (eigenvalues of the covariance,
  /// normalised by n - 1), descending.
  std::vector<double> variances;
  std::vector<double> mean;
};

/// Top `dims` principal components of the rows of `data`.
///
/// Uses an exact covariance eigendecomposition when D <= 1000 and randomized
/// subspace iteration otherwise. Each axis is signed so that its
/// largest-magnitude entry is positive. Throws InvalidArgument unless
/// 1 <= dims <= min(n, D).
PcaResult principal_components(const DataMatrix& data, std::size_t dims, std::uint64_t seed = 0);

/// Mean-centred projection onto the top `dims` principal axes.
DataMatrix pca_reduce(const DataMatrix& data, std::size_t dims, std::uint64_t seed = 0);

}  // namespace htsne
