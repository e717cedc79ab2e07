#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace htsne {

/// Per-point integer class labels. Negative values mean "unlabelled" or noise.
using Labels = std::vector<int>;

/// Interleaved (x0, y0, x1, y1, ...) per-point 2-D vectors.
using Forces = std::vector<double>;

/// Dense row-major matrix; rows are samples, columns are features.
class DataMatrix {
 public:
  DataMatrix() = default;
  DataMatrix(std::size_t rows, std::size_t cols);
  DataMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) { return {values_.data() + i * cols_, cols_}; }

  double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }

  const std::vector<double>& values() const noexcept { return values_; }
  std::vector<double>& values() noexcept { return values_; }

  /// Rows selected by `indices`, in that order.
  DataMatrix select_rows(std::span<const std::size_t> indices) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// Throws InvalidInput unless the matrix has at least `min_rows` rows, one
/// column, and only finite entries.
void validate_data(const DataMatrix& data, std::size_t min_rows = 2);

/// Low-dimensional coordinates y_i of n points in the plane.
class Embedding {
 public:
  Embedding() = default;
  explicit Embedding(std::size_t n) : coords_(2 * n, 0.0) {}
  Embedding(std::size_t n, std::vector<double> coords);

  std::size_t size() const noexcept { return coords_.size() / 2; }

  double x(std::size_t i) const { return coords_[2 * i]; }
  double y(std::size_t i) const { return coords_[2 * i + 1]; }
  double& x(std::size_t i) { return coords_[2 * i]; }
  double& y(std::size_t i) { return coords_[2 * i + 1]; }

  std::span<const double> coords() const noexcept { return coords_; }
  std::span<double> coords() noexcept { return coords_; }

  /// Optimiser iteration that produced these coordinates.
  int generation = 0;

  /// Largest extent of the bounding box over both axes.
  double span() const;

  bool all_finite() const;

  /// The coordinates as an n x 2 data matrix.
  DataMatrix as_matrix() const;

  friend bool operator==(const Embedding& a, const Embedding& b) {
    return a.coords_ == b.coords_;
  }

 private:
  std::vector<double> coords_;
};

/// Distinct label values in ascending order, ignoring negatives.
std::vector<int> distinct_labels(const Labels& labels);

}  // namespace htsne
