#include "htsne/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "htsne/error.hpp"

namespace htsne {

DataMatrix::DataMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}

DataMatrix::DataMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) {
    throw InvalidInput("DataMatrix: expected " + std::to_string(rows * cols) +
                       " values, got " + std::to_string(values_.size()));
  }
}

DataMatrix DataMatrix::select_rows(std::span<const std::size_t> indices) const {
  DataMatrix out(indices.size(), cols_);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    if (indices[r] >= rows_) throw InvalidArgument("select_rows: index out of range");
    std::copy_n(values_.begin() + static_cast<std::ptrdiff_t>(indices[r] * cols_), cols_,
                out.values_.begin() + static_cast<std::ptrdiff_t>(r * cols_));
  }
  return out;
}

void validate_data(const DataMatrix& data, std::size_t min_rows) {
  if (data.rows() < min_rows) {
    throw InvalidInput("data must have at least " + std::to_string(min_rows) + " rows, got " +
                       std::to_string(data.rows()));
  }
  if (data.cols() < 1) throw InvalidInput("data must have at least one column");
  const auto& v = data.values();
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!std::isfinite(v[k])) {
      throw InvalidInput("non-finite value at row " + std::to_string(k / data.cols() + 1) +
                         ", column " + std::to_string(k % data.cols() + 1));
    }
  }
}

Embedding::Embedding(std::size_t n, std::vector<double> coords) : coords_(std::move(coords)) {
  if (coords_.size() != 2 * n) {
    throw InvalidInput("Embedding: expected " + std::to_string(2 * n) + " coordinates, got " +
                       std::to_string(coords_.size()));
  }
}

double Embedding::span() const {
  if (coords_.empty()) return 0.0;
  double lo_x = std::numeric_limits<double>::infinity(), hi_x = -lo_x;
  double lo_y = lo_x, hi_y = -lo_x;
  for (std::size_t i = 0; i < size(); ++i) {
    lo_x = std::min(lo_x, x(i));
    hi_x = std::max(hi_x, x(i));
    lo_y = std::min(lo_y, y(i));
    hi_y = std::max(hi_y, y(i));
  }
  return std::max(hi_x - lo_x, hi_y - lo_y);
}

bool Embedding::all_finite() const {
  return std::all_of(coords_.begin(), coords_.end(), [](double v) { return std::isfinite(v); });
}

DataMatrix Embedding::as_matrix() const { return DataMatrix(size(), 2, coords_); }

std::vector<int> distinct_labels(const Labels& labels) {
  std::set<int> seen;
  for (int l : labels) {
    if (l >= 0) seen.insert(l);
  }
  return {seen.begin(), seen.end()};
}

}  // namespace htsne
