#include "htsne/affinity.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "htsne/error.hpp"

namespace htsne {

namespace {

// Normalised Gaussian row for bandwidth sigma, plus its perplexity. Exponents
// are shifted by the smallest distance so the largest weight is exactly 1.
double gaussian_row(std::span<const double> distances, double d2_min, double sigma,
                    std::vector<double>& row) {
  const double inv_two_var = 1.0 / (2.0 * sigma * sigma);
  double sum = 0.0;
  double weighted = 0.0;
  for (std::size_t j = 0; j < distances.size(); ++j) {
    const double t = (distances[j] * distances[j] - d2_min) * inv_two_var;
    const double e = std::exp(-t);
    row[j] = e;
    sum += e;
    weighted += e * t;
  }
  for (double& p : row) p /= sum;
  return std::exp(std::log(sum) + weighted / sum);
}

}  // namespace

double row_perplexity(std::span<const double> row) {
  double h = 0.0;
  for (double p : row) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return std::exp(h);
}

CalibrationResult calibrate_bandwidth(std::span<const double> distances, double perplexity,
                                      const CalibrationConfig& config) {
  if (distances.empty()) throw InvalidArgument("calibrate_bandwidth: empty distance row");
  if (!std::isfinite(perplexity) || perplexity <= 0.0) {
    throw InvalidArgument("perplexity must be positive, got " + std::to_string(perplexity));
  }
  double d_min = distances.front();
  double d_max = distances.front();
  for (double d : distances) {
    if (!std::isfinite(d) || d < 0.0) {
      throw InvalidArgument("calibrate_bandwidth: distances must be finite and nonnegative");
    }
    d_min = std::min(d_min, d);
    d_max = std::max(d_max, d);
  }

  CalibrationResult result;
  result.row.assign(distances.size(), 0.0);
  const double tolerance = config.relative_tolerance * perplexity;

  if (d_max == d_min) {
    std::fill(result.row.begin(), result.row.end(), 1.0 / static_cast<double>(distances.size()));
    result.sigma = d_max > 0.0 ? d_max : 1.0;
    result.perplexity = row_perplexity(result.row);
    result.warning = std::abs(result.perplexity - perplexity) >= tolerance;
    return result;
  }

  const double d2_min = d_min * d_min;
  double log_lo = std::log(config.lower_factor * d_max);
  double log_hi = std::log(config.upper_factor * d_max);

  const double perp_hi = gaussian_row(distances, d2_min, std::exp(log_hi), result.row);
  if (perp_hi < perplexity - tolerance) {
    result.sigma = std::exp(log_hi);
    result.perplexity = perp_hi;
    result.warning = true;
    return result;
  }
  const double perp_lo = gaussian_row(distances, d2_min, std::exp(log_lo), result.row);
  if (perp_lo > perplexity + tolerance) {
    result.sigma = std::exp(log_lo);
    result.perplexity = perp_lo;
    result.warning = true;
    return result;
  }

  result.warning = true;
  for (int it = 0; it < config.max_iterations; ++it) {
    const double log_mid = 0.5 * (log_lo + log_hi);
    result.sigma = std::exp(log_mid);
    result.perplexity = gaussian_row(distances, d2_min, result.sigma, result.row);
    if (std::abs(result.perplexity - perplexity) < tolerance) {
      result.warning = false;
      break;
    }
    if (result.perplexity < perplexity) {
      log_lo = log_mid;
    } else {
      log_hi = log_mid;
    }
  }
  return result;
}

SparseAffinity::SparseAffinity(std::size_t n, std::vector<std::size_t> row_ptr,
                               std::vector<std::uint32_t> cols, std::vector<double> vals)
    : n_(n), row_ptr_(std::move(row_ptr)), cols_(std::move(cols)), vals_(std::move(vals)) {
  if (row_ptr_.size() != n_ + 1 || cols_.size() != vals_.size() || row_ptr_.back() != vals_.size()) {
    throw InvalidInput("SparseAffinity: inconsistent CSR arrays");
  }
  for (std::size_t i = 0; i < n_; ++i) {
    for (auto j : this->cols(i)) {
      if (j >= n_ || j == i) throw InvalidInput("SparseAffinity: bad column index");
    }
  }
}

double SparseAffinity::at(std::size_t i, std::size_t j) const {
  const auto c = cols(i);
  const auto it = std::lower_bound(c.begin(), c.end(), static_cast<std::uint32_t>(j));
  if (it == c.end() || *it != j) return 0.0;
  return vals(i)[static_cast<std::size_t>(it - c.begin())];
}

double SparseAffinity::total() const {
  double s = 0.0;
  for (double v : vals_) s += v;
  return s;
}

bool SparseAffinity::is_symmetric() const {
  for (std::size_t i = 0; i < n_; ++i) {
    const auto c = cols(i);
    const auto v = vals(i);
    for (std::size_t t = 0; t < c.size(); ++t) {
      if (at(c[t], i) != v[t]) return false;
    }
  }
  return true;
}

double SparseAffinity::entropy_term() const {
  double s = 0.0;
  for (double v : vals_) {
    if (v > 0.0) s += v * std::log(v);
  }
  return s;
}

std::size_t affinity_neighbors(double perplexity, std::size_t n) {
  if (!std::isfinite(perplexity) || perplexity <= 0.0) {
    throw InvalidArgument("perplexity must be positive, got " + std::to_string(perplexity));
  }
  if (n < 2) throw InvalidInput("need at least two points to build affinities");
  const double wanted = 3.0 * std::ceil(perplexity);
  return static_cast<std::size_t>(std::min(wanted, static_cast<double>(n - 1)));
}

ConditionalAffinity conditional_affinities(const DataMatrix& data, double perplexity,
                                           const AffinityOptions& options) {
  validate_data(data);
  const std::size_t n = data.rows();
  const std::size_t k = options.neighbors ? *options.neighbors : affinity_neighbors(perplexity, n);

  ConditionalAffinity out;
  out.target_perplexity = perplexity;
  out.graph = find_neighbors(data, k, options.mode, options.seed, options.forest);
  out.values.assign(n * k, 0.0);
  out.sigmas.assign(n, 0.0);
  out.perplexities.assign(n, 0.0);

  std::size_t warnings = 0;
  const auto rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) reduction(+ : warnings)
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    const auto i = static_cast<std::size_t>(r);
    auto cal = calibrate_bandwidth(out.graph.distances_of(i), perplexity, options.calibration);
    std::copy(cal.row.begin(), cal.row.end(), out.values.begin() + static_cast<std::ptrdiff_t>(i * k));
    out.sigmas[i] = cal.sigma;
    out.perplexities[i] = cal.perplexity;
    if (cal.warning) ++warnings;
  }
  out.warning_rows = warnings;
  return out;
}

SparseAffinity symmetrize(const ConditionalAffinity& conditional) {
  const auto& g = conditional.graph;
  const std::size_t n = g.rows();
  const std::size_t k = g.k;

  // Both orientations of every directed edge; entries for the same (row, col)
  // meet after sorting and are added. At most two terms meet, and IEEE
  // addition is commutative, so p_ij and p_ji come out bitwise equal.
  std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> triplets;
  triplets.reserve(2 * n * k);
  for (std::size_t r = 0; r < n; ++r) {
    const auto i = static_cast<std::uint32_t>(g.query(r));
    const auto nb = g.neighbors(r);
    const auto p = conditional.row(r);
    for (std::size_t t = 0; t < k; ++t) {
      triplets.emplace_back(i, nb[t], p[t]);
      triplets.emplace_back(nb[t], i, p[t]);
    }
  }
  std::sort(triplets.begin(), triplets.end(), [](const auto& a, const auto& b) {
    return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
  });

  const double scale = 1.0 / (2.0 * static_cast<double>(n));
  std::vector<std::size_t> row_ptr(n + 1, 0);
  std::vector<std::uint32_t> cols;
  std::vector<double> vals;
  cols.reserve(triplets.size());
  vals.reserve(triplets.size());
  for (std::size_t t = 0; t < triplets.size();) {
    const auto [row, col, v] = triplets[t];
    double sum = v;
    std::size_t u = t + 1;
    for (; u < triplets.size() && std::get<0>(triplets[u]) == row && std::get<1>(triplets[u]) == col; ++u) {
      sum += std::get<2>(triplets[u]);
    }
    cols.push_back(col);
    vals.push_back(sum * scale);
    ++row_ptr[row + 1];
    t = u;
  }
  for (std::size_t i = 0; i < n; ++i) row_ptr[i + 1] += row_ptr[i];

  SparseAffinity p(n, std::move(row_ptr), std::move(cols), std::move(vals));
  if (conditional.warning_rows > 0) {
    p.warnings.push_back(std::to_string(conditional.warning_rows) +
                         " point(s) could not be calibrated to perplexity " +
                         std::to_string(conditional.target_perplexity));
  }
  return p;
}

SparseAffinity build_affinities(const DataMatrix& data, double perplexity,
                                const AffinityOptions& options) {
  auto p = symmetrize(conditional_affinities(data, perplexity, options));
  const auto wanted = static_cast<std::size_t>(3.0 * std::ceil(perplexity));
  if (!options.neighbors && wanted > data.rows() - 1) {
    p.warnings.insert(p.warnings.begin(),
                      "neighbour count clamped to n-1 = " + std::to_string(data.rows() - 1) +
                          " (3*ceil(perplexity) = " + std::to_string(wanted) + ")");
  }
  return p;
}

SparseAffinity build_affinities(const DataMatrix& data, double perplexity, NeighborMode mode,
                                std::uint64_t seed) {
  AffinityOptions options;
  options.mode = mode;
  options.seed = seed;
  return build_affinities(data, perplexity, options);
}

}  // namespace htsne
