#include "htsne/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>

#include "htsne/error.hpp"
#include "htsne/metrics.hpp"

namespace htsne {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

double parse_number(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw InvalidArgument("not a number: '" + s + "'");
  }
  if (used != s.size()) throw InvalidArgument("not a number: '" + s + "'");
  return v;
}

bool has_two_classes(const Labels& labels) {
  std::map<int, std::size_t> counts;
  for (int l : labels) {
    if (l >= 0) ++counts[l];
  }
  std::size_t usable = 0;
  for (const auto& [label, count] : counts) {
    if (count >= 2) ++usable;
  }
  return usable >= 2 && usable == counts.size();
}

}  // namespace

LabeledData gen_gaussian_clusters(std::size_t n_per_class, std::size_t n_classes, std::size_t dim,
                                  double offset, std::uint64_t seed) {
  if (n_classes == 0 || n_per_class == 0 || dim == 0) {
    throw InvalidArgument("gen_gaussian_clusters: sizes must be positive");
  }
  if (n_classes > dim) {
    throw InvalidArgument("gen_gaussian_clusters: n_classes (" + std::to_string(n_classes) +
                          ") must not exceed dim (" + std::to_string(dim) + ")");
  }
  if (!std::isfinite(offset)) throw InvalidArgument("gen_gaussian_clusters: offset must be finite");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  LabeledData out;
  out.data = DataMatrix(n_per_class * n_classes, dim);
  out.labels.resize(n_per_class * n_classes);
  for (std::size_t c = 0; c < n_classes; ++c) {
    for (std::size_t s = 0; s < n_per_class; ++s) {
      const std::size_t i = c * n_per_class + s;
      auto row = out.data.row(i);
      for (double& v : row) v = normal(rng);
      row[c] += offset;
      out.labels[i] = static_cast<int>(c);
    }
  }
  return out;
}

LabeledData gen_dumbbells(std::uint64_t seed) {
  constexpr std::size_t kClasses = 10;
  constexpr std::size_t kPerClass = 100;
  LabeledData out = gen_gaussian_clusters(kPerClass, kClasses, 20, 4.0, seed);
  out.sub_labels.resize(out.labels.size());
  for (std::size_t c = 0; c < kClasses; ++c) {
    for (std::size_t s = 0; s < kPerClass; ++s) {
      const std::size_t i = c * kPerClass + s;
      const bool upper = s < kPerClass / 2;
      out.data(i, 10 + c) += upper ? 2.0 : -2.0;
      out.sub_labels[i] = static_cast<int>(2 * c + (upper ? 0 : 1));
    }
  }
  return out;
}

LabeledData gen_two_clusters(std::uint64_t seed) { return gen_gaussian_clusters(100, 2, 10, 5.0, seed); }

SeparationPrediction predicted_separation(double alpha, double c, double d_w) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("alpha must be positive");
  if (!(c > 0.0 && c < 1.0)) throw InvalidArgument("c must lie in (0, 1), got " + fmt(c));
  if (!(d_w >= 0.0) || !std::isfinite(d_w)) throw InvalidArgument("d_w must be non-negative");
  SeparationPrediction out;
  out.ratio = std::pow(c, -1.0 / (2.0 * alpha));
  out.d_b = std::sqrt(std::pow(c, -1.0 / alpha) * (alpha + d_w * d_w) - alpha);
  return out;
}

TheoryCase make_theory_case(double D_w, double D_b, std::size_t n_per_cluster, double perplexity) {
  if (!(D_w > 0.0) || !(D_b > D_w) || !std::isfinite(D_b)) {
    throw InvalidArgument("theory case needs D_b > D_w > 0");
  }
  if (n_per_cluster < 2) throw InvalidArgument("theory case needs at least two points per cluster");
  const std::size_t n = 2 * n_per_cluster;
  // With equal within-cluster distances the row perplexity cannot drop below
  // the within-cluster count, whatever the bandwidth.
  if (!(perplexity > static_cast<double>(n_per_cluster - 1)) || perplexity >= static_cast<double>(n - 1)) {
    throw InvalidArgument("perplexity must lie in (" + std::to_string(n_per_cluster - 1) + ", " +
                          std::to_string(n - 1) + ")");
  }
  std::vector<double> distances(n - 1, D_b);
  std::fill(distances.begin(), distances.begin() + static_cast<std::ptrdiff_t>(n_per_cluster - 1), D_w);
  const CalibrationResult cal = calibrate_bandwidth(distances, perplexity);

  TheoryCase out;
  out.D_w = D_w;
  out.D_b = D_b;
  out.n_per_cluster = n_per_cluster;
  out.perplexity = perplexity;
  // Every row is identical, so p_ij = p_{j|i} / N.
  out.p_w = cal.row.front() / static_cast<double>(n);
  out.p_b = cal.row.back() / static_cast<double>(n);
  out.c = cal.row.back() / cal.row.front();
  return out;
}

SweepResult sweep_alpha(const DataMatrix& data, const Labels& labels, const std::vector<double>& alphas,
                        const SweepConfig& config) {
  validate_data(data);
  if (alphas.empty()) throw InvalidArgument("sweep needs at least one alpha");
  if (!labels.empty() && labels.size() != data.rows()) {
    throw InvalidArgument("labels has " + std::to_string(labels.size()) + " entries but data has " +
                          std::to_string(data.rows()) + " rows");
  }
  for (double a : alphas) KernelParams::simplified(a);

  const std::size_t n = data.rows();
  SweepResult result;
  result.solver = config.solver.value_or(n <= kSweepExactLimit ? Solver::Exact : Solver::Accelerated);

  AffinityOptions aff;
  aff.mode = config.neighbors;
  aff.seed = config.optimizer.seed;
  const SparseAffinity p = build_affinities(data, config.perplexity, aff);
  result.warnings = p.warnings;
  const Embedding init = initialize(data, config.init, config.optimizer.seed, 1e-4, &result.warnings);
  const bool separable = has_two_classes(labels);

  std::vector<std::size_t> ks;
  for (std::size_t k : config.knn_ks) {
    if (k > 0 && k < n) ks.push_back(k);
  }

  for (double alpha : alphas) {
    const RunReport report =
        run(p, init, KernelParams::simplified(alpha), config.optimizer, config.interp, result.solver);
    const Embedding& emb = report.final_embedding;
    SweepRow row;
    row.alpha = alpha;
    row.kl = report.final_kl;
    row.span = report.final_span;
    row.wall_time_seconds = report.wall_time_seconds;
    row.warnings = report.warnings;
    row.separation_ratio =
        separable ? mean_separation_ratio(emb, labels) : std::numeric_limits<double>::quiet_NaN();
    if (!ks.empty()) row.knn_preservation = knn_preservation(data, emb, ks);
    if (n > static_cast<std::size_t>(config.dbscan_min_pts) && n > 5) {
      row.adaptive_eps = adaptive_eps(emb);
      row.cluster_count = dbscan_clusters(emb, row.adaptive_eps, config.dbscan_min_pts).cluster_count;
      row.cluster_count_fixed_eps = dbscan_clusters(emb, config.fixed_eps, config.dbscan_min_pts).cluster_count;
    }
    if (config.keep_embeddings) row.embedding = emb;
    result.rows.push_back(std::move(row));
  }
  return result;
}

std::string sweep_csv(const SweepResult& result) {
  std::ostringstream out;
  std::vector<std::size_t> ks;
  if (!result.rows.empty()) {
    for (const auto& [k, v] : result.rows.front().knn_preservation) ks.push_back(k);
  }
  out << "alpha,separation_ratio,kl";
  for (std::size_t k : ks) out << ",knn_" << k;
  out << ",adaptive_eps,cluster_count,cluster_count_fixed_eps,span,wall_time_seconds\n";
  for (const auto& row : result.rows) {
    out << fmt(row.alpha) << ',' << fmt(row.separation_ratio) << ',' << fmt(row.kl);
    for (std::size_t k : ks) out << ',' << fmt(row.knn_preservation.at(k));
    out << ',' << fmt(row.adaptive_eps) << ',' << row.cluster_count << ',' << row.cluster_count_fixed_eps
        << ',' << fmt(row.span) << ',' << fmt(row.wall_time_seconds) << '\n';
  }
  return out.str();
}

std::vector<double> parse_alpha_list(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ':')) parts.push_back(part);
    if (parts.size() != 3) throw InvalidArgument("alpha range must be start:stop:step, got '" + text + "'");
    const double start = parse_number(parts[0]);
    const double stop = parse_number(parts[1]);
    const double step = parse_number(parts[2]);
    if (!(step > 0.0) || !(stop >= start)) {
      throw InvalidArgument("alpha range needs step > 0 and stop >= start, got '" + text + "'");
    }
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    if (count > 100000) throw InvalidArgument("alpha range has too many points");
    for (std::size_t i = 0; i < count; ++i) {
      const double v = start + static_cast<double>(i) * step;
      out.push_back(std::round(v * 1e12) / 1e12);
    }
  } else {
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (part.empty()) continue;
      out.push_back(parse_number(part));
    }
  }
  if (out.empty()) throw InvalidArgument("empty alpha list");
  for (double a : out) {
    if (!(a > 0.0) || !std::isfinite(a)) throw InvalidArgument("alpha values must be positive, got " + fmt(a));
  }
  return out;
}

}  // namespace htsne
