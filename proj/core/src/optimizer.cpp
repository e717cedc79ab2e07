#include "htsne/optimizer.hpp"

#include <json.hpp>
#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include "htsne/error.hpp"
#include "htsne/pca.hpp"

namespace htsne {

namespace {

constexpr double kLowAlphaWarning = 0.5;
constexpr double kSpanGrowthWarning = 1e3;

double sign(double v) { return static_cast<double>((v > 0.0) - (v < 0.0)); }

void zero_mean(Embedding& y) {
  const std::size_t n = y.size();
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += y.x(i);
    my += y.y(i);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    y.x(i) -= mx;
    y.y(i) -= my;
  }
}

// Restores the OpenMP thread count when a run ends.
class ThreadScope {
 public:
  explicit ThreadScope(int threads) : saved_(omp_get_max_threads()) {
    if (threads > 0) omp_set_num_threads(threads);
  }
  ~ThreadScope() { omp_set_num_threads(saved_); }
  ThreadScope(const ThreadScope&) = delete;
  ThreadScope& operator=(const ThreadScope&) = delete;

 private:
  int saved_;
};

std::string snapshot(const KernelParams& params, const OptimizerConfig& opt,
                     const InterpConfig& interp, Solver solver, std::size_t n, int threads) {
  nlohmann::ordered_json j;
  j["n"] = n;
  j["kernel"] = {{"variant", params.variant() == KernelVariant::Classic ? "classic" : "simplified"},
                 {"alpha", params.alpha()}};
  j["solver"] = solver == Solver::Exact ? "exact" : "accelerated";
  j["optimizer"] = {{"iterations", opt.iterations},
                    {"learning_rate", opt.learning_rate},
                    {"early_exaggeration", opt.early_exaggeration},
                    {"early_exaggeration_length", opt.early_exaggeration_length},
                    {"momentum_initial", opt.momentum_initial},
                    {"momentum_final", opt.momentum_final},
                    {"momentum_switch_iter", opt.momentum_switch_iter},
                    {"late_exaggeration", opt.late_exaggeration},
                    {"seed", opt.seed},
                    {"loss_every", opt.loss_every},
                    {"strict_deterministic", opt.strict_deterministic},
                    {"threads", threads}};
  j["interp"] = {{"nodes_per_interval", interp.nodes_per_interval},
                 {"min_boxes", interp.min_boxes},
                 {"max_box_width", interp.max_box_width},
                 {"alpha_refinement", interp.alpha_refinement},
                 {"max_boxes", interp.max_boxes}};
  return j.dump();
}

}  // namespace

void validate(const OptimizerConfig& c) {
  auto fail = [](const std::string& what) { throw InvalidArgument("optimizer: " + what); };
  if (c.iterations < 0) fail("iterations must be non-negative");
  if (!(c.learning_rate > 0.0) || !std::isfinite(c.learning_rate)) fail("learning_rate must be positive");
  if (!(c.early_exaggeration > 0.0) || !std::isfinite(c.early_exaggeration)) {
    fail("early_exaggeration must be positive");
  }
  if (!(c.late_exaggeration > 0.0) || !std::isfinite(c.late_exaggeration)) {
    fail("late_exaggeration must be positive");
  }
  if (c.early_exaggeration_length < 0 || c.early_exaggeration_length > c.iterations) {
    fail("early_exaggeration_length must lie in [0, iterations]");
  }
  if (c.momentum_switch_iter < 0 || c.momentum_switch_iter > c.iterations) {
    fail("momentum_switch_iter must lie in [0, iterations]");
  }
  if (!(c.momentum_initial >= 0.0 && c.momentum_initial < 1.0)) fail("momentum_initial must lie in [0, 1)");
  if (!(c.momentum_final >= 0.0 && c.momentum_final < 1.0)) fail("momentum_final must lie in [0, 1)");
  if (c.loss_every < 0) fail("loss_every must be non-negative");
  if (c.threads < 0) fail("threads must be non-negative");
}

Embedding pca_init(const DataMatrix& data, double scale_sd, std::uint64_t seed,
                   std::vector<std::string>* warnings) {
  validate_data(data, 2);
  if (data.cols() < 2) throw InvalidArgument("pca_init needs at least two input dimensions");
  if (!(scale_sd > 0.0) || !std::isfinite(scale_sd)) throw InvalidArgument("scale_sd must be positive");

  const std::size_t n = data.rows();
  const PcaResult pca = principal_components(data, 2, seed);
  const double top = std::max(pca.variances[0], 0.0);

  Embedding out(n);
  std::vector<double> sd(2, 0.0);
  for (std::size_t c = 0; c < 2; ++c) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += pca.scores(i, c);
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) ss += (pca.scores(i, c) - mean) * (pca.scores(i, c) - mean);
    sd[c] = std::sqrt(ss / static_cast<double>(n));
  }

  // A component whose spread is negligible next to PC1 carries no signal.
  const double floor = 1e-12 * std::sqrt(top);
  const bool have_first = sd[0] > 0.0 && top > 0.0;
  const bool have_second = have_first && sd[1] > floor;
  const double factor = have_first ? scale_sd / sd[0] : 0.0;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, scale_sd / 100.0);
  for (std::size_t i = 0; i < n; ++i) {
    out.x(i) = have_first ? factor * pca.scores(i, 0) : noise(rng);
  }
  for (std::size_t i = 0; i < n; ++i) {
    out.y(i) = have_second ? factor * pca.scores(i, 1) : noise(rng);
  }
  if (!have_second && warnings != nullptr) {
    warnings->push_back(std::string("pca_init: data has rank ") + (have_first ? "1" : "0") +
                        "; missing components filled with Gaussian noise");
  }
  return out;
}

Embedding random_init(std::size_t n, double scale_sd, std::uint64_t seed) {
  if (n < 2) throw InvalidArgument("random_init needs n >= 2");
  if (!(scale_sd > 0.0) || !std::isfinite(scale_sd)) throw InvalidArgument("scale_sd must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, scale_sd);
  Embedding out(n);
  for (double& c : out.coords()) c = normal(rng);
  return out;
}

Embedding initialize(const DataMatrix& data, InitMode mode, std::uint64_t seed, double scale_sd,
                     std::vector<std::string>* warnings) {
  if (mode == InitMode::Pca) return pca_init(data, scale_sd, seed, warnings);
  return random_init(data.rows(), scale_sd, seed);
}

RunReport run(const SparseAffinity& p, const Embedding& init, const KernelParams& params,
              const OptimizerConfig& opt, const InterpConfig& interp, Solver solver,
              const RunHooks& hooks) {
  validate(opt);
  validate(interp);
  const std::size_t n = init.size();
  if (p.size() != n) {
    throw InvalidArgument("affinity matrix has " + std::to_string(p.size()) +
                          " points but the initial embedding has " + std::to_string(n));
  }
  if (n < 2) throw InvalidArgument("optimisation needs at least two points");
  if (!init.all_finite()) throw InvalidInput("initial embedding contains non-finite values");

  const int threads = opt.strict_deterministic ? 1 : opt.threads;
  ThreadScope scope(threads);
  const auto start = std::chrono::steady_clock::now();

  const SimplifiedForm form = to_simplified(params);
  const KernelParams& kp = form.params;

  RunReport report;
  report.config_snapshot = snapshot(params, opt, interp, solver, n, threads);
  if (params.alpha() < kLowAlphaWarning) {
    std::ostringstream msg;
    msg << "alpha = " << params.alpha()
        << " is below 0.5; very heavy tails can fragment clusters and slow convergence";
    report.warnings.push_back(msg.str());
  }

  Embedding y = init;
  if (form.scale != 1.0) {
    for (double& c : y.coords()) c /= form.scale;
  }

  RepulsionInterpolator interpolator(interp);
  std::vector<double> update(2 * n, 0.0);
  std::vector<double> gains(2 * n, 1.0);
  std::vector<double> grad(2 * n, 0.0);
  double reference_span = y.span();
  bool span_warned = false;

  for (int it = 0; it < opt.iterations; ++it) {
    if (it == opt.early_exaggeration_length) reference_span = y.span();
    const double exaggeration =
        it < opt.early_exaggeration_length ? opt.early_exaggeration : opt.late_exaggeration;
    const double momentum = it < opt.momentum_switch_iter ? opt.momentum_initial : opt.momentum_final;

    const Forces att = attractive_forces(y, p, kp);
    const Repulsion rep =
        solver == Solver::Exact ? repulsive_forces_exact(y, kp) : interpolator.compute(y, kp);

    double max_grad = 0.0;
    for (std::size_t c = 0; c < 2 * n; ++c) {
      grad[c] = exaggeration * att[c] + rep.forces[c];
      max_grad = std::max(max_grad, std::abs(grad[c]));
    }

    const bool sample = opt.loss_every > 0 && it % opt.loss_every == 0;
    const bool notify = hooks.progress && hooks.progress_every > 0 && it % hooks.progress_every == 0;
    if (sample || notify) {
      const double kl = kl_divergence_given_z(y, p, kp, rep.z);
      if (sample && std::isfinite(kl)) report.loss_trace.push_back({it, kl});
      if (notify) hooks.progress(it, kl, y);
    }

    const double step = opt.learning_rate / 4.0;
    for (std::size_t c = 0; c < 2 * n; ++c) {
      gains[c] = sign(grad[c]) != sign(update[c]) ? gains[c] + 0.2 : gains[c] * 0.8;
      gains[c] = std::max(gains[c], 0.01);
      update[c] = momentum * update[c] - step * gains[c] * grad[c];
      y.coords()[c] += update[c];
    }
    zero_mean(y);
    y.generation = it + 1;

    if (!y.all_finite() || !std::isfinite(max_grad)) {
      std::ostringstream msg;
      msg << "non-finite coordinates at iteration " << it << " (max |gradient| = " << max_grad << ")";
      throw NumericalError(msg.str());
    }

    if (!span_warned && it >= opt.early_exaggeration_length && reference_span > 0.0 &&
        y.span() > kSpanGrowthWarning * reference_span) {
      std::ostringstream msg;
      msg << "embedding span grew beyond 1000x its size at iteration "
          << opt.early_exaggeration_length << " (now " << y.span()
          << "); accelerated grids get large and slow";
      report.warnings.push_back(msg.str());
      span_warned = true;
    }
  }

  report.final_kl = kl_divergence(y, p, kp, ZMode::Exact);
  if (!std::isfinite(report.final_kl)) throw NumericalError("final KL divergence is not finite");
  report.loss_trace.push_back({opt.iterations, report.final_kl});

  if (opt.iterations == 0) {
    report.final_embedding = init;
  } else {
    if (form.scale != 1.0) {
      for (double& c : y.coords()) c *= form.scale;
    }
    report.final_embedding = std::move(y);
  }
  report.final_span = report.final_embedding.span();
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace htsne
