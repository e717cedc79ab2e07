#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "htsne/affinity.hpp"
#include "htsne/gradient.hpp"
#include "htsne/interpolation.hpp"
#include "htsne/kernel.hpp"
#include "htsne/types.hpp"

namespace htsne {

/// Gradient descent schedule. Defaults are the usual t-SNE settings: 1000
/// iterations, learning rate 200, early exaggeration 12 for 250 iterations,
/// momentum 0.5 switching to 0.8 after 250 iterations, no late exaggeration.
///
/// The gradient keeps its factor 4, so the step actually taken is
/// learning_rate / 4 times the gain-scaled gradient. This matches
/// implementations that fold the 4 into the learning rate.
struct OptimizerConfig {
  int iterations = 1000;
  double learning_rate = 200.0;
  double early_exaggeration = 12.0;
  int early_exaggeration_length = 250;
  double momentum_initial = 0.5;
  double momentum_final = 0.8;
  int momentum_switch_iter = 250;
  double late_exaggeration = 1.0;
  std::uint64_t seed = 0;
  /// Sample the loss every this many iterations (0 disables the trace).
  int loss_every = 50;
  /// Single-threaded, fixed summation order throughout.
  bool strict_deterministic = false;
  /// OpenMP threads for the run; 0 keeps the runtime default.
  int threads = 0;
};

/// Throws InvalidArgument if a field is out of range.
void validate(const OptimizerConfig& config);

struct LossSample {
  int iteration = 0;
  double kl = 0.0;
};

struct RunReport {
  Embedding final_embedding;
  std::vector<LossSample> loss_trace;
  /// KL of the final embedding with exact Z.
  double final_kl = 0.0;
  double final_span = 0.0;
  double wall_time_seconds = 0.0;
  /// JSON object describing the kernel, optimiser, solver and grid settings.
  std::string config_snapshot;
  std::vector<std::string> warnings;
};

/// Called with (iteration, loss, embedding) before the step of every
/// `progress_every`-th iteration.
using ProgressCallback = std::function<void(int, double, const Embedding&)>;

struct RunHooks {
  ProgressCallback progress;
  int progress_every = 50;
};

/// First two principal components, scaled so the first has standard deviation
/// `scale_sd` (population convention); the second uses the same factor.
/// Missing components of rank-deficient data are filled with seeded Gaussian
/// noise of sd scale_sd / 100 and reported in `warnings`.
Embedding pca_init(const DataMatrix& data, double scale_sd = 1e-4, std::uint64_t seed = 0,
                   std::vector<std::string>* warnings = nullptr);

/// I.i.d. Gaussian coordinates with standard deviation `scale_sd`.
Embedding random_init(std::size_t n, double scale_sd = 1e-4, std::uint64_t seed = 0);

enum class InitMode { Pca, Random };

/// pca_init or random_init, as selected.
Embedding initialize(const DataMatrix& data, InitMode mode, std::uint64_t seed, double scale_sd = 1e-4,
                     std::vector<std::string>* warnings = nullptr);

/// Minimises KL(P || Q) from `init`.
///
/// A Classic kernel is optimised as its Simplified equivalent and the result
/// multiplied by the scale factor. Throws NumericalError (naming the
/// iteration and the largest gradient entry) if coordinates become
/// non-finite.
RunReport run(const SparseAffinity& p, const Embedding& init, const KernelParams& params,
              const OptimizerConfig& opt, const InterpConfig& interp, Solver solver,
              const RunHooks& hooks = {});

}  // namespace htsne
