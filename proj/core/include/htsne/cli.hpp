#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "htsne/experiments.hpp"
#include "htsne/interpolation.hpp"
#include "htsne/kernel.hpp"
#include "htsne/optimizer.hpp"
#include "htsne/types.hpp"

namespace htsne {

enum class InputFormat { Csv, Idx };

/// Everything one CLI invocation needs. Unset optionals are resolved from the
/// data: the solver is Exact up to 2000 points, neighbour search is Exact up
/// to 5000 points, and DBSCAN uses the adaptive eps.
struct RunConfig {
  std::string preset;
  std::string input;
  InputFormat format = InputFormat::Csv;
  /// IDX label file when `input` names an image file.
  std::string labels;
  double alpha = 1.0;
  KernelVariant variant = KernelVariant::Simplified;
  double perplexity = 30.0;
  std::optional<Solver> solver;
  OptimizerConfig optimizer;
  InterpConfig interp;
  InitMode init = InitMode::Pca;
  std::optional<int> pca_dims;
  std::uint64_t seed = 0;
  /// Seed of the synthetic presets; defaults to `seed`.
  std::optional<std::uint64_t> data_seed;
  std::optional<NeighborMode> neighbors;
  std::string out = "htsne-out";
  std::string sweep_alphas;
  std::vector<std::size_t> metrics_k{10};
  std::size_t knn_queries = 20000;
  std::optional<double> dbscan_eps;
  int dbscan_min_pts = 5;
  bool verbose = false;
};

/// Defaults of a named preset: toy10, dumbbells, two-clusters or mnist.
/// Throws InvalidArgument for other names.
RunConfig preset_config(const std::string& name);

/// Stable-order JSON object; run_config_from_json accepts exactly these
/// fields (any subset) and rejects unknown ones with InvalidArgument.
std::string run_config_to_json(const RunConfig& config);
RunConfig run_config_from_json(const std::string& text, RunConfig base = {});

/// Throws InvalidArgument if a field is out of range or inconsistent.
void validate(const RunConfig& config);

struct PipelineResult {
  std::filesystem::path out_dir;
  std::vector<std::filesystem::path> files;
  std::optional<RunReport> report;
  std::optional<SweepResult> sweep;
};

/// Loads or generates the data, embeds it (or sweeps alpha) and writes the
/// output files. Progress goes to `log`.
PipelineResult run_pipeline(const RunConfig& config, std::ostream& log);

/// Command-line entry point. Returns 0 on success, 1 on a runtime failure and
/// 2 on a usage error (bad flag, invalid value, missing input file).
int cli_main(int argc, char** argv);
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace htsne
