#pragma once

#include "htsne/gradient.hpp"
#include "htsne/kernel.hpp"
#include "htsne/types.hpp"

namespace htsne {

/// Interpolation grid settings for the accelerated repulsion.
///
/// The grid covers the embedding's bounding square with boxes of width
/// min(max_box_width, span / min_boxes), each holding nodes_per_interval
/// equispaced nodes per axis. alpha_refinement halves the width; it is meant
/// for small alpha, where the repulsion kernel is sharper.
struct InterpConfig {
  int nodes_per_interval = 5;
  int min_boxes = 125;
  double max_box_width = 1.0;
  bool alpha_refinement = false;
  /// Hard cap on boxes per axis; beyond it boxes widen instead.
  int max_boxes = 250;
};

/// Throws InvalidArgument if a field is out of range.
void validate(const InterpConfig& config);

/// Grid geometry chosen for one embedding snapshot.
struct GridInfo {
  double origin = 0.0;
  double box_width = 0.0;
  int boxes = 0;            // per axis
  int nodes_per_box = 0;
  bool exact_fallback = false;
};

/// Repulsive forces via polynomial interpolation of the kernels on a grid and
/// FFT convolution. Reuses FFT plans across calls of the same grid size.
class RepulsionInterpolator {
 public:
  explicit RepulsionInterpolator(InterpConfig config = {});

  const InterpConfig& config() const noexcept { return config_; }

  /// Approximates the three kernel sums per point
  ///   sum_j k^((a+1)/a)(d_ij), sum_j k^((a+1)/a)(d_ij) y_j, sum_j k(d_ij)
  /// and returns F_rep and Z. Falls back to the exact O(n^2) path when every
  /// point coincides.
  Repulsion compute(const Embedding& emb, const KernelParams& params);

  /// Z only.
  double normalization(const Embedding& emb, const KernelParams& params);

  /// Grid used by the most recent call.
  const GridInfo& last_grid() const noexcept { return last_grid_; }

 private:
  InterpConfig config_;
  GridInfo last_grid_;
};

/// Grid that would be used for this embedding and kernel.
GridInfo plan_grid(const Embedding& emb, const InterpConfig& config, double alpha);

Repulsion repulsive_forces_interp(const Embedding& emb, const KernelParams& params,
                                  const InterpConfig& config = {});

}  // namespace htsne
