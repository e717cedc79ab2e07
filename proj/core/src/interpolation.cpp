#include "htsne/interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "htsne/error.hpp"
#include "nbody_fft.hpp"

namespace htsne {

namespace {

detail::GridLayout to_layout(const GridInfo& info) {
  return {info.origin, info.box_width, info.boxes, info.nodes_per_box};
}

}  // namespace

void validate(const InterpConfig& config) {
  if (config.nodes_per_interval < 3) throw InvalidArgument("nodes_per_interval must be >= 3");
  if (config.min_boxes < 1) throw InvalidArgument("min_boxes must be positive");
  if (!(config.max_box_width > 0.0) || !std::isfinite(config.max_box_width)) {
    throw InvalidArgument("max_box_width must be positive");
  }
  if (config.max_boxes < config.min_boxes) throw InvalidArgument("max_boxes must be >= min_boxes");
}

GridInfo plan_grid(const Embedding& emb, const InterpConfig& config, [[maybe_unused]] double alpha) {
  validate(config);
  GridInfo info;
  info.nodes_per_box = config.nodes_per_interval;

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double c : emb.coords()) {
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  const double span = hi - lo;
  if (!(span > 0.0) || !std::isfinite(span)) {
    info.exact_fallback = true;
    return info;
  }

  double width = std::min(config.max_box_width, span / config.min_boxes);
  if (config.alpha_refinement) width *= 0.5;
  int boxes = static_cast<int>(std::ceil(span / width - 1e-9));
  boxes = detail::next_smooth(std::max(boxes, 1));
  if (boxes > config.max_boxes) boxes = config.max_boxes;
  info.boxes = boxes;
  info.origin = lo;
  info.box_width = span / boxes;
  return info;
}

RepulsionInterpolator::RepulsionInterpolator(InterpConfig config) : config_(config) { validate(config_); }

Repulsion RepulsionInterpolator::compute(const Embedding& emb, const KernelParams& params) {
  const std::size_t n = emb.size();
  if (n < 2) throw InvalidArgument("repulsion needs at least two points");
  const Kernel kernel(params);
  last_grid_ = plan_grid(emb, config_, params.alpha());
  if (last_grid_.exact_fallback) return repulsive_forces_exact(emb, params);

  const detail::GridSums grid(emb, to_layout(last_grid_));
  // Charges are taken relative to the grid centre to limit cancellation in
  // y_i * sum_j K - sum_j K y_j.
  const double centre = last_grid_.origin + 0.5 * last_grid_.box_width * last_grid_.boxes;
  std::vector<double> ones(n, 1.0), xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = emb.x(i) - centre;
    ys[i] = emb.y(i) - centre;
  }

  const auto rep_kernel = grid.kernel_spectrum([&](double d2) { return kernel.repulsion(d2); });
  const auto value_kernel = grid.kernel_spectrum([&](double d2) { return kernel.value(d2); });
  const auto ones_spec = grid.charge_spectrum(ones);

  const auto sum_rep = grid.potential(rep_kernel, ones_spec);
  const auto sum_rep_x = grid.potential(rep_kernel, grid.charge_spectrum(xs));
  const auto sum_rep_y = grid.potential(rep_kernel, grid.charge_spectrum(ys));
  const auto sum_value = grid.potential(value_kernel, ones_spec);

  double z = 0.0;
  for (double s : sum_value) z += s;
  // Remove the self terms k(0) = 1.
  z -= static_cast<double>(n);

  Repulsion out;
  out.z = z;
  out.forces.resize(2 * n);
  const double scale = -4.0 / z;
  for (std::size_t i = 0; i < n; ++i) {
    out.forces[2 * i] = scale * (xs[i] * sum_rep[i] - sum_rep_x[i]);
    out.forces[2 * i + 1] = scale * (ys[i] * sum_rep[i] - sum_rep_y[i]);
  }
  return out;
}

double RepulsionInterpolator::normalization(const Embedding& emb, const KernelParams& params) {
  const std::size_t n = emb.size();
  if (n < 2) throw InvalidArgument("normalisation needs at least two points");
  const Kernel kernel(params);
  last_grid_ = plan_grid(emb, config_, params.alpha());
  if (last_grid_.exact_fallback) return normalization_exact(emb, params);

  const detail::GridSums grid(emb, to_layout(last_grid_));
  const std::vector<double> ones(n, 1.0);
  const auto sums = grid.potential(grid.kernel_spectrum([&](double d2) { return kernel.value(d2); }),
                                   grid.charge_spectrum(ones));
  double z = 0.0;
  for (double s : sums) z += s;
  return z - static_cast<double>(n);
}

Repulsion repulsive_forces_interp(const Embedding& emb, const KernelParams& params,
                                  const InterpConfig& config) {
  return RepulsionInterpolator(config).compute(emb, params);
}

}  // namespace htsne
