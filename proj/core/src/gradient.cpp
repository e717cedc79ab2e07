#include "htsne/gradient.hpp"

#include <cmath>
#include <string>

#include "htsne/error.hpp"
#include "htsne/interpolation.hpp"

namespace htsne {

namespace {

void check_shapes(const Embedding& emb, const SparseAffinity& p) {
  if (p.size() != emb.size()) {
    throw InvalidArgument("affinity matrix has " + std::to_string(p.size()) +
                          " points but the embedding has " + std::to_string(emb.size()));
  }
}

}  // namespace

Forces attractive_forces(const Embedding& emb, const SparseAffinity& p, const KernelParams& params) {
  check_shapes(emb, p);
  const Kernel kernel(params);
  const std::size_t n = emb.size();
  Forces f(2 * n, 0.0);
  const auto rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    const auto i = static_cast<std::size_t>(r);
    const auto cols = p.cols(i);
    const auto vals = p.vals(i);
    double fx = 0.0;
    double fy = 0.0;
    for (std::size_t t = 0; t < cols.size(); ++t) {
      const std::size_t j = cols[t];
      const double dx = emb.x(i) - emb.x(j);
      const double dy = emb.y(i) - emb.y(j);
      const double q = vals[t] * kernel.attraction(dx * dx + dy * dy);
      fx += q * dx;
      fy += q * dy;
    }
    f[2 * i] = 4.0 * fx;
    f[2 * i + 1] = 4.0 * fy;
  }
  return f;
}

Repulsion repulsive_forces_exact(const Embedding& emb, const KernelParams& params) {
  const std::size_t n = emb.size();
  if (n < 2) throw InvalidArgument("repulsion needs at least two points");
  const Kernel kernel(params);
  Repulsion out;
  out.forces.assign(2 * n, 0.0);
  double z = 0.0;
  // Each unordered pair once, in a fixed order.
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = emb.x(i);
    const double yi = emb.y(i);
    double fx = 0.0;
    double fy = 0.0;
    double zi = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = xi - emb.x(j);
      const double dy = yi - emb.y(j);
      const double d2 = dx * dx + dy * dy;
      const double base = kernel.attraction(d2);
      const double w = kernel.value(d2);
      const double rep = w * base;
      zi += w;
      fx += rep * dx;
      fy += rep * dy;
      out.forces[2 * j] -= rep * dx;
      out.forces[2 * j + 1] -= rep * dy;
    }
    out.forces[2 * i] += fx;
    out.forces[2 * i + 1] += fy;
    z += zi;
  }
  out.z = 2.0 * z;
  const double scale = -4.0 / out.z;
  for (double& v : out.forces) v *= scale;
  return out;
}

double normalization_exact(const Embedding& emb, const KernelParams& params) {
  const Kernel kernel(params);
  const std::size_t n = emb.size();
  const auto rows = static_cast<std::ptrdiff_t>(n);
  std::vector<double> partial(n, 0.0);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    const auto i = static_cast<std::size_t>(r);
    double s = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = emb.x(i) - emb.x(j);
      const double dy = emb.y(i) - emb.y(j);
      s += kernel.value(dx * dx + dy * dy);
    }
    partial[i] = s;
  }
  double z = 0.0;
  for (double s : partial) z += s;
  return 2.0 * z;
}

double kl_divergence_given_z(const Embedding& emb, const SparseAffinity& p,
                             const KernelParams& params, double z) {
  check_shapes(emb, p);
  if (!(z > 0.0) || !std::isfinite(z)) throw NumericalError("normalisation Z must be positive and finite");
  const Kernel kernel(params);
  const double log_z = std::log(z);
  double kl = 0.0;
  for (std::size_t i = 0; i < emb.size(); ++i) {
    const auto cols = p.cols(i);
    const auto vals = p.vals(i);
    for (std::size_t t = 0; t < cols.size(); ++t) {
      const double pij = vals[t];
      if (pij <= 0.0) continue;
      const std::size_t j = cols[t];
      const double dx = emb.x(i) - emb.x(j);
      const double dy = emb.y(i) - emb.y(j);
      kl += pij * (std::log(pij) - kernel.log_value(dx * dx + dy * dy) + log_z);
    }
  }
  return kl;
}

double kl_divergence(const Embedding& emb, const SparseAffinity& p, const KernelParams& params,
                     ZMode z_mode) {
  return kl_divergence(emb, p, params, z_mode, InterpConfig{});
}

double kl_divergence(const Embedding& emb, const SparseAffinity& p, const KernelParams& params,
                     ZMode z_mode, const InterpConfig& interp) {
  check_shapes(emb, p);
  const double z = z_mode == ZMode::Exact ? normalization_exact(emb, params)
                                          : RepulsionInterpolator(interp).normalization(emb, params);
  return kl_divergence_given_z(emb, p, params, z);
}

ForceField compute_forces(const Embedding& emb, const SparseAffinity& p, const KernelParams& params,
                          Solver solver, const InterpConfig& interp) {
  ForceField field;
  field.attractive = attractive_forces(emb, p, params);
  Repulsion rep = solver == Solver::Exact ? repulsive_forces_exact(emb, params)
                                          : repulsive_forces_interp(emb, params, interp);
  field.repulsive = std::move(rep.forces);
  field.z = rep.z;
  return field;
}

}  // namespace htsne
