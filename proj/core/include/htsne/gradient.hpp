#pragma once

#include <optional>

#include "htsne/affinity.hpp"
#include "htsne/kernel.hpp"
#include "htsne/types.hpp"

namespace htsne {

struct InterpConfig;

/// How the O(n^2) repulsion and the normalisation Z are obtained.
enum class Solver { Exact, Accelerated };

/// Repulsive part of the gradient together with Z = sum_{k != l} w_kl.
struct Repulsion {
  Forces forces;
  double z = 0.0;
};

/// Attractive and repulsive gradient terms; their sum is dL/dy.
struct ForceField {
  Forces attractive;
  Forces repulsive;
  double z = 0.0;
  std::optional<double> loss;
};

/// F_att,i = 4 sum_j p_ij w_ij^(1/alpha) (y_i - y_j), over the stored p_ij only.
///
/// Throws InvalidArgument if P and the embedding disagree on n, or if the
/// kernel is not the Simplified variant.
Forces attractive_forces(const Embedding& emb, const SparseAffinity& p, const KernelParams& params);

/// F_rep,i = -4 sum_j w_ij^((alpha+1)/alpha) / Z (y_i - y_j), all pairs.
Repulsion repulsive_forces_exact(const Embedding& emb, const KernelParams& params);

/// Z over all ordered pairs, exactly.
double normalization_exact(const Embedding& emb, const KernelParams& params);

enum class ZMode { Exact, Interp };

/// KL(P || Q) = sum p_ij log(p_ij / q_ij), q_ij = w_ij / Z, including the
/// constant sum p log p so values are comparable across runs.
double kl_divergence(const Embedding& emb, const SparseAffinity& p, const KernelParams& params,
                     ZMode z_mode);
double kl_divergence(const Embedding& emb, const SparseAffinity& p, const KernelParams& params,
                     ZMode z_mode, const InterpConfig& interp);

/// KL with a precomputed Z.
double kl_divergence_given_z(const Embedding& emb, const SparseAffinity& p,
                             const KernelParams& params, double z);

/// Both gradient terms with the chosen solver.
ForceField compute_forces(const Embedding& emb, const SparseAffinity& p, const KernelParams& params,
                          Solver solver, const InterpConfig& interp);

}  // namespace htsne
