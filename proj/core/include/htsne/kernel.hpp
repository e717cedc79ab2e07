#pragma once

namespace htsne {

/// Which parameterisation of the heavy-tailed kernel is in use.
///
/// Simplified: k(d) = (1 + d^2/alpha)^(-alpha), valid for any alpha > 0.
/// Classic:    k(d) = (1 + d^2/nu)^(-(nu+1)/2) with nu = 2*alpha - 1, the
///             Student-t density shape; requires alpha > 1/2.
enum class KernelVariant { Simplified, Classic };

/// Tail-heaviness alpha plus the variant selector. alpha -> infinity recovers
/// the Gaussian kernel exp(-d^2), alpha = 1 is the Cauchy kernel of standard
/// t-SNE, alpha < 1 gives tails heavier than Cauchy.
class KernelParams {
 public:
  /// Throws InvalidArgument if alpha is not a finite positive number.
  static KernelParams simplified(double alpha);
  /// Throws InvalidArgument unless alpha > 1/2.
  static KernelParams classic(double alpha);
  /// Classic kernel given its degrees of freedom nu > 0.
  static KernelParams classic_from_dof(double nu);

  double alpha() const noexcept { return alpha_; }
  KernelVariant variant() const noexcept { return variant_; }
  /// nu = 2 alpha - 1.
  double dof() const noexcept { return 2.0 * alpha_ - 1.0; }

  friend bool operator==(const KernelParams&, const KernelParams&) = default;

 private:
  KernelParams(double alpha, KernelVariant variant);

  double alpha_ = 1.0;
  KernelVariant variant_ = KernelVariant::Simplified;
};

/// w = k(d) for the selected variant. w lies in (0, 1].
/// Throws InvalidInput for negative or non-finite d_squared.
double kernel_value(double d_squared, const KernelParams& params);

/// w^(1/alpha) = 1/(1 + d^2/alpha). Simplified variant only.
double attraction_weight(double d_squared, const KernelParams& params);

/// w^((alpha+1)/alpha) = (1 + d^2/alpha)^(-(alpha+1)). Simplified variant only.
double repulsion_weight(double d_squared, const KernelParams& params);

/// A Classic kernel rewritten as the equivalent Simplified kernel.
///
/// Classic(d^2 * scale^2) == Simplified(d^2) pointwise, so an embedding
/// optimised under the Simplified kernel equals the Classic embedding divided
/// by `scale`.
struct SimplifiedForm {
  KernelParams params;
  double scale = 1.0;  // sqrt(2 nu / (nu + 1)); exactly 1 for Simplified input
};

SimplifiedForm to_simplified(const KernelParams& params);

/// Kernel evaluator for inner loops. Picks the cheapest exact evaluation for
/// the given alpha once, and skips argument validation.
class Kernel {
 public:
  /// Throws InvalidArgument for the Classic variant; map it with
  /// to_simplified() first.
  explicit Kernel(const KernelParams& params);

  double alpha() const noexcept { return alpha_; }

  double value(double d2) const noexcept;
  double attraction(double d2) const noexcept { return 1.0 / (1.0 + d2 * inv_alpha_); }
  double repulsion(double d2) const noexcept { return value(d2) * attraction(d2); }
  /// log k(d), evaluated without forming k(d).
  double log_value(double d2) const noexcept;

 private:
  enum class Path { Cauchy, Half, Integer, Power, LogSpace };

  double alpha_;
  double inv_alpha_;
  Path path_;
  int integer_exponent_ = 0;
};

}  // namespace htsne
