#include "htsne/kernel.hpp"

#include <cmath>
#include <string>

#include "htsne/error.hpp"

namespace htsne {

namespace {

// Below this alpha, pow(base, alpha) loses accuracy for large d^2 and the
// log-space form is used instead.
constexpr double kLogSpaceAlpha = 0.3;
constexpr int kMaxIntegerExponent = 16;

void check_distance(double d_squared) {
  if (!std::isfinite(d_squared) || d_squared < 0.0) {
    throw InvalidInput("kernel: squared distance must be finite and nonnegative, got " +
                       std::to_string(d_squared));
  }
}

void require_simplified(const KernelParams& params, const char* what) {
  if (params.variant() != KernelVariant::Simplified) {
    throw InvalidArgument(std::string(what) +
                          " requires the Simplified variant; convert with to_simplified()");
  }
}

}  // namespace

KernelParams::KernelParams(double alpha, KernelVariant variant) : alpha_(alpha), variant_(variant) {
  if (!std::isfinite(alpha) || alpha <= 0.0) {
    throw InvalidArgument("kernel alpha must be a finite positive number, got " +
                          std::to_string(alpha));
  }
  if (variant == KernelVariant::Classic && !(alpha > 0.5)) {
    throw InvalidArgument("Classic kernel needs nu = 2*alpha - 1 > 0, got alpha = " +
                          std::to_string(alpha));
  }
}

KernelParams KernelParams::simplified(double alpha) {
  return KernelParams(alpha, KernelVariant::Simplified);
}

KernelParams KernelParams::classic(double alpha) { return KernelParams(alpha, KernelVariant::Classic); }

KernelParams KernelParams::classic_from_dof(double nu) {
  if (!std::isfinite(nu) || nu <= 0.0) {
    throw InvalidArgument("degrees of freedom must be positive, got " + std::to_string(nu));
  }
  return KernelParams((nu + 1.0) / 2.0, KernelVariant::Classic);
}

double kernel_value(double d_squared, const KernelParams& params) {
  check_distance(d_squared);
  if (params.variant() == KernelVariant::Classic) {
    const double nu = params.dof();
    return std::exp(-0.5 * (nu + 1.0) * std::log1p(d_squared / nu));
  }
  return Kernel(params).value(d_squared);
}

double attraction_weight(double d_squared, const KernelParams& params) {
  check_distance(d_squared);
  require_simplified(params, "attraction_weight");
  return Kernel(params).attraction(d_squared);
}

double repulsion_weight(double d_squared, const KernelParams& params) {
  check_distance(d_squared);
  require_simplified(params, "repulsion_weight");
  return Kernel(params).repulsion(d_squared);
}

SimplifiedForm to_simplified(const KernelParams& params) {
  if (params.variant() == KernelVariant::Simplified) return {params, 1.0};
  const double nu = params.dof();
  return {KernelParams::simplified(params.alpha()), std::sqrt(2.0 * nu / (nu + 1.0))};
}

Kernel::Kernel(const KernelParams& params) : alpha_(params.alpha()), inv_alpha_(1.0 / params.alpha()) {
  require_simplified(params, "Kernel");
  if (alpha_ == 1.0) {
    path_ = Path::Cauchy;
  } else if (alpha_ == 0.5) {
    path_ = Path::Half;
  } else if (alpha_ == std::floor(alpha_) && alpha_ <= kMaxIntegerExponent) {
    path_ = Path::Integer;
    integer_exponent_ = static_cast<int>(alpha_);
  } else if (alpha_ >= kLogSpaceAlpha) {
    path_ = Path::Power;
  } else {
    path_ = Path::LogSpace;
  }
}

double Kernel::value(double d2) const noexcept {
  const double base = attraction(d2);
  switch (path_) {
    case Path::Cauchy:
      return base;
    case Path::Half:
      return std::sqrt(base);
    case Path::Integer: {
      double w = base;
      for (int k = 1; k < integer_exponent_; ++k) w *= base;
      return w;
    }
    case Path::Power:
      return std::pow(base, alpha_);
    case Path::LogSpace:
      break;
  }
  return std::exp(log_value(d2));
}

double Kernel::log_value(double d2) const noexcept { return -alpha_ * std::log1p(d2 * inv_alpha_); }

}  // namespace htsne
