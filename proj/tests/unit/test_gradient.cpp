#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "htsne/error.hpp"
#include "htsne/experiments.hpp"
#include "htsne/gradient.hpp"
#include "htsne/interpolation.hpp"
#include "htsne/optimizer.hpp"
#include "oracles.hpp"

using namespace htsne;

namespace {

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m / max_abs(b);
}

Forces total(const ForceField& f) {
  Forces g(f.attractive.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = f.attractive[i] + f.repulsive[i];
  return g;
}

Embedding rotate(const Embedding& e, double angle) {
  Embedding r(e.size());
  const double c = std::cos(angle), s = std::sin(angle);
  for (std::size_t i = 0; i < e.size(); ++i) {
    r.x(i) = c * e.x(i) - s * e.y(i);
    r.y(i) = s * e.x(i) + c * e.y(i);
  }
  return r;
}

}  // namespace

TEST(Attraction, CoincidentPointsHaveNoForce) {
  const Embedding y(2, {1.0, 1.0, 1.0, 1.0});
  const auto p = oracle::to_sparse(oracle::random_affinities(2, 0));
  const auto f = attractive_forces(y, p, KernelParams::simplified(1.0));
  for (double v : f) EXPECT_EQ(v, 0.0);
}

TEST(Attraction, TwoPointsAtUnitDistance) {
  const Embedding y(2, {0.3, -0.2, 1.3, -0.2});
  const auto p = oracle::to_sparse(oracle::random_affinities(2, 0));
  ASSERT_DOUBLE_EQ(p.at(0, 1), 0.5);
  const auto f = attractive_forces(y, p, KernelParams::simplified(1.0));
  EXPECT_DOUBLE_EQ(f[0], -1.0);
  EXPECT_DOUBLE_EQ(f[1], 0.0);
  EXPECT_DOUBLE_EQ(f[2], 1.0);
  EXPECT_DOUBLE_EQ(f[3], 0.0);
}

TEST(Attraction, MatchesFiniteDifferences) {
  const std::size_t n = 20;
  const auto dense = oracle::random_affinities(n, 1);
  const auto p = oracle::to_sparse(dense);
  const auto y = oracle::gaussian_embedding(n, 1.0, 2);
  for (double a : {0.5, 1.0, 3.0}) {
    const auto params = KernelParams::simplified(a);
    auto attractive_loss = [&](const Embedding& e) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          if (i == j) continue;
          const double dx = e.x(i) - e.x(j), dy = e.y(i) - e.y(j);
          s -= dense(i, j) * std::log(oracle::kernel(dx * dx + dy * dy, a));
        }
      }
      return s;
    };
    const auto fd = oracle::finite_difference(attractive_loss, y, 1e-5);
    EXPECT_LT(max_rel_diff(attractive_forces(y, p, params), fd), 1e-6) << a;
  }
}

TEST(Repulsion, TwoPoints) {
  const Embedding y(2, {0.0, 0.0, 1.5, 2.0});
  for (double a : {0.3, 1.0, 7.0}) {
    const auto params = KernelParams::simplified(a);
    const auto r = repulsive_forces_exact(y, params);
    const double w = oracle::kernel(6.25, a);
    EXPECT_NEAR(r.z, 2.0 * w, 1e-15);
    const double factor = -2.0 / (1.0 + 6.25 / a);
    EXPECT_NEAR(r.forces[0], factor * -1.5, 1e-14);
    EXPECT_NEAR(r.forces[1], factor * -2.0, 1e-14);
    EXPECT_NEAR(r.forces[2], -r.forces[0], 1e-15);
    EXPECT_NEAR(r.forces[3], -r.forces[1], 1e-15);
  }
}

TEST(Repulsion, EquilateralTrianglePushesOutward) {
  Embedding y(3);
  for (std::size_t i = 0; i < 3; ++i) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / 3.0 + 0.1;
    y.x(i) = 2.0 + std::cos(t);
    y.y(i) = -1.0 + std::sin(t);
  }
  const auto r = repulsive_forces_exact(y, KernelParams::simplified(0.8));
  double mag0 = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    // The step direction -F must point away from the centroid (2, -1).
    const double ox = y.x(i) - 2.0, oy = y.y(i) + 1.0;
    const double fx = -r.forces[2 * i], fy = -r.forces[2 * i + 1];
    EXPECT_NEAR(fx * oy - fy * ox, 0.0, 1e-14);
    EXPECT_GT(fx * ox + fy * oy, 0.0);
    const double mag = std::hypot(fx, fy);
    if (i == 0) mag0 = mag;
    EXPECT_NEAR(mag, mag0, 1e-14);
  }
}

TEST(Repulsion, MatchesFiniteDifferencesOfLogZ) {
  const auto y = oracle::gaussian_embedding(20, 1.0, 3);
  const double a = 0.7;
  const auto params = KernelParams::simplified(a);
  auto log_z = [&](const Embedding& e) {
    double z = 0.0;
    oracle::repulsion(e, a, &z);
    return std::log(z);
  };
  const auto fd = oracle::finite_difference(log_z, y, 1e-5);
  EXPECT_LT(max_rel_diff(repulsive_forces_exact(y, params).forces, fd), 1e-6);
}

TEST(Repulsion, MatchesDirectOracle) {
  const auto y = oracle::gaussian_embedding(70, 3.0, 4);
  for (double a : {0.2, 0.5, 1.0, 2.0, 100.0}) {
    double z = 0.0;
    const auto expect = oracle::repulsion(y, a, &z);
    const auto r = repulsive_forces_exact(y, KernelParams::simplified(a));
    EXPECT_LT(max_rel_diff(r.forces, expect), 1e-12) << a;
    EXPECT_NEAR(r.z, z, 1e-12 * z);
    EXPECT_NEAR(normalization_exact(y, KernelParams::simplified(a)), z, 1e-12 * z);
  }
}

TEST(Gradient, SplitEqualsClosedForm) {
  for (double a : {0.5, 1.0, 2.0, 100.0}) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const std::size_t n = 15 + 10 * seed;
      const auto dense = oracle::random_affinities(n, seed);
      const auto p = oracle::to_sparse(dense);
      const auto y = oracle::gaussian_embedding(n, 2.0, seed + 10);
      const auto f = compute_forces(y, p, KernelParams::simplified(a), Solver::Exact, {});
      const auto g = total(f);
      const auto expect = oracle::closed_form_gradient(dense, y, a);
      for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(g[i], expect[i], 1e-10) << a << " " << i;
    }
  }
}

TEST(Gradient, MatchesFiniteDifferencesOfKl) {
  const std::size_t n = 50;
  for (double a : {0.5, 0.9, 1.0, 2.0, 100.0}) {
    const auto dense = oracle::random_affinities(n, 5);
    const auto p = oracle::to_sparse(dense);
    const auto y = oracle::gaussian_embedding(n, 1.0, 6);
    const auto params = KernelParams::simplified(a);
    auto kl = [&](const Embedding& e) { return kl_divergence(e, p, params, ZMode::Exact); };
    const auto fd = oracle::finite_difference(kl, y, 1e-5);
    const auto g = total(compute_forces(y, p, params, Solver::Exact, {}));
    EXPECT_LT(max_rel_diff(g, fd), 1e-5) << a;
  }
}

TEST(Kl, MatchesDenseOracle) {
  const auto dense = oracle::random_affinities(30, 7);
  const auto p = oracle::to_sparse(dense);
  const auto y = oracle::gaussian_embedding(30, 1.5, 8);
  for (double a : {0.5, 1.0, 4.0}) {
    const auto params = KernelParams::simplified(a);
    const double expect = oracle::kl(dense, y, a);
    EXPECT_NEAR(kl_divergence(y, p, params, ZMode::Exact), expect, 1e-12);
    const double z = normalization_exact(y, params);
    EXPECT_NEAR(kl_divergence_given_z(y, p, params, z), expect, 1e-12);
  }
}

TEST(Kl, ZeroWhenPEqualsQ) {
  const Embedding y(3, {0.0, 0.0, 1.0, 0.0, 0.2, 0.7});
  const double a = 0.8;
  double z = 0.0;
  oracle::repulsion(y, a, &z);
  oracle::Dense q{3, std::vector<double>(9, 0.0)};
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      if (i == j) continue;
      const double dx = y.x(i) - y.x(j), dy = y.y(i) - y.y(j);
      q(i, j) = oracle::kernel(dx * dx + dy * dy, a) / z;
    }
  }
  const auto p = oracle::to_sparse(q);
  EXPECT_NEAR(kl_divergence(y, p, KernelParams::simplified(a), ZMode::Exact), 0.0, 1e-14);
}

TEST(Kl, InterpZCloseToExact) {
  const auto toy = gen_gaussian_clusters(30, 10, 10, 4.0, 1);
  const auto p = build_affinities(toy.data, 20.0, NeighborMode::Exact, 0);
  const auto y = oracle::gaussian_embedding(300, 10.0, 2);
  const auto params = KernelParams::simplified(1.0);
  const double exact = kl_divergence(y, p, params, ZMode::Exact);
  const double interp = kl_divergence(y, p, params, ZMode::Interp);
  EXPECT_NEAR(interp, exact, 1e-3 * exact);
}

TEST(KlProperty, NonNegative) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const std::size_t n = 5 + seed * 3;
    const auto p = oracle::to_sparse(oracle::random_affinities(n, seed));
    const auto y = oracle::gaussian_embedding(n, 0.1 + seed, seed + 100);
    for (double a : {0.3, 1.0, 10.0}) {
      EXPECT_GE(kl_divergence(y, p, KernelParams::simplified(a), ZMode::Exact), 0.0);
    }
  }
}

TEST(Kl, DecreasesUnderOptimisation) {
  const auto toy = gen_gaussian_clusters(50, 10, 10, 4.0, 3);
  const auto p = build_affinities(toy.data, 50.0, NeighborMode::Exact, 0);
  const auto params = KernelParams::simplified(1.0);
  const auto init = pca_init(toy.data);
  OptimizerConfig opt;
  opt.loss_every = 0;
  const auto report = run(p, init, params, opt, {}, Solver::Exact);
  EXPECT_LT(report.final_kl, kl_divergence(init, p, params, ZMode::Exact));
}

TEST(GradientProperty, TranslationInvariance) {
  const auto p = oracle::to_sparse(oracle::random_affinities(40, 9));
  const auto y = oracle::gaussian_embedding(40, 2.0, 9);
  for (double a : {0.5, 1.0, 100.0}) {
    const auto g = total(compute_forces(y, p, KernelParams::simplified(a), Solver::Exact, {}));
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < 40; ++i) {
      sx += g[2 * i];
      sy += g[2 * i + 1];
    }
    EXPECT_LT(std::abs(sx), 1e-9 * max_abs(g));
    EXPECT_LT(std::abs(sy), 1e-9 * max_abs(g));
  }
}

TEST(GradientProperty, RotationEquivariance) {
  const auto p = oracle::to_sparse(oracle::random_affinities(40, 10));
  const auto y = oracle::gaussian_embedding(40, 2.0, 10);
  const double angle = std::numbers::pi / 6.0;
  const auto params = KernelParams::simplified(0.6);
  const auto g = total(compute_forces(y, p, params, Solver::Exact, {}));
  const auto gr = total(compute_forces(rotate(y, angle), p, params, Solver::Exact, {}));
  const double c = std::cos(angle), s = std::sin(angle);
  for (std::size_t i = 0; i < 40; ++i) {
    EXPECT_NEAR(gr[2 * i], c * g[2 * i] - s * g[2 * i + 1], 1e-9);
    EXPECT_NEAR(gr[2 * i + 1], s * g[2 * i] + c * g[2 * i + 1], 1e-9);
  }
}

TEST(Gradient, CoincidentPointsGiveFiniteForces) {
  const Embedding y(4, {0, 0, 0, 0, 0, 0, 1, 1});
  const auto p = oracle::to_sparse(oracle::random_affinities(4, 1));
  const auto f = compute_forces(y, p, KernelParams::simplified(0.5), Solver::Exact, {});
  EXPECT_GT(f.z, 0.0);
  for (double v : total(f)) EXPECT_TRUE(std::isfinite(v));
}

TEST(Gradient, RejectsMismatchedShapes) {
  const auto p = oracle::to_sparse(oracle::random_affinities(5, 0));
  const auto y = oracle::gaussian_embedding(6, 1.0, 0);
  EXPECT_THROW(attractive_forces(y, p, KernelParams::simplified(1.0)), InvalidArgument);
  EXPECT_THROW(kl_divergence(y, p, KernelParams::simplified(1.0), ZMode::Exact), InvalidArgument);
  EXPECT_THROW(attractive_forces(oracle::gaussian_embedding(5, 1.0, 0), p, KernelParams::classic(1.0)),
               InvalidArgument);
}
