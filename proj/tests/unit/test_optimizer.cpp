#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "htsne/error.hpp"
#include "htsne/experiments.hpp"
#include "htsne/gradient.hpp"
#include "htsne/metrics.hpp"
#include "htsne/optimizer.hpp"
#include "oracles.hpp"

using namespace htsne;

namespace {

struct Toy {
  LabeledData data;
  SparseAffinity p;
  Embedding init;
};

const Toy& toy10() {
  static const Toy t = [] {
    Toy t;
    t.data = gen_gaussian_clusters(100, 10, 10, 4.0, 0);
    t.p = build_affinities(t.data.data, 50.0, NeighborMode::Exact, 0);
    t.init = pca_init(t.data.data);
    return t;
  }();
  return t;
}

OptimizerConfig quiet() {
  OptimizerConfig opt;
  opt.loss_every = 0;
  opt.strict_deterministic = true;
  return opt;
}

double sample_sd(const std::vector<double>& v) {
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / v.size());
}

std::vector<double> column(const Embedding& e, int c) {
  std::vector<double> v(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) v[i] = c == 0 ? e.x(i) : e.y(i);
  return v;
}

int sgn(double x) { return (x > 0) - (x < 0); }

}  // namespace

TEST(PcaInit, AxisAlignedData) {
  const auto z = oracle::gaussian_matrix(500, 2, 1);
  DataMatrix x(500, 2);
  for (std::size_t i = 0; i < 500; ++i) {
    x(i, 0) = 2.0 * z(i, 0);
    x(i, 1) = z(i, 1);
  }
  const auto e = pca_init(x);
  EXPECT_NEAR(sample_sd(column(e, 0)), 1e-4, 1e-16);
  // PC1 follows the first input axis closely since its variance dominates.
  double dot = 0.0, nx = 0.0, ne = 0.0;
  double mx = 0.0;
  for (std::size_t i = 0; i < 500; ++i) mx += x(i, 0) / 500;
  for (std::size_t i = 0; i < 500; ++i) {
    dot += (x(i, 0) - mx) * e.x(i);
    nx += (x(i, 0) - mx) * (x(i, 0) - mx);
    ne += e.x(i) * e.x(i);
  }
  EXPECT_GT(std::abs(dot) / std::sqrt(nx * ne), 0.99);
}

TEST(PcaInit, ExactDiagonalCovariance) {
  // Four points whose covariance is exactly diagonal with variances 4 and 1.
  const DataMatrix x(4, 2, {2, 1, -2, 1, 2, -1, -2, -1});
  const auto e = pca_init(x);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(std::abs(e.x(i)), 1e-4, 1e-18);
    EXPECT_NEAR(std::abs(e.y(i)), 0.5e-4, 1e-18);
    EXPECT_NEAR(e.x(i) * x(0, 0), e.x(0) * x(i, 0), 1e-18);
    EXPECT_NEAR(e.y(i) * x(0, 1), e.y(0) * x(i, 1), 1e-18);
  }
  EXPECT_NEAR(sample_sd(column(e, 0)), 1e-4, 1e-16);
}

TEST(PcaInit, FirstColumnSdEqualsScale) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto x = oracle::gaussian_matrix(100 + seed * 37, 3 + seed, seed);
    for (double scale : {1e-4, 1.0, 3.5}) {
      const auto e = pca_init(x, scale);
      EXPECT_NEAR(sample_sd(column(e, 0)), scale, 1e-12 * scale);
    }
  }
}

TEST(PcaInit, MatchesEigenOracleUpToSign) {
  auto x = oracle::gaussian_matrix(200, 10, 4);
  for (std::size_t i = 0; i < 200; ++i) {
    for (std::size_t c = 0; c < 10; ++c) x(i, c) *= 10.0 - c;
  }
  const auto e = pca_init(x);
  std::vector<double> values, vectors;
  oracle::jacobi_eigen(oracle::covariance(x), 10, values, vectors);
  std::vector<double> mean(10, 0.0);
  for (std::size_t i = 0; i < 200; ++i) {
    for (std::size_t c = 0; c < 10; ++c) mean[c] += x(i, c) / 200;
  }
  std::vector<double> proj(400);
  for (std::size_t i = 0; i < 200; ++i) {
    for (std::size_t c = 0; c < 2; ++c) {
      double s = 0.0;
      for (std::size_t f = 0; f < 10; ++f) s += (x(i, f) - mean[f]) * vectors[f * 10 + c];
      proj[2 * i + c] = s;
    }
  }
  std::vector<double> p0(200);
  for (std::size_t i = 0; i < 200; ++i) p0[i] = proj[2 * i];
  const double factor = 1e-4 / sample_sd(p0);
  for (std::size_t c = 0; c < 2; ++c) {
    const double sign = (c == 0 ? e.x(0) : e.y(0)) * proj[c] < 0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < 200; ++i) {
      const double got = c == 0 ? e.x(i) : e.y(i);
      EXPECT_NEAR(got, sign * factor * proj[2 * i + c], 1e-8 * 1e-4);
    }
  }
}

TEST(PcaInit, RankDeficientWarnsAndFillsNoise) {
  DataMatrix x(50, 3);
  for (std::size_t i = 0; i < 50; ++i) {
    x(i, 0) = static_cast<double>(i);
    x(i, 1) = 2.0 * static_cast<double>(i);
    x(i, 2) = -static_cast<double>(i);
  }
  std::vector<std::string> warnings;
  const auto e = pca_init(x, 1e-4, 3, &warnings);
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NEAR(sample_sd(column(e, 0)), 1e-4, 1e-16);
  const double sd1 = sample_sd(column(e, 1));
  EXPECT_GT(sd1, 0.0);
  EXPECT_LT(sd1, 3e-6);
  EXPECT_TRUE(e.all_finite());
}

TEST(PcaInit, ConstantDataIsAllNoise) {
  const DataMatrix x(10, 2, std::vector<double>(20, 1.0));
  std::vector<std::string> warnings;
  const auto e = pca_init(x, 1e-4, 0, &warnings);
  EXPECT_EQ(warnings.size(), 1u);
  EXPECT_TRUE(e.all_finite());
  EXPECT_GT(e.span(), 0.0);
}

TEST(PcaInit, RejectsOneDimensionalData) {
  EXPECT_THROW(pca_init(DataMatrix(5, 1, {1, 2, 3, 4, 5})), InvalidArgument);
}

TEST(RandomInit, Deterministic) {
  EXPECT_EQ(random_init(100, 1e-4, 7), random_init(100, 1e-4, 7));
  EXPECT_FALSE(random_init(100, 1e-4, 7) == random_init(100, 1e-4, 8));
}

TEST(RandomInit, StandardDeviation) {
  const auto e = random_init(10000, 1e-4, 1);
  std::vector<double> all(e.coords().begin(), e.coords().end());
  EXPECT_NEAR(sample_sd(all), 1e-4, 0.03e-4);
  EXPECT_NEAR(sample_sd(column(e, 0)), 1e-4, 0.03e-4);
}

TEST(Optimizer, ZeroIterationsReturnsInit) {
  const auto& t = toy10();
  OptimizerConfig opt = quiet();
  opt.iterations = 0;
  opt.early_exaggeration_length = 0;
  opt.momentum_switch_iter = 0;
  const auto r = run(t.p, t.init, KernelParams::simplified(1.0), opt, {}, Solver::Exact);
  EXPECT_EQ(r.final_embedding, t.init);
  ASSERT_EQ(r.loss_trace.size(), 1u);
  EXPECT_EQ(r.loss_trace[0].iteration, 0);
}

TEST(Optimizer, FirstTwoStepsFollowUpdateRule) {
  const auto x = oracle::gaussian_matrix(30, 4, 2);
  const auto p = build_affinities(x, 5.0, NeighborMode::Exact, 0);
  const auto init = pca_init(x, 1.0);
  const auto params = KernelParams::simplified(0.8);
  OptimizerConfig opt = quiet();
  opt.iterations = 2;
  opt.early_exaggeration_length = 1;
  opt.momentum_switch_iter = 1;
  opt.early_exaggeration = 4.0;
  opt.late_exaggeration = 1.5;
  opt.learning_rate = 10.0;
  const auto r = run(p, init, params, opt, {}, Solver::Exact);

  Embedding y = init;
  std::vector<double> gains(60, 1.0), update(60, 0.0);
  for (int it = 0; it < 2; ++it) {
    const auto f = compute_forces(y, p, params, Solver::Exact, {});
    const double ex = it == 0 ? 4.0 : 1.5;
    const double mom = it == 0 ? 0.5 : 0.8;
    for (std::size_t c = 0; c < 60; ++c) {
      const double g = ex * f.attractive[c] + f.repulsive[c];
      gains[c] = sgn(g) != sgn(update[c]) ? gains[c] + 0.2 : std::max(gains[c] * 0.8, 0.01);
      update[c] = mom * update[c] - 2.5 * gains[c] * g;
      y.coords()[c] += update[c];
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < 30; ++i) {
      mx += y.x(i) / 30;
      my += y.y(i) / 30;
    }
    for (std::size_t i = 0; i < 30; ++i) {
      y.x(i) -= mx;
      y.y(i) -= my;
    }
  }
  for (std::size_t c = 0; c < 60; ++c) EXPECT_NEAR(r.final_embedding.coords()[c], y.coords()[c], 1e-12);
}

TEST(Optimizer, StrictDeterminism) {
  const auto& t = toy10();
  OptimizerConfig opt = quiet();
  opt.iterations = 300;
  const auto a = run(t.p, t.init, KernelParams::simplified(0.7), opt, {}, Solver::Accelerated);
  const auto b = run(t.p, t.init, KernelParams::simplified(0.7), opt, {}, Solver::Accelerated);
  EXPECT_EQ(a.final_embedding, b.final_embedding);
  EXPECT_EQ(a.final_kl, b.final_kl);
}

TEST(Optimizer, ToyTenAtCauchyFindsTenClusters) {
  const auto& t = toy10();
  const auto r = run(t.p, t.init, KernelParams::simplified(1.0), quiet(), {}, Solver::Exact);
  const auto& e = r.final_embedding;
  const auto db = dbscan_clusters(e, adaptive_eps(e), kDbscanMinPts);
  EXPECT_EQ(db.cluster_count, 10);
  EXPECT_LT(r.final_kl, 2.0);
}

TEST(Optimizer, SeparationIncreasesAsAlphaDecreases) {
  const auto& t = toy10();
  double prev = 0.0;
  for (double a : {100.0, 1.0, 0.5}) {
    const auto r = run(t.p, t.init, KernelParams::simplified(a), quiet(), {}, Solver::Exact);
    const double s = mean_separation_ratio(r.final_embedding, t.data.labels);
    EXPECT_GT(s, prev) << "alpha " << a;
    prev = s;
  }
}

TEST(Optimizer, KlMostlyNonIncreasingWithoutExaggeration) {
  const auto& t = toy10();
  for (double a : {0.5, 1.0, 100.0}) {
    OptimizerConfig opt = quiet();
    opt.early_exaggeration = 1.0;
    opt.loss_every = 10;
    const auto r = run(t.p, t.init, KernelParams::simplified(a), opt, {}, Solver::Exact);
    const auto& tr = r.loss_trace;
    for (std::size_t i = 0; i + 10 < tr.size(); ++i) {
      ASSERT_EQ(tr[i + 10].iteration - tr[i].iteration, 100);
      EXPECT_LE(tr[i + 10].kl, tr[i].kl * 1.01) << "alpha " << a << " window at " << tr[i].iteration;
    }
  }
}

TEST(Optimizer, ScaledInitReachesSimilarKl) {
  const auto& t = toy10();
  Embedding big = t.init;
  for (double& c : big.coords()) c *= 10.0;
  const auto params = KernelParams::simplified(1.0);
  const auto a = run(t.p, t.init, params, quiet(), {}, Solver::Exact);
  const auto b = run(t.p, big, params, quiet(), {}, Solver::Exact);
  EXPECT_NEAR(b.final_kl, a.final_kl, 0.05 * a.final_kl);
}

TEST(Optimizer, ClassicNuOneIsIdenticalToSimplified) {
  const auto& t = toy10();
  OptimizerConfig opt = quiet();
  opt.iterations = 200;
  opt.early_exaggeration_length = 100;
  opt.momentum_switch_iter = 100;
  const auto s = run(t.p, t.init, KernelParams::simplified(1.0), opt, {}, Solver::Exact);
  const auto c = run(t.p, t.init, KernelParams::classic_from_dof(1.0), opt, {}, Solver::Exact);
  EXPECT_EQ(s.final_embedding, c.final_embedding);
}

TEST(Optimizer, ClassicIsRescaledSimplifiedRun) {
  const auto& t = toy10();
  OptimizerConfig opt = quiet();
  opt.iterations = 100;
  opt.early_exaggeration_length = 50;
  opt.momentum_switch_iter = 50;
  const auto classic = KernelParams::classic_from_dof(3.0);
  const double scale = std::sqrt(1.5);
  Embedding init = t.init;
  for (double& c : init.coords()) c /= scale;
  const auto s = run(t.p, init, KernelParams::simplified(2.0), opt, {}, Solver::Exact);
  const auto c = run(t.p, t.init, classic, opt, {}, Solver::Exact);
  for (std::size_t k = 0; k < 2 * t.init.size(); ++k) {
    EXPECT_NEAR(c.final_embedding.coords()[k], s.final_embedding.coords()[k] * scale,
                1e-9 * std::max(1.0, std::abs(c.final_embedding.coords()[k])));
  }
}

TEST(Optimizer, LossTraceAndProgress) {
  const auto& t = toy10();
  OptimizerConfig opt;
  opt.iterations = 120;
  opt.early_exaggeration_length = 50;
  opt.momentum_switch_iter = 50;
  std::vector<int> seen;
  std::vector<double> seen_kl;
  RunHooks hooks;
  hooks.progress_every = 50;
  hooks.progress = [&](int it, double kl, const Embedding& e) {
    seen.push_back(it);
    seen_kl.push_back(kl);
    EXPECT_EQ(e.generation, it);
  };
  const auto r = run(t.p, t.init, KernelParams::simplified(1.0), opt, {}, Solver::Exact, hooks);
  EXPECT_EQ(seen, (std::vector<int>{0, 50, 100}));
  ASSERT_EQ(r.loss_trace.size(), 4u);
  EXPECT_EQ(r.loss_trace[0].iteration, 0);
  EXPECT_EQ(r.loss_trace[1].iteration, 50);
  EXPECT_EQ(r.loss_trace[2].iteration, 100);
  EXPECT_EQ(r.loss_trace[3].iteration, 120);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(r.loss_trace[i].kl, seen_kl[i]);
  for (const auto& s : r.loss_trace) EXPECT_TRUE(std::isfinite(s.kl));
  EXPECT_EQ(r.loss_trace.back().kl, r.final_kl);
  EXPECT_NEAR(r.final_kl, kl_divergence(r.final_embedding, t.p, KernelParams::simplified(1.0), ZMode::Exact),
              1e-12);
  EXPECT_DOUBLE_EQ(r.final_span, r.final_embedding.span());
  EXPECT_GT(r.wall_time_seconds, 0.0);
  EXPECT_TRUE(r.warnings.empty());
}

TEST(Optimizer, SnapshotDescribesRun) {
  const auto& t = toy10();
  OptimizerConfig opt = quiet();
  opt.iterations = 1;
  opt.early_exaggeration_length = 1;
  opt.momentum_switch_iter = 1;
  opt.learning_rate = 321.0;
  const auto r = run(t.p, t.init, KernelParams::simplified(0.75), opt, {}, Solver::Accelerated);
  const auto j = nlohmann::json::parse(r.config_snapshot);
  EXPECT_EQ(j.at("n").get<int>(), 1000);
  EXPECT_DOUBLE_EQ(j.at("kernel").at("alpha").get<double>(), 0.75);
  EXPECT_DOUBLE_EQ(j.at("optimizer").at("learning_rate").get<double>(), 321.0);
  EXPECT_TRUE(j.contains("solver"));
  EXPECT_TRUE(j.contains("interp"));
}

TEST(Optimizer, WarnsForSmallAlpha) {
  const auto& t = toy10();
  OptimizerConfig opt = quiet();
  opt.iterations = 1;
  opt.early_exaggeration_length = 1;
  opt.momentum_switch_iter = 1;
  const auto r = run(t.p, t.init, KernelParams::simplified(0.3), opt, {}, Solver::Exact);
  ASSERT_FALSE(r.warnings.empty());
  EXPECT_NE(r.warnings[0].find("0.5"), std::string::npos);
}

TEST(Optimizer, NonFiniteCoordinatesAbort) {
  const auto x = oracle::gaussian_matrix(20, 3, 1);
  const auto p = build_affinities(x, 3.0, NeighborMode::Exact, 0);
  OptimizerConfig opt = quiet();
  opt.learning_rate = 1e307;
  opt.iterations = 50;
  opt.early_exaggeration_length = 10;
  opt.momentum_switch_iter = 10;
  try {
    run(p, random_init(20, 1.0, 0), KernelParams::simplified(1.0), opt, {}, Solver::Exact);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("iteration"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("gradient"), std::string::npos);
  }
}

TEST(Optimizer, RejectsBadInput) {
  const auto& t = toy10();
  const auto params = KernelParams::simplified(1.0);
  EXPECT_THROW(run(t.p, random_init(10, 1e-4, 0), params, quiet(), {}, Solver::Exact), InvalidArgument);
  Embedding bad = t.init;
  bad.x(3) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(run(t.p, bad, params, quiet(), {}, Solver::Exact), InvalidInput);
}

TEST(OptimizerConfigValidation, Ranges) {
  EXPECT_NO_THROW(validate(OptimizerConfig{}));
  auto bad = [](auto mutate) {
    OptimizerConfig c;
    mutate(c);
    EXPECT_THROW(validate(c), InvalidArgument);
  };
  bad([](OptimizerConfig& c) { c.iterations = -1; });
  bad([](OptimizerConfig& c) { c.learning_rate = 0.0; });
  bad([](OptimizerConfig& c) { c.early_exaggeration = -2.0; });
  bad([](OptimizerConfig& c) { c.late_exaggeration = 0.0; });
  bad([](OptimizerConfig& c) { c.early_exaggeration_length = 1001; });
  bad([](OptimizerConfig& c) { c.momentum_switch_iter = 2000; });
  bad([](OptimizerConfig& c) { c.momentum_initial = 1.0; });
  bad([](OptimizerConfig& c) { c.momentum_final = -0.1; });
  bad([](OptimizerConfig& c) { c.loss_every = -5; });
}
