#include "htsne/pca.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "htsne/error.hpp"

namespace htsne {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr std::size_t kExactMaxDim = 1000;
constexpr int kOversampling = 10;
constexpr int kPowerIterations = 4;

// Top `dims` eigenpairs of the covariance, descending.
void covariance_eigen(const Eigen::MatrixXd& centred, std::size_t dims, Eigen::MatrixXd& axes,
                      Eigen::VectorXd& values) {
  const auto n = static_cast<double>(centred.rows());
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(centred.cols(), centred.cols());
  cov.selfadjointView<Eigen::Lower>().rankUpdate(centred.transpose());
  cov = cov.selfadjointView<Eigen::Lower>();
  cov /= std::max(1.0, n - 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw Error("PCA: eigendecomposition failed");
  const auto d = static_cast<Eigen::Index>(dims);
  // Eigen returns ascending eigenvalues.
  axes = solver.eigenvectors().rightCols(d).rowwise().reverse();
  values = solver.eigenvalues().tail(d).reverse();
}

// Randomized range finder with subspace iteration.
void randomized_eigen(const Eigen::MatrixXd& centred, std::size_t dims, std::uint64_t seed,
                      Eigen::MatrixXd& axes, Eigen::VectorXd& values) {
  const auto n = centred.rows();
  const auto dim = centred.cols();
  const auto width = std::min<Eigen::Index>(static_cast<Eigen::Index>(dims) + kOversampling,
                                            std::min(n, dim));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd omega(dim, width);
  for (Eigen::Index c = 0; c < width; ++c) {
    for (Eigen::Index r = 0; r < dim; ++r) omega(r, c) = normal(rng);
  }
  Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(centred * omega).householderQ() *
                      Eigen::MatrixXd::Identity(n, width);
  for (int it = 0; it < kPowerIterations; ++it) {
    Eigen::MatrixXd z = Eigen::HouseholderQR<Eigen::MatrixXd>(centred.transpose() * q).householderQ() *
                        Eigen::MatrixXd::Identity(dim, width);
    q = Eigen::HouseholderQR<Eigen::MatrixXd>(centred * z).householderQ() *
        Eigen::MatrixXd::Identity(n, width);
  }
  const Eigen::MatrixXd b = q.transpose() * centred;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinV);
  const auto d = static_cast<Eigen::Index>(dims);
  axes = svd.matrixV().leftCols(d);
  values = svd.singularValues().head(d).array().square() / std::max(1.0, static_cast<double>(n) - 1.0);
}

}  // namespace

PcaResult principal_components(const DataMatrix& data, std::size_t dims, std::uint64_t seed) {
  validate_data(data, 1);
  const std::size_t n = data.rows();
  const std::size_t dim = data.cols();
  if (dims < 1 || dims > std::min(n, dim)) {
    throw InvalidArgument("PCA: dims must lie in [1, min(n, D)] = [1, " +
                          std::to_string(std::min(n, dim)) + "], got " + std::to_string(dims));
  }

  Eigen::Map<const RowMatrix> x(data.values().data(), static_cast<Eigen::Index>(n),
                                static_cast<Eigen::Index>(dim));
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd centred = x.rowwise() - mean;

  Eigen::MatrixXd axes;
  Eigen::VectorXd values;
  if (dim <= kExactMaxDim) {
    covariance_eigen(centred, dims, axes, values);
  } else {
    randomized_eigen(centred, dims, seed, axes, values);
  }

  for (Eigen::Index c = 0; c < axes.cols(); ++c) {
    Eigen::Index arg = 0;
    axes.col(c).cwiseAbs().maxCoeff(&arg);
    if (axes(arg, c) < 0.0) axes.col(c) *= -1.0;
  }
  const Eigen::MatrixXd scores = centred * axes;

  PcaResult out;
  out.scores = DataMatrix(n, dims);
  out.axes = DataMatrix(dim, dims);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < dims; ++c) {
      out.scores(i, c) = scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
    }
  }
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dims; ++c) {
      out.axes(r, c) = axes(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
  }
  out.variances.assign(values.data(), values.data() + values.size());
  for (double& v : out.variances) v = std::max(v, 0.0);
  out.mean.assign(mean.data(), mean.data() + mean.size());
  return out;
}

DataMatrix pca_reduce(const DataMatrix& data, std::size_t dims, std::uint64_t seed) {
  return principal_components(data, dims, seed).scores;
}

}  // namespace htsne
