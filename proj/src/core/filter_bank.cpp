#include "core/filter_bank.hpp"

#include <cmath>
#include <complex>

namespace alphaspec {

FilterBank build_filter_bank(Eigen::MatrixXd A, Eigen::VectorXd B) {
  require(A.rows() == A.cols(), ErrorCode::dimension_mismatch, "A must be square");
  require(B.size() == A.rows(), ErrorCode::dimension_mismatch,
          "B length must match the state dimension");
  const int n = static_cast<int>(A.rows());
  require(n > 1, ErrorCode::bank_too_small, "state dimension must exceed 1");
  require(A.allFinite() && B.allFinite(), ErrorCode::invalid_argument,
          "bank entries must be finite");

  const Eigen::EigenSolver<Eigen::MatrixXd> eigen(A, false);
  const double radius = eigen.eigenvalues().cwiseAbs().maxCoeff();
  require(radius < 1.0, ErrorCode::unstable_bank,
          "spectral radius " + std::to_string(radius) + " is not below 1");

  Eigen::MatrixXd controllability(n, n);
  Eigen::VectorXd column = B;
  for (int k = 0; k < n; ++k) {
    controllability.col(k) = column;
    column = A * column;
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(controllability);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(n - 1);
  require(smax > 0.0 && smin > 1e-10 * smax, ErrorCode::unreachable_bank,
          "the pair (A, B) is not reachable");

  return FilterBank{std::move(A), std::move(B)};
}

FilterBank covariance_lag_bank(int n) {
  require(n >= 2, ErrorCode::bank_too_small, "lag bank needs at least 2 states");
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) A(i + 1, i) = 1.0;
  Eigen::VectorXd B = Eigen::VectorXd::Zero(n);
  B(0) = 1.0;
  return build_filter_bank(std::move(A), std::move(B));
}

Eigen::MatrixXcd evaluate_bank(const FilterBank& bank, const FrequencyGrid& grid) {
  const int n = bank.size();
  const int m = grid.size();
  const Eigen::MatrixXcd Ac = bank.A.cast<std::complex<double>>();
  const Eigen::VectorXcd Bc = bank.B.cast<std::complex<double>>();
  Eigen::MatrixXcd samples(m, n);
  for (int k = 0; k < m; ++k) {
    const std::complex<double> z(std::cos(grid.theta()[k]), std::sin(grid.theta()[k]));
    Eigen::MatrixXcd resolvent = -Ac;
    resolvent.diagonal().array() += z;
    samples.row(k) = resolvent.partialPivLu().solve(Bc).transpose();
  }
  return samples;
}

FilterBank normalize_bank(const FilterBank& bank, const Eigen::MatrixXd& sigma) {
  const int n = bank.size();
  require(sigma.rows() == n && sigma.cols() == n, ErrorCode::dimension_mismatch,
          "sigma size must match the state dimension");
  require((sigma - sigma.transpose()).norm() <= 1e-8 * std::max(1.0, sigma.norm()),
          ErrorCode::invalid_argument, "sigma must be symmetric");

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(sigma);
  require(eigen.eigenvalues().minCoeff() > 0.0, ErrorCode::not_positive_definite,
          "sigma must be positive definite");
  const Eigen::VectorXd inv_sqrt = eigen.eigenvalues().cwiseSqrt().cwiseInverse();
  const Eigen::VectorXd sqrt = eigen.eigenvalues().cwiseSqrt();
  const Eigen::MatrixXd S = eigen.eigenvectors() * inv_sqrt.asDiagonal() *
                            eigen.eigenvectors().transpose();
  const Eigen::MatrixXd S_inv = eigen.eigenvectors() * sqrt.asDiagonal() *
                                eigen.eigenvectors().transpose();
  return build_filter_bank(S * bank.A * S_inv, S * bank.B);
}

std::optional<double> zeroth_moment_constraint(const FilterBank& bank) {
  const int n = bank.size();
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(bank.A, Eigen::ComputeFullU);
  const double smax = svd.singularValues()(0);
  const double tol = 1e-10 * (smax > 0.0 ? smax : 1.0);

  int null_dim = 0;
  while (null_dim < n && svd.singularValues()(n - 1 - null_dim) <= tol) ++null_dim;
  if (null_dim == 0) return std::nullopt;

  double value = 0.0;
  for (int i = 0; i < null_dim; ++i) {
    const Eigen::VectorXd v = svd.matrixU().col(n - 1 - i);
    const double denom = v.dot(bank.B);
    require(std::abs(denom) > 1e-12 * bank.B.norm(), ErrorCode::inconsistent_moment,
            "moment constraint direction is orthogonal to B (inconsistent bank)");
    const double candidate = 1.0 / (denom * denom);
    if (i == 0) {
      value = candidate;
    } else {
      require(std::abs(candidate - value) <= 1e-9 * std::max(1.0, std::abs(value)),
              ErrorCode::inconsistent_moment,
              "independent null directions give conflicting zeroth moments");
    }
  }
  return value;
}

}  // namespace alphaspec
