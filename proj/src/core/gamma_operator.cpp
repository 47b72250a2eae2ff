#include "core/gamma_operator.hpp"

#include <cmath>
#include <complex>

namespace alphaspec {

namespace {

// Matrix of the linear map P -> P - A P A^T acting on column-major vec(P).
Eigen::MatrixXd stein_matrix(const Eigen::MatrixXd& A) {
  const int n = static_cast<int>(A.rows());
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n * n, n * n);
  for (int r = 0; r < n; ++r)
    for (int s = 0; s < n; ++s)
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) K(r + n * s, p + n * q) = A(r, p) * A(s, q);
  return Eigen::MatrixXd::Identity(n * n, n * n) - K;
}

// Design matrix of h -> vec(B h^T + h B^T).
Eigen::MatrixXd stein_rhs_matrix(const Eigen::VectorXd& B) {
  const int n = static_cast<int>(B.size());
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n * n, n);
  for (int j = 0; j < n; ++j) {
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, n);
    rhs.col(j) += B;
    rhs.row(j) += B.transpose();
    T.col(j) = Eigen::Map<const Eigen::VectorXd>(rhs.data(), n * n);
  }
  return T;
}

void check_symmetric(const Eigen::MatrixXd& m, const char* what) {
  require(m.rows() == m.cols(), ErrorCode::dimension_mismatch,
          std::string(what) + " must be square");
  require((m - m.transpose()).norm() <= 1e-8 * std::max(1.0, m.norm()),
          ErrorCode::invalid_argument, std::string(what) + " must be symmetric");
}

}  // namespace

Eigen::MatrixXd stein_solution(const FilterBank& bank, const Eigen::VectorXd& h) {
  const int n = bank.size();
  require(h.size() == n, ErrorCode::dimension_mismatch, "h length must match the bank");
  Eigen::MatrixXd rhs = bank.B * h.transpose() + h * bank.B.transpose();
  const Eigen::VectorXd vec_rhs = Eigen::Map<const Eigen::VectorXd>(rhs.data(), n * n);
  const Eigen::VectorXd vec_p = stein_matrix(bank.A).partialPivLu().solve(vec_rhs);
  Eigen::MatrixXd p = Eigen::Map<const Eigen::MatrixXd>(vec_p.data(), n, n);
  return 0.5 * (p + p.transpose());
}

double stein_residual(const FilterBank& bank, const Eigen::MatrixXd& p) {
  const int n = bank.size();
  require(p.rows() == n && p.cols() == n, ErrorCode::dimension_mismatch,
          "matrix size must match the bank");
  const Eigen::MatrixXd lhs = p - bank.A * p * bank.A.transpose();
  const Eigen::VectorXd vec_lhs = Eigen::Map<const Eigen::VectorXd>(lhs.data(), n * n);
  const Eigen::MatrixXd T = stein_rhs_matrix(bank.B);
  const Eigen::VectorXd h = T.colPivHouseholderQr().solve(vec_lhs);
  return (T * h - vec_lhs).norm();
}

GammaOperator::GammaOperator(FilterBank bank, FrequencyGrid grid)
    : bank_(std::move(bank)), grid_(std::move(grid)) {
  const int n = bank_.size();
  const int m = grid_.size();
  samples_ = evaluate_bank(bank_, grid_);

  // Solutions of the Stein equation for h = e_1..e_n span Range Gamma;
  // orthonormalize them in the trace inner product.
  Eigen::MatrixXd span(n * n, n);
  for (int k = 0; k < n; ++k) {
    const Eigen::MatrixXd p = stein_solution(bank_, Eigen::VectorXd::Unit(n, k));
    span.col(k) = Eigen::Map<const Eigen::VectorXd>(p.data(), n * n);
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(span, Eigen::ComputeThinU);
  const double smax = svd.singularValues()(0);
  int d = 0;
  while (d < n && svd.singularValues()(d) > 1e-10 * smax) ++d;
  basis_.reserve(d);
  for (int i = 0; i < d; ++i) {
    const Eigen::VectorXd col = svd.matrixU().col(i);
    Eigen::MatrixXd lambda = Eigen::Map<const Eigen::MatrixXd>(col.data(), n, n);
    basis_.push_back(0.5 * (lambda + lambda.transpose()));
  }

  basis_response_.resize(d, m);
  basis_traces_.resize(d);
  for (int i = 0; i < d; ++i) {
    const Eigen::VectorXcd q =
        (samples_.conjugate() * basis_[i]).cwiseProduct(samples_).rowwise().sum();
    basis_response_.row(i) = q.real().transpose();
    basis_traces_(i) = basis_[i].trace();
  }

  const Eigen::EigenSolver<Eigen::MatrixXd> eigen(bank_.A, false);
  const Eigen::VectorXcd poles = eigen.eigenvalues();
  char_poly_magnitude_.resize(m);
  for (int k = 0; k < m; ++k) {
    const std::complex<double> z(std::cos(grid_.theta()[k]), std::sin(grid_.theta()[k]));
    double prod = 1.0;
    for (int j = 0; j < n; ++j) prod *= std::norm(z - poles(j));
    char_poly_magnitude_[k] = prod;
  }
}

Eigen::MatrixXd GammaOperator::apply(const Eigen::ArrayXd& phi_values) const {
  require(phi_values.size() == grid_.size(), ErrorCode::grid_mismatch,
          "sample count does not match grid size");
  const Eigen::MatrixXcd accum = samples_.transpose() *
                                 phi_values.matrix().asDiagonal() * samples_.conjugate();
  const Eigen::MatrixXd real = accum.real() / static_cast<double>(grid_.size());
  return 0.5 * (real + real.transpose());
}

Eigen::MatrixXd GammaOperator::apply(const SpectralDensity& phi) const {
  return apply(phi.values());
}

Eigen::VectorXd GammaOperator::coordinates(const Eigen::MatrixXd& m) const {
  check_symmetric(m, "matrix");
  require(m.rows() == state_size(), ErrorCode::dimension_mismatch,
          "matrix size does not match the state dimension");
  Eigen::VectorXd coords(dimension());
  for (int i = 0; i < dimension(); ++i) coords(i) = m.cwiseProduct(basis_[i]).sum();
  return coords;
}

Eigen::MatrixXd GammaOperator::project(const Eigen::MatrixXd& m) const {
  return assemble(coordinates(m));
}

Eigen::MatrixXd GammaOperator::assemble(const Eigen::VectorXd& coords) const {
  require(coords.size() == dimension(), ErrorCode::dimension_mismatch,
          "coordinate count does not match the range dimension");
  Eigen::MatrixXd lambda = Eigen::MatrixXd::Zero(state_size(), state_size());
  for (int i = 0; i < dimension(); ++i) lambda += coords(i) * basis_[i];
  return lambda;
}

Eigen::ArrayXd GammaOperator::response(const Eigen::VectorXd& coords) const {
  require(coords.size() == dimension(), ErrorCode::dimension_mismatch,
          "coordinate count does not match the range dimension");
  return (basis_response_.transpose() * coords).array();
}

double GammaOperator::max_frequency_response(const Eigen::MatrixXd& lambda) const {
  check_symmetric(lambda, "lambda");
  require(lambda.rows() == state_size(), ErrorCode::dimension_mismatch,
          "lambda size does not match the state dimension");
  const Eigen::VectorXcd q =
      (samples_.conjugate() * lambda).cwiseProduct(samples_).rowwise().sum();
  return q.real().cwiseAbs().maxCoeff();
}

FeasibilityReport feasibility_check(const GammaOperator& op, const Eigen::MatrixXd& sigma,
                                    double rel_tol) {
  check_symmetric(sigma, "sigma");
  require(rel_tol > 0.0, ErrorCode::invalid_argument, "tolerance must be positive");
  FeasibilityReport report;
  report.tolerance = rel_tol * sigma.norm();
  report.range_residual = (sigma - op.project(sigma)).norm();
  report.in_range = report.range_residual < report.tolerance;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(sigma, Eigen::EigenvaluesOnly);
  report.min_eigenvalue = eigen.eigenvalues().minCoeff();
  report.positive_definite = report.min_eigenvalue > 0.0;
  report.feasible = report.in_range && report.positive_definite;
  return report;
}

}  // namespace alphaspec
