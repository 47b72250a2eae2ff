#pragma once

#include <vector>

#include "core/filter_bank.hpp"
#include "core/spectral_density.hpp"

namespace alphaspec {

// The covariance map Gamma(phi) = int G phi G* together with precomputed data
// for working in its range: bank samples on the grid, an orthonormal basis of
// Range Gamma in the trace inner product, the frequency responses
// q_i(theta) = G* Lambda_i G of the basis elements, and the squared magnitude
// of det(e^{j theta} I - A). Immutable after construction and safe to share
// between threads.
class GammaOperator {
 public:
  GammaOperator(FilterBank bank, FrequencyGrid grid);

  const FilterBank& bank() const { return bank_; }
  const FrequencyGrid& grid() const { return grid_; }
  int state_size() const { return bank_.size(); }
  int dimension() const { return static_cast<int>(basis_.size()); }

  const Eigen::MatrixXcd& bank_samples() const { return samples_; }
  const std::vector<Eigen::MatrixXd>& basis() const { return basis_; }
  const Eigen::MatrixXd& basis_response() const { return basis_response_; }
  const Eigen::VectorXd& basis_traces() const { return basis_traces_; }
  const Eigen::ArrayXd& char_poly_magnitude() const { return char_poly_magnitude_; }

  // Gamma applied to grid samples: quadrature of G phi G* entrywise.
  Eigen::MatrixXd apply(const Eigen::ArrayXd& phi_values) const;
  Eigen::MatrixXd apply(const SpectralDensity& phi) const;

  // Coordinates of a symmetric matrix in the range basis, and the orthogonal
  // projection onto Range Gamma.
  Eigen::VectorXd coordinates(const Eigen::MatrixXd& m) const;
  Eigen::MatrixXd project(const Eigen::MatrixXd& m) const;

  // Assembles sum_i coords_i Lambda_i.
  Eigen::MatrixXd assemble(const Eigen::VectorXd& coords) const;

  // q(theta_k) = G* Lambda G with Lambda given by range coordinates.
  Eigen::ArrayXd response(const Eigen::VectorXd& coords) const;

  // sup over the grid of |G* Lambda G| for a symmetric Lambda. Vanishes (below
  // 1e-8) exactly on the orthogonal complement of Range Gamma.
  double max_frequency_response(const Eigen::MatrixXd& lambda) const;

 private:
  FilterBank bank_;
  FrequencyGrid grid_;
  Eigen::MatrixXcd samples_;
  std::vector<Eigen::MatrixXd> basis_;
  Eigen::MatrixXd basis_response_;
  Eigen::VectorXd basis_traces_;
  Eigen::ArrayXd char_poly_magnitude_;
};

struct FeasibilityReport {
  bool in_range = false;
  double range_residual = 0.0;
  bool positive_definite = false;
  double min_eigenvalue = 0.0;
  bool feasible = false;
  double tolerance = 0.0;
};

// Checks sigma against Range Gamma (Frobenius residual of the projection,
// tolerance rel_tol * ||sigma||_F) and positive definiteness.
FeasibilityReport feasibility_check(const GammaOperator& op, const Eigen::MatrixXd& sigma,
                                    double rel_tol = 1e-6);

// Solves the Stein equation P - A P A^T = B h^T + h B^T for a given h.
Eigen::MatrixXd stein_solution(const FilterBank& bank, const Eigen::VectorXd& h);

// Least-squares residual of P - A P A^T = B H + H^T B^T over H; below 1e-10
// exactly for members of Range Gamma.
double stein_residual(const FilterBank& bank, const Eigen::MatrixXd& p);

}  // namespace alphaspec
