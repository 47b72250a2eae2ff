#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/gamma_operator.hpp"

namespace alphaspec {

// Scalar ARMA model y = (num(z)/den(z)) e with unit-variance white Gaussian
// innovations e scaled by sqrt(variance). Coefficients are ascending powers
// of z; the model is causal (deg num <= deg den) and stable (den roots
// strictly inside the unit disk).
struct ArmaModel {
  std::vector<double> num;
  std::vector<double> den;
  double variance = 1.0;
};

struct SampleSeries {
  Eigen::VectorXd values;
  std::uint64_t seed = 0;
  int size() const { return static_cast<int>(values.size()); }
};

// Generates burn_in + length samples by the causal ARMA recursion driven by a
// deterministic Gaussian stream (fixed generator and transform, identical
// across platforms) and returns the last `length` of them.
SampleSeries simulate_arma(const ArmaModel& model, int length, std::uint64_t seed,
                           int burn_in = 1000);

// Filter-bank states x_{k+1} = A x_k + B y_k from x_0 = 0; row k holds
// x_{k+1}^T, one row per input sample.
Eigen::MatrixXd filter_states(const FilterBank& bank, const Eigen::VectorXd& series);

struct CovarianceEstimate {
  Eigen::MatrixXd raw;
  Eigen::MatrixXd conditioned;
  FeasibilityReport report;
  bool floored = false;
};

// Sample state covariance (1/N) sum x_k x_k^T with the first n states
// discarded, projected onto Range Gamma and eigenvalue-floored if needed so
// that the conditioned matrix always passes feasibility_check; errors instead
// of returning an infeasible estimate.
CovarianceEstimate estimate_sigma(const GammaOperator& op, const Eigen::VectorXd& series);

// The model's spectral density as a transfer-function spec, |num/den|^2
// scaled by the innovation variance.
RationalSpec arma_spectrum(const ArmaModel& model);

// Single-column CSV of samples, full double precision.
void write_series_csv(const std::string& path, const Eigen::VectorXd& series);
Eigen::VectorXd read_series_csv(const std::string& path);

}  // namespace alphaspec
