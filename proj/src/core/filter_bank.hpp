#pragma once

#include <optional>

#include <Eigen/Dense>

#include "core/grid.hpp"

namespace alphaspec {

// State-space filter bank G(z) = (zI - A)^{-1} B with A strictly stable,
// (A, B) reachable, and state dimension n > 1.
struct FilterBank {
  Eigen::MatrixXd A;
  Eigen::VectorXd B;

  int size() const { return static_cast<int>(A.rows()); }
};

// Validates stability (spectral radius of A below 1), reachability (full-rank
// controllability matrix), and n > 1, each with its own error code.
FilterBank build_filter_bank(Eigen::MatrixXd A, Eigen::VectorXd B);

// Delay-line bank with components G_i(z) = z^{-i}, i = 1..n: A is the
// subdiagonal shift, B = e_1. Its output covariance collects the first n
// autocovariance lags of the input.
FilterBank covariance_lag_bank(int n);

// Samples G(e^{j theta_k}) rowwise into an N x n complex matrix.
Eigen::MatrixXcd evaluate_bank(const FilterBank& bank, const FrequencyGrid& grid);

// Change of coordinates A -> S A S^{-1}, B -> S B with S the symmetric PD
// inverse square root of sigma, so that the constrained covariance becomes the
// identity. Requires sigma symmetric positive definite.
FilterBank normalize_bank(const FilterBank& bank, const Eigen::MatrixXd& sigma);

// When A is singular, every left null vector v of A gives the linear
// constraint quadrature(phi) = v^T v / (v^T B)^2 on densities phi with unit
// constrained covariance. Returns that value, or nullopt when A is
// nonsingular. Errors when independent null vectors disagree by more than
// 1e-9 or when v^T B vanishes.
std::optional<double> zeroth_moment_constraint(const FilterBank& bank);

}  // namespace alphaspec
