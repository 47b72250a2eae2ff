#pragma once

#include <json.hpp>

#include "core/dual_solver.hpp"
#include "core/estimation.hpp"

namespace alphaspec {

using Json = nlohmann::json;

// Parsers are lenient about unknown keys (e.g. "_comment") and strict about
// the shapes of the keys they read; every failure becomes an Error with code
// invalid_argument naming the offending key.

Eigen::MatrixXd matrix_from_json(const Json& j);
Json matrix_to_json(const Eigen::MatrixXd& m);
Json array_to_json(const Eigen::ArrayXd& values);
Eigen::VectorXd vector_from_json(const Json& j);

RationalSpec rational_spec_from_json(const Json& j);
FilterBank filter_bank_from_json(const Json& j);
ArmaModel arma_model_from_json(const Json& j);
DivergenceSpec divergence_spec_from_json(const Json& j);

// A full problem instance: prior, filter bank, target covariance, grid and
// solver knobs. "sigma" accepts a matrix, the string "identity", or may be
// absent (identity). A missing prior defaults to the constant 1.
struct ProblemConfig {
  RationalSpec prior = RationalSpec::constant(1.0);
  FilterBank bank;
  Eigen::MatrixXd sigma;
  int grid_size = 2048;
  double tolerance = 1e-9;
  int max_iterations = 200;
};

ProblemConfig problem_config_from_json(const Json& j);

Json feasibility_report_to_json(const FeasibilityReport& report);
// Mirrors SolveResult with the spectra inlined as plot-ready arrays.
Json solve_result_to_json(const SolveResult& result, const SpectralDensity& psi,
                          const NuParameter& nu);

}  // namespace alphaspec
