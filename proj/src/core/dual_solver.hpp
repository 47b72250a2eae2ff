#pragma once

#include <string>
#include <vector>

#include "core/divergence.hpp"
#include "core/gamma_operator.hpp"

namespace alphaspec {

// Order parameter of the approximation family: an integer nu >= 1 or infinity.
// nu = 1 targets the Kullback-Leibler distance from the prior to the solution,
// finite nu > 1 the intermediate family members, and nu = infinity the reversed
// Kullback-Leibler distance with an exponential-form solution.
class NuParameter {
 public:
  static NuParameter finite(int nu);
  static NuParameter infinity();
  // Accepts a positive integer literal or "inf".
  static NuParameter parse(const std::string& text);

  bool is_infinite() const { return infinite_; }
  int value() const;
  std::string str() const;

  friend bool operator==(const NuParameter& a, const NuParameter& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }

 private:
  NuParameter(bool infinite, int value) : infinite_(infinite), value_(value) {}
  bool infinite_ = false;
  int value_ = 1;
};

// A Lagrange multiplier constrained to Range Gamma, carried both as
// coordinates in the orthonormal range basis and as the assembled matrix.
struct Multiplier {
  Eigen::VectorXd coords;
  Eigen::MatrixXd matrix;
};

Multiplier zero_multiplier(const GammaOperator& op);
Multiplier make_multiplier(const GammaOperator& op, const Eigen::VectorXd& coords);
// Requires m symmetric and in Range Gamma (relative residual below 1e-10);
// the stored matrix is re-assembled from the projected coordinates.
Multiplier multiplier_from_matrix(const GammaOperator& op, const Eigen::MatrixXd& m);

struct AdmissibilityResult {
  bool admissible = false;
  // min over the grid of 1 + (1/nu) G* Lambda G; 1 for nu = infinity where
  // every multiplier in Range Gamma is admissible.
  double margin = 0.0;
};

AdmissibilityResult admissible(const GammaOperator& op, const NuParameter& nu,
                               const Multiplier& lambda, double eps_pos = 1e-12);

// Optimal primal form for a multiplier: Psi * (1 + (1/nu) G* Lambda G)^(-nu)
// for finite nu, Psi * exp(-G* Lambda G) for nu = infinity.
SpectralDensity phi_from_multiplier(const GammaOperator& op, const NuParameter& nu,
                                    const Multiplier& lambda, const SpectralDensity& psi,
                                    double eps_pos = 1e-12);

// Dual functional J(Lambda). J(0) = 0 for nu = 1, nu/(nu-1) * int Psi for
// finite nu > 1, and int Psi for nu = infinity.
double dual_value(const GammaOperator& op, const NuParameter& nu, const Multiplier& lambda,
                  const SpectralDensity& psi, double eps_pos = 1e-12);

// Gradient of J in range-basis coordinates:
// g_i = <I - Gamma(phi_from_multiplier), Lambda_i>.
Eigen::VectorXd dual_gradient(const GammaOperator& op, const NuParameter& nu,
                              const Multiplier& lambda, const SpectralDensity& psi,
                              double eps_pos = 1e-12);

// Hessian H_ij = int w(theta) q_i q_j with weight Psi * r^(-nu-1) for finite
// nu and Psi * exp(-q) for nu = infinity; positive definite on the admissible
// set by strict convexity of J.
Eigen::MatrixXd dual_hessian(const GammaOperator& op, const NuParameter& nu,
                             const Multiplier& lambda, const SpectralDensity& psi,
                             double eps_pos = 1e-12);

struct SolverConfig {
  double gradient_tolerance = 1e-9;
  int max_iterations = 200;
  double armijo_slope = 1e-4;
  double eps_pos = 1e-12;
  double min_step = 1e-14;
};

struct TraceEntry {
  int iteration = 0;
  double dual_value = 0.0;
  double gradient_norm = 0.0;
  double step = 0.0;
};

struct SolveResult {
  Multiplier lambda_opt;
  SpectralDensity phi_opt;
  double dual_value = 0.0;
  // s_nu(phi_opt, psi) for the solved nu; equals the constrained minimum by
  // strong duality.
  double primal_value = 0.0;
  // || Gamma(phi_opt) - I ||_F for the operator's (normalized) bank.
  double constraint_residual = 0.0;
  int iterations = 0;
  std::vector<TraceEntry> trace;
};

// Damped Newton iteration on J over Range Gamma coordinates, started at
// Lambda = 0 (margin 1), with step halving until the candidate is admissible
// and satisfies the Armijo decrease test. Stops when the gradient 2-norm
// falls below the tolerance. The operator is expected to hold a normalized
// bank so that the constraint reads Gamma(Phi) = I.
SolveResult newton_solve(const GammaOperator& op, const NuParameter& nu,
                         const SpectralDensity& psi, const SolverConfig& config = {});

// Closed-form solution for the zeroth member of the reversed family with a
// constant prior: Phi = (B*B) / |G* B|^2.
SpectralDensity kl0_closed_form(const GammaOperator& op);

// sup over the grid of |Phi_nu(Lambda) - Phi_inf(Lambda)| at a fixed
// multiplier; decays like O(1/nu) as nu grows.
double uniform_convergence_gap(const GammaOperator& op, const Multiplier& lambda,
                               const SpectralDensity& psi, const NuParameter& nu,
                               double eps_pos = 1e-12);

// Certifies that r(theta) = 1 + (1/nu) G* Lambda G is, up to the factor
// |det(e^{j theta} I - A)|^2, a trigonometric polynomial of degree <= n:
// returns the largest |c_k| of r * |det|^2 for lags k > n, which bounds the
// degree of Phi = Psi * r^(-nu). For lag banks |det|^2 = 1 and the
// certificate applies to r itself.
double degree_certificate(const GammaOperator& op, const NuParameter& nu,
                          const Multiplier& lambda);

// Divergence minimized at order nu: KL(psi || phi) for nu = 1, the integer
// family member for finite nu > 1, KL(phi || psi) for nu = infinity.
double s_nu(const SpectralDensity& phi, const SpectralDensity& psi, const NuParameter& nu);

}  // namespace alphaspec
