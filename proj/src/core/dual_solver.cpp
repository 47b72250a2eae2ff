#include "core/dual_solver.hpp"

#include <cmath>
#include <sstream>

namespace alphaspec {

namespace {

void check_grid(const GammaOperator& op, const SpectralDensity& psi) {
  require(psi.size() == op.grid().size(), ErrorCode::grid_mismatch,
          "prior grid does not match the operator grid");
}

void check_multiplier(const GammaOperator& op, const Multiplier& lambda) {
  require(lambda.coords.size() == op.dimension(), ErrorCode::dimension_mismatch,
          "multiplier coordinate count does not match the range dimension");
}

// r(theta) = 1 + (1/nu) q(theta) for finite nu; unused for nu = infinity.
Eigen::ArrayXd r_values(const Eigen::ArrayXd& q, const NuParameter& nu) {
  return 1.0 + q / static_cast<double>(nu.value());
}

[[noreturn]] void fail_inadmissible(double margin) {
  std::ostringstream msg;
  msg << "multiplier is inadmissible: min(1 + q/nu) = " << margin;
  fail(ErrorCode::inadmissible_multiplier, msg.str());
}

// Below this gradient norm the iterate is inside the quadratic basin (the
// Hessian is positive definite throughout the admissible set) and full Newton
// steps are taken without the Armijo test: near the optimum the true decrease
// per step falls under the double-precision resolution of J, so a sufficient
// decrease condition can no longer be certified even though the step is
// sound.
constexpr double kLocalPhaseGradientNorm = 1e-6;

double trace_of(const GammaOperator& op, const Eigen::VectorXd& coords) {
  return op.basis_traces().dot(coords);
}

// Dual functional from precomputed q samples; constant terms follow the
// closed forms so that J(0) = 0 (nu = 1), nu/(nu-1) int Psi (finite nu > 1),
// int Psi (nu = infinity).
double dual_value_from_q(const GammaOperator& op, const NuParameter& nu,
                         const Eigen::VectorXd& coords, const Eigen::ArrayXd& q,
                         const SpectralDensity& psi, double eps_pos) {
  const double tr = trace_of(op, coords);
  if (nu.is_infinite()) return quadrature(op.grid(), psi.values() * (-q).exp()) + tr;
  const Eigen::ArrayXd r = r_values(q, nu);
  const double margin = r.minCoeff();
  if (!(margin > eps_pos)) fail_inadmissible(margin);
  if (nu.value() == 1) return quadrature(op.grid(), -psi.values() * r.log()) + tr;
  const double n = static_cast<double>(nu.value());
  return n / (n - 1.0) * quadrature(op.grid(), psi.values() * r.pow(1.0 - n)) + tr;
}

Eigen::ArrayXd phi_values_from_q(const NuParameter& nu, const Eigen::ArrayXd& q,
                                 const SpectralDensity& psi, double eps_pos) {
  if (nu.is_infinite()) return psi.values() * (-q).exp();
  const Eigen::ArrayXd r = r_values(q, nu);
  const double margin = r.minCoeff();
  if (!(margin > eps_pos)) fail_inadmissible(margin);
  return psi.values() * r.pow(-static_cast<double>(nu.value()));
}

Eigen::VectorXd gradient_from_phi(const GammaOperator& op, const Eigen::ArrayXd& phi) {
  const double n = static_cast<double>(op.grid().size());
  Eigen::VectorXd g = op.basis_traces();
  g.noalias() -= op.basis_response() * phi.matrix() / n;
  return g;
}

Eigen::MatrixXd hessian_from_q(const GammaOperator& op, const NuParameter& nu,
                               const Eigen::ArrayXd& q, const SpectralDensity& psi,
                               double eps_pos) {
  Eigen::ArrayXd weight;
  if (nu.is_infinite()) {
    weight = psi.values() * (-q).exp();
  } else {
    const Eigen::ArrayXd r = r_values(q, nu);
    const double margin = r.minCoeff();
    if (!(margin > eps_pos)) fail_inadmissible(margin);
    weight = psi.values() * r.pow(-static_cast<double>(nu.value()) - 1.0);
  }
  const double n = static_cast<double>(op.grid().size());
  const Eigen::MatrixXd scaled =
      op.basis_response() * weight.matrix().asDiagonal() / n;
  Eigen::MatrixXd h = scaled * op.basis_response().transpose();
  return 0.5 * (h + h.transpose());
}

}  // namespace

NuParameter NuParameter::finite(int nu) {
  require(nu >= 1, ErrorCode::invalid_argument, "nu must be a positive integer or inf");
  return NuParameter(false, nu);
}

NuParameter NuParameter::infinity() { return NuParameter(true, 0); }

NuParameter NuParameter::parse(const std::string& text) {
  if (text == "inf" || text == "Inf" || text == "INF") return infinity();
  std::size_t pos = 0;
  int value = 0;
  try {
    value = std::stoi(text, &pos);
  } catch (const std::exception&) {
    fail(ErrorCode::invalid_argument, "cannot parse nu value '" + text + "'");
  }
  require(pos == text.size(), ErrorCode::invalid_argument,
          "cannot parse nu value '" + text + "'");
  return finite(value);
}

int NuParameter::value() const {
  require(!infinite_, ErrorCode::invalid_argument, "nu is infinite");
  return value_;
}

std::string NuParameter::str() const {
  return infinite_ ? "inf" : std::to_string(value_);
}

Multiplier zero_multiplier(const GammaOperator& op) {
  return make_multiplier(op, Eigen::VectorXd::Zero(op.dimension()));
}

Multiplier make_multiplier(const GammaOperator& op, const Eigen::VectorXd& coords) {
  require(coords.size() == op.dimension(), ErrorCode::dimension_mismatch,
          "coordinate count does not match the range dimension");
  return Multiplier{coords, op.assemble(coords)};
}

Multiplier multiplier_from_matrix(const GammaOperator& op, const Eigen::MatrixXd& m) {
  const Eigen::VectorXd coords = op.coordinates(m);
  const Eigen::MatrixXd assembled = op.assemble(coords);
  require((assembled - m).norm() <= 1e-10 * std::max(1.0, m.norm()),
          ErrorCode::invalid_argument, "matrix is not in Range Gamma");
  return Multiplier{coords, assembled};
}

AdmissibilityResult admissible(const GammaOperator& op, const NuParameter& nu,
                               const Multiplier& lambda, double eps_pos) {
  check_multiplier(op, lambda);
  if (nu.is_infinite()) return AdmissibilityResult{true, 1.0};
  const Eigen::ArrayXd r = r_values(op.response(lambda.coords), nu);
  const double margin = r.minCoeff();
  return AdmissibilityResult{margin > eps_pos, margin};
}

SpectralDensity phi_from_multiplier(const GammaOperator& op, const NuParameter& nu,
                                    const Multiplier& lambda, const SpectralDensity& psi,
                                    double eps_pos) {
  check_grid(op, psi);
  check_multiplier(op, lambda);
  const Eigen::ArrayXd q = op.response(lambda.coords);
  return SpectralDensity(op.grid(), phi_values_from_q(nu, q, psi, eps_pos));
}

double dual_value(const GammaOperator& op, const NuParameter& nu, const Multiplier& lambda,
                  const SpectralDensity& psi, double eps_pos) {
  check_grid(op, psi);
  check_multiplier(op, lambda);
  return dual_value_from_q(op, nu, lambda.coords, op.response(lambda.coords), psi, eps_pos);
}

Eigen::VectorXd dual_gradient(const GammaOperator& op, const NuParameter& nu,
                              const Multiplier& lambda, const SpectralDensity& psi,
                              double eps_pos) {
  check_grid(op, psi);
  check_multiplier(op, lambda);
  const Eigen::ArrayXd q = op.response(lambda.coords);
  return gradient_from_phi(op, phi_values_from_q(nu, q, psi, eps_pos));
}

Eigen::MatrixXd dual_hessian(const GammaOperator& op, const NuParameter& nu,
                             const Multiplier& lambda, const SpectralDensity& psi,
                             double eps_pos) {
  check_grid(op, psi);
  check_multiplier(op, lambda);
  return hessian_from_q(op, nu, op.response(lambda.coords), psi, eps_pos);
}

SolveResult newton_solve(const GammaOperator& op, const NuParameter& nu,
                         const SpectralDensity& psi, const SolverConfig& config) {
  check_grid(op, psi);
  require(config.gradient_tolerance > 0.0 && config.gradient_tolerance < 1.0,
          ErrorCode::invalid_argument, "gradient tolerance must be in (0, 1)");
  require(config.max_iterations > 0, ErrorCode::invalid_argument,
          "max iterations must be positive");
  require(config.armijo_slope > 0.0 && config.eps_pos > 0.0 && config.min_step > 0.0,
          ErrorCode::invalid_argument, "solver parameters must be positive");

  Eigen::VectorXd coords = Eigen::VectorXd::Zero(op.dimension());
  Eigen::ArrayXd q = op.response(coords);
  std::vector<TraceEntry> trace;
  bool converged = false;
  int iterations = 0;

  for (int iter = 0; iter < config.max_iterations; ++iter) {
    const Eigen::ArrayXd phi = phi_values_from_q(nu, q, psi, config.eps_pos);
    const double value = dual_value_from_q(op, nu, coords, q, psi, config.eps_pos);
    const Eigen::VectorXd grad = gradient_from_phi(op, phi);
    const double grad_norm = grad.norm();
    if (grad_norm < config.gradient_tolerance) {
      trace.push_back(TraceEntry{iter, value, grad_norm, 0.0});
      converged = true;
      break;
    }

    const Eigen::MatrixXd hessian = hessian_from_q(op, nu, q, psi, config.eps_pos);
    const Eigen::LLT<Eigen::MatrixXd> llt(hessian);
    require(llt.info() == Eigen::Success, ErrorCode::hessian_failure,
            "Hessian factorization failed (not positive definite)");
    const Eigen::VectorXd direction = llt.solve(-grad);
    const double slope = grad.dot(direction);
    require(slope < 0.0, ErrorCode::hessian_failure,
            "Newton direction is not a descent direction");

    const bool local_phase = grad_norm < kLocalPhaseGradientNorm;
    double step = 1.0;
    bool accepted = false;
    double last_margin = 1.0;
    while (step >= config.min_step) {
      const Eigen::VectorXd candidate = coords + step * direction;
      const Eigen::ArrayXd q_candidate = op.response(candidate);
      if (!nu.is_infinite()) {
        last_margin = r_values(q_candidate, nu).minCoeff();
        if (!(last_margin > config.eps_pos)) {
          step *= 0.5;
          continue;
        }
      }
      if (local_phase) {
        coords = candidate;
        q = q_candidate;
        accepted = true;
        break;
      }
      const double candidate_value =
          dual_value_from_q(op, nu, candidate, q_candidate, psi, config.eps_pos);
      if (candidate_value <= value + config.armijo_slope * step * slope) {
        coords = candidate;
        q = q_candidate;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      std::ostringstream msg;
      msg << "line search step fell below " << config.min_step
          << " (nearest admissibility margin " << last_margin << ")";
      fail(ErrorCode::step_underflow, msg.str());
    }
    trace.push_back(TraceEntry{iter, value, grad_norm, step});
    ++iterations;
  }

  if (!converged) {
    std::ostringstream msg;
    msg << "no convergence within " << config.max_iterations
        << " iterations (gradient norm "
        << (trace.empty() ? 0.0 : trace.back().gradient_norm) << ")";
    fail(ErrorCode::max_iterations, msg.str());
  }

  Multiplier lambda = make_multiplier(op, coords);
  SpectralDensity phi(op.grid(), phi_values_from_q(nu, q, psi, config.eps_pos));
  const int n = op.state_size();
  const double residual =
      (op.apply(phi) - Eigen::MatrixXd::Identity(n, n)).norm();
  const double value = dual_value_from_q(op, nu, coords, q, psi, config.eps_pos);
  const double primal = s_nu(phi, psi, nu);
  return SolveResult{std::move(lambda), std::move(phi), value,   primal,
                     residual,          iterations,     std::move(trace)};
}

SpectralDensity kl0_closed_form(const GammaOperator& op) {
  const double bb = op.bank().B.squaredNorm();
  require(bb > 0.0, ErrorCode::invalid_argument, "B must be nonzero");
  const Eigen::VectorXcd gb = op.bank_samples() * op.bank().B.cast<std::complex<double>>();
  Eigen::ArrayXd values(op.grid().size());
  for (int k = 0; k < op.grid().size(); ++k) {
    const double mag = std::abs(gb(k));
    if (mag < 1e-12) {
      std::ostringstream msg;
      msg << "|G* B| vanishes at theta = " << op.grid().theta()[k];
      fail(ErrorCode::invalid_argument, msg.str());
    }
    values(k) = bb / (mag * mag);
  }
  return SpectralDensity(op.grid(), values);
}

double uniform_convergence_gap(const GammaOperator& op, const Multiplier& lambda,
                               const SpectralDensity& psi, const NuParameter& nu,
                               double eps_pos) {
  check_grid(op, psi);
  check_multiplier(op, lambda);
  require(!nu.is_infinite(), ErrorCode::invalid_argument,
          "the gap is measured against the nu = inf limit; pass a finite nu");
  const Eigen::ArrayXd q = op.response(lambda.coords);
  const Eigen::ArrayXd phi_nu = phi_values_from_q(nu, q, psi, eps_pos);
  const Eigen::ArrayXd phi_inf = psi.values() * (-q).exp();
  return (phi_nu - phi_inf).abs().maxCoeff();
}

double degree_certificate(const GammaOperator& op, const NuParameter& nu,
                          const Multiplier& lambda) {
  check_multiplier(op, lambda);
  require(!nu.is_infinite(), ErrorCode::invalid_argument,
          "the degree certificate applies to finite nu only");
  const Eigen::ArrayXd r = r_values(op.response(lambda.coords), nu);
  const Eigen::ArrayXd numerator = r * op.char_poly_magnitude();
  const int max_lag = op.grid().size() / 2 - 1;
  const Eigen::ArrayXd coeffs = trig_coefficients(op.grid(), numerator, max_lag);
  double worst = 0.0;
  for (int k = op.state_size() + 1; k <= max_lag; ++k)
    worst = std::max(worst, std::abs(coeffs(k)));
  return worst;
}

double s_nu(const SpectralDensity& phi, const SpectralDensity& psi, const NuParameter& nu) {
  return nu.is_infinite() ? s_nu_inf(phi, psi) : s_nu(phi, psi, nu.value());
}

}  // namespace alphaspec
