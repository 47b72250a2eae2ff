#include "core/divergence.hpp"

#include <cmath>

namespace alphaspec {

namespace {

void check_pair(const SpectralDensity& phi1, const SpectralDensity& phi2) {
  require(phi1.size() == phi2.size(), ErrorCode::grid_mismatch,
          "densities live on different grids");
}

double kl_divergence(const SpectralDensity& phi1, const SpectralDensity& phi2) {
  const auto& a = phi1.values();
  const auto& b = phi2.values();
  return quadrature(phi1.grid(), a * (a / b).log() - a + b);
}

double alpha_divergence(const SpectralDensity& phi1, const SpectralDensity& phi2, double alpha) {
  // The a=0 and a=1 members are the KL limits; dispatching exactly avoids the
  // 0/0 in the generic formula.
  if (alpha == 0.0) return kl_divergence(phi2, phi1);
  if (alpha == 1.0) return kl_divergence(phi1, phi2);
  const auto& a = phi1.values();
  const auto& b = phi2.values();
  const Eigen::ArrayXd integrand = a.pow(alpha) * b.pow(1.0 - alpha) / (alpha * (alpha - 1.0)) -
                                   a / (alpha - 1.0) + b / alpha;
  return quadrature(phi1.grid(), integrand);
}

}  // namespace

double divergence(const SpectralDensity& phi1, const SpectralDensity& phi2,
                  const DivergenceSpec& spec) {
  check_pair(phi1, phi2);
  const auto& a = phi1.values();
  const auto& b = phi2.values();
  switch (spec.family) {
    case DivergenceSpec::Family::alpha:
      require(std::isfinite(spec.parameter), ErrorCode::invalid_argument,
              "alpha parameter must be finite");
      return alpha_divergence(phi1, phi2, spec.parameter);
    case DivergenceSpec::Family::kl:
      return kl_divergence(phi1, phi2);
    case DivergenceSpec::Family::kl0:
      return quadrature(phi1.grid(), a * (a / b).log());
    case DivergenceSpec::Family::hellinger:
      return quadrature(phi1.grid(), (a.sqrt() - b.sqrt()).square());
    case DivergenceSpec::Family::pearson:
      return 0.5 * quadrature(phi1.grid(), (a - b).square() / b);
    case DivergenceSpec::Family::beta: {
      const double beta = spec.parameter;
      require(std::isfinite(beta) && beta != 0.0 && beta != 1.0, ErrorCode::invalid_argument,
              "beta parameter must be finite and outside {0, 1}");
      const Eigen::ArrayXd integrand = (a.pow(beta) - a * b.pow(beta - 1.0)) / (beta - 1.0) -
                                       (a.pow(beta) - b.pow(beta)) / beta;
      return quadrature(phi1.grid(), integrand);
    }
  }
  fail(ErrorCode::invalid_argument, "unknown divergence family");
}

double s_nu(const SpectralDensity& phi, const SpectralDensity& psi, int nu) {
  check_pair(phi, psi);
  require(nu != 0, ErrorCode::invalid_argument, "nu must be a nonzero integer");
  if (nu == 1) return kl_divergence(psi, phi);
  const double v = static_cast<double>(nu);
  const auto& f = phi.values();
  const auto& p = psi.values();
  const Eigen::ArrayXd integrand =
      (v * v / (1.0 - v)) * f.pow((v - 1.0) / v) * p.pow(1.0 / v) + v * f + (v / (v - 1.0)) * p;
  return quadrature(phi.grid(), integrand);
}

double s_nu_inf(const SpectralDensity& phi, const SpectralDensity& psi) {
  check_pair(phi, psi);
  return kl_divergence(phi, psi);
}

}  // namespace alphaspec
