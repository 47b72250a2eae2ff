#pragma once

#include "core/spectral_density.hpp"

namespace alphaspec {

// Divergence families between two densities on a common grid.
//   alpha:     S_a = int 1/(a(a-1)) F1^a F2^(1-a) - 1/(a-1) F1 + 1/a F2,
//              with the a=0 and a=1 members given by their KL limits;
//   kl:        int F1 log(F1/F2) - F1 + F2;
//   kl0:       int F1 log(F1/F2), the equal-mass form without correction terms;
//   hellinger: int (sqrt(F1) - sqrt(F2))^2;
//   pearson:   1/2 int (F1 - F2)^2 / F2, the alpha family member at a=2;
//   beta:      S_b = int 1/(b-1) (F1^b - F1 F2^(b-1)) - 1/b (F1^b - F2^b),
//              b outside {0,1}.
struct DivergenceSpec {
  enum class Family { alpha, kl, kl0, hellinger, pearson, beta };
  Family family = Family::kl;
  double parameter = 0.0;
};

double divergence(const SpectralDensity& phi1, const SpectralDensity& phi2,
                  const DivergenceSpec& spec);

// The objective family of the approximation problem, indexed by nonzero
// integer nu or by infinity:
//   nu = 1:        KL(psi || phi);
//   finite nu != 1: int nu^2/(1-nu) phi^((nu-1)/nu) psi^(1/nu) + nu phi
//                  + nu/(nu-1) psi  (the alpha family member at a = 1 - 1/nu);
//   nu = infinity: KL(phi || psi).
double s_nu(const SpectralDensity& phi, const SpectralDensity& psi, int nu);
double s_nu_inf(const SpectralDensity& phi, const SpectralDensity& psi);

}  // namespace alphaspec
