#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "core/grid.hpp"

namespace alphaspec {

// Grid samples of a spectral density on the unit circle. Values must be
// strictly positive and even-symmetric (value at theta equals the value at
// 2*pi - theta), the symmetry of spectra of real scalar processes.
class SpectralDensity {
 public:
  SpectralDensity(FrequencyGrid grid, Eigen::ArrayXd values);

  const FrequencyGrid& grid() const { return grid_; }
  const Eigen::ArrayXd& values() const { return values_; }
  int size() const { return grid_.size(); }

  // Pointwise power, used by the Beta/Alpha transformation identity.
  SpectralDensity pow(double exponent) const;

 private:
  FrequencyGrid grid_;
  Eigen::ArrayXd values_;
};

// Rational description of a density, evaluated on a grid before any use.
//   transfer:  value(theta) = |num(e^{j theta}) / den(e^{j theta})|^2, with
//              coefficients in ascending powers of z (shaping-filter form);
//   laurent:   value(theta) = num_L / den_L where each list c_0..c_m encodes
//              the symmetric Laurent polynomial c_0 + sum_k c_k (z^k + z^-k);
//   constant:  value(theta) = value.
struct RationalSpec {
  enum class Kind { transfer, laurent, constant };
  Kind kind = Kind::constant;
  std::vector<double> num;
  std::vector<double> den;
  double value = 1.0;

  static RationalSpec transfer(std::vector<double> num, std::vector<double> den);
  static RationalSpec laurent(std::vector<double> num, std::vector<double> den);
  static RationalSpec constant(double value);
};

SpectralDensity eval_rational_spec(const RationalSpec& spec, const FrequencyGrid& grid);

}  // namespace alphaspec
