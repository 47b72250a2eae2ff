#pragma once

#include <Eigen/Dense>

#include "core/errors.hpp"

namespace alphaspec {

// Uniform frequency grid theta_k = 2*pi*k/size on [0, 2*pi). The size must be
// even and at least 4 so that both theta=0 and theta=pi are nodes.
class FrequencyGrid {
 public:
  explicit FrequencyGrid(int size);

  int size() const { return static_cast<int>(theta_.size()); }
  const Eigen::ArrayXd& theta() const { return theta_; }

 private:
  Eigen::ArrayXd theta_;
};

// Integral over the unit circle with respect to the normalized measure
// d(theta)/(2*pi). On a uniform periodic grid the trapezoid rule collapses to
// the arithmetic mean of the samples, which is exact for trigonometric
// polynomials of degree < size/2.
double quadrature(const FrequencyGrid& grid, const Eigen::ArrayXd& values);

// Cosine-series coefficients c_0..c_max_lag with the convention
// f(theta) = sum_k c_k cos(k*theta), i.e. c_k = quadrature(f*cos(k.)) doubled
// for k > 0. Requires max_lag < size/2 so the projections are alias-free.
Eigen::ArrayXd trig_coefficients(const FrequencyGrid& grid, const Eigen::ArrayXd& values,
                                 int max_lag);

}  // namespace alphaspec
