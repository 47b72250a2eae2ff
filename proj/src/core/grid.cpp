#include "core/grid.hpp"

#include <numbers>

namespace alphaspec {

FrequencyGrid::FrequencyGrid(int size) {
  require(size >= 4, ErrorCode::invalid_argument,
          "grid size must be at least 4, got " + std::to_string(size));
  require(size % 2 == 0, ErrorCode::invalid_argument,
          "grid size must be even, got " + std::to_string(size));
  theta_.resize(size);
  for (int k = 0; k < size; ++k) {
    theta_[k] = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(size);
  }
}

double quadrature(const FrequencyGrid& grid, const Eigen::ArrayXd& values) {
  require(values.size() == grid.size(), ErrorCode::grid_mismatch,
          "sample count does not match grid size");
  return values.mean();
}

Eigen::ArrayXd trig_coefficients(const FrequencyGrid& grid, const Eigen::ArrayXd& values,
                                 int max_lag) {
  require(values.size() == grid.size(), ErrorCode::grid_mismatch,
          "sample count does not match grid size");
  require(max_lag >= 0, ErrorCode::invalid_argument, "max_lag must be nonnegative");
  require(max_lag < grid.size() / 2, ErrorCode::invalid_argument,
          "max_lag must be below size/2 to avoid aliasing");
  Eigen::ArrayXd coeffs(max_lag + 1);
  coeffs[0] = values.mean();
  for (int k = 1; k <= max_lag; ++k) {
    coeffs[k] = 2.0 * (values * (static_cast<double>(k) * grid.theta()).cos()).mean();
  }
  return coeffs;
}

}  // namespace alphaspec
