#include "core/spectral_density.hpp"

#include <cmath>
#include <complex>

namespace alphaspec {

namespace {

void check_positive(const FrequencyGrid& grid, const Eigen::ArrayXd& values) {
  for (int k = 0; k < values.size(); ++k) {
    require(std::isfinite(values[k]) && values[k] > 0.0, ErrorCode::nonpositive_density,
            "density is not strictly positive at theta=" + std::to_string(grid.theta()[k]));
  }
}

void check_even_symmetry(const FrequencyGrid& grid, const Eigen::ArrayXd& values) {
  const int n = grid.size();
  for (int k = 1; k < n / 2; ++k) {
    const double a = values[k];
    const double b = values[n - k];
    require(std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)),
            ErrorCode::invalid_argument,
            "density samples are not even-symmetric at theta=" + std::to_string(grid.theta()[k]));
  }
}

std::vector<double> trim_trailing_zeros(std::vector<double> coeffs) {
  while (coeffs.size() > 1 && coeffs.back() == 0.0) coeffs.pop_back();
  return coeffs;
}

void check_coefficients(const std::vector<double>& coeffs, const char* which) {
  require(!coeffs.empty(), ErrorCode::invalid_argument,
          std::string(which) + " coefficient list is empty");
  bool all_zero = true;
  for (double c : coeffs) {
    require(std::isfinite(c), ErrorCode::invalid_argument,
            std::string(which) + " has a non-finite coefficient");
    if (c != 0.0) all_zero = false;
  }
  require(!all_zero, ErrorCode::invalid_argument,
          std::string(which) + " is identically zero");
}

std::complex<double> eval_poly(const std::vector<double>& coeffs, std::complex<double> z) {
  std::complex<double> acc(0.0, 0.0);
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
  return acc;
}

double eval_symmetric_laurent(const std::vector<double>& coeffs, double theta) {
  double acc = coeffs[0];
  for (std::size_t k = 1; k < coeffs.size(); ++k) {
    acc += 2.0 * coeffs[k] * std::cos(static_cast<double>(k) * theta);
  }
  return acc;
}

}  // namespace

SpectralDensity::SpectralDensity(FrequencyGrid grid, Eigen::ArrayXd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  require(values_.size() == grid_.size(), ErrorCode::grid_mismatch,
          "sample count does not match grid size");
  check_positive(grid_, values_);
  check_even_symmetry(grid_, values_);
}

SpectralDensity SpectralDensity::pow(double exponent) const {
  return SpectralDensity(grid_, values_.pow(exponent));
}

RationalSpec RationalSpec::transfer(std::vector<double> num, std::vector<double> den) {
  RationalSpec spec;
  spec.kind = Kind::transfer;
  spec.num = std::move(num);
  spec.den = std::move(den);
  return spec;
}

RationalSpec RationalSpec::laurent(std::vector<double> num, std::vector<double> den) {
  RationalSpec spec;
  spec.kind = Kind::laurent;
  spec.num = std::move(num);
  spec.den = std::move(den);
  return spec;
}

RationalSpec RationalSpec::constant(double value) {
  RationalSpec spec;
  spec.kind = Kind::constant;
  spec.value = value;
  return spec;
}

SpectralDensity eval_rational_spec(const RationalSpec& spec, const FrequencyGrid& grid) {
  const int n = grid.size();
  Eigen::ArrayXd values(n);

  switch (spec.kind) {
    case RationalSpec::Kind::constant: {
      require(std::isfinite(spec.value) && spec.value > 0.0, ErrorCode::nonpositive_density,
              "constant density must be strictly positive");
      values.setConstant(spec.value);
      break;
    }
    case RationalSpec::Kind::transfer: {
      const auto num = trim_trailing_zeros(spec.num);
      const auto den = trim_trailing_zeros(spec.den);
      check_coefficients(num, "numerator");
      check_coefficients(den, "denominator");
      for (int k = 0; k < n; ++k) {
        const std::complex<double> z(std::cos(grid.theta()[k]), std::sin(grid.theta()[k]));
        const double dmag = std::abs(eval_poly(den, z));
        require(dmag > 1e-10, ErrorCode::invalid_argument,
                "denominator vanishes on the unit circle near theta=" +
                    std::to_string(grid.theta()[k]));
        const double nmag = std::abs(eval_poly(num, z));
        values[k] = (nmag / dmag) * (nmag / dmag);
      }
      break;
    }
    case RationalSpec::Kind::laurent: {
      const auto num = trim_trailing_zeros(spec.num);
      const auto den = trim_trailing_zeros(spec.den);
      check_coefficients(num, "numerator");
      check_coefficients(den, "denominator");
      for (int k = 0; k < n; ++k) {
        const double d = eval_symmetric_laurent(den, grid.theta()[k]);
        require(std::abs(d) > 1e-10, ErrorCode::invalid_argument,
                "denominator vanishes on the unit circle near theta=" +
                    std::to_string(grid.theta()[k]));
        values[k] = eval_symmetric_laurent(num, grid.theta()[k]) / d;
      }
      break;
    }
  }

  for (int k = 0; k < n; ++k) {
    require(std::isfinite(values[k]) && values[k] > 0.0, ErrorCode::nonpositive_density,
            "density is not strictly positive at theta=" + std::to_string(grid.theta()[k]));
  }
  return SpectralDensity(grid, std::move(values));
}

}  // namespace alphaspec
