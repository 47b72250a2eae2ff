#pragma once

#include <doctest.h>

#include <cmath>
#include <utility>
#include <vector>

#include "core/errors.hpp"
#include "core/estimation.hpp"
#include "core/filter_bank.hpp"
#include "core/spectral_density.hpp"

namespace testutil {

// Runs f and checks that it throws an alphaspec::Error carrying the expected
// code; the error text is included in the failure message.
template <typename F>
void expect_code(alphaspec::ErrorCode expected, F&& f) {
  try {
    std::forward<F>(f)();
    FAIL_CHECK("expected an error, none was thrown");
  } catch (const alphaspec::Error& e) {
    CHECK_MESSAGE(e.code() == expected, "unexpected error code for: ", e.what());
  }
}

// Two-state bank whose controllability gramian is exactly the identity, so
// the unnormalized covariance of a unit density is already I.
inline alphaspec::FilterBank two_state_bank() {
  Eigen::MatrixXd a(2, 2);
  a << 0.5, 0.0, std::sqrt(8.0 / 3.0) - std::sqrt(6.0), 1.0 / 3.0;
  Eigen::VectorXd b(2);
  b << std::sqrt(3.0) / 2.0, std::sqrt(2.0) / 3.0;
  return alphaspec::build_filter_bank(std::move(a), std::move(b));
}

// Fifth-order ARMA model of the case study and its first-order prior.
inline alphaspec::ArmaModel study_model() {
  alphaspec::ArmaModel model;
  model.num = {0.0, 0.0, -0.15, 0.08, 1.1, 1.0};
  model.den = {-0.1192, 0.0425, -0.602, 0.42, -0.5, 1.0};
  model.variance = 1.0;
  return model;
}

inline alphaspec::RationalSpec study_spectrum_spec() {
  return alphaspec::RationalSpec::transfer({0.0, 0.0, -0.15, 0.08, 1.1, 1.0},
                                           {-0.1192, 0.0425, -0.602, 0.42, -0.5, 1.0});
}

inline alphaspec::RationalSpec study_prior_spec() {
  return alphaspec::RationalSpec::transfer({0.0, 1.0}, {-0.82, 1.0});
}

// First row of the published output covariance of the study spectrum through
// the lag-6 bank, three significant digits.
inline std::vector<double> study_sigma_row() { return {5.58, 3.74, 1.85, 2.63, 3.0, 2.01}; }

}  // namespace testutil
