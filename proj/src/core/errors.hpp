#pragma once

#include <stdexcept>
#include <string>

namespace alphaspec {

enum class ErrorCode {
  invalid_argument = 1,
  dimension_mismatch,
  grid_mismatch,
  nonpositive_density,
  unstable_bank,
  unreachable_bank,
  bank_too_small,
  not_positive_definite,
  inconsistent_moment,
  infeasible,
  inadmissible_multiplier,
  max_iterations,
  step_underflow,
  hessian_failure,
  unstable_model,
  series_too_short,
  degenerate_data,
  io_error,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace alphaspec
