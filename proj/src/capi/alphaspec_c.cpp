#include "alphaspec/alphaspec.h"

#include <cstdlib>
#include <cstring>
#include <optional>
#include <string>

#include "core/json_io.hpp"

namespace {

using alphaspec::Error;
using alphaspec::ErrorCode;
using alphaspec::Json;

thread_local std::string g_last_error;

alphaspec_status map_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::infeasible:
      return ALPHASPEC_INFEASIBLE;
    case ErrorCode::max_iterations:
    case ErrorCode::step_underflow:
    case ErrorCode::hessian_failure:
      return ALPHASPEC_SOLVER_FAILURE;
    default:
      return ALPHASPEC_INVALID_INPUT;
  }
}

template <typename Fn>
alphaspec_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return ALPHASPEC_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const Json::exception& e) {
    g_last_error = std::string("malformed JSON: ") + e.what();
    return ALPHASPEC_INVALID_INPUT;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return ALPHASPEC_INTERNAL_ERROR;
  }
}

void write_output(char** out, const Json& j) {
  const std::string text = j.dump();
  char* buffer = static_cast<char*>(std::malloc(text.size() + 1));
  if (buffer == nullptr) throw std::bad_alloc();
  std::memcpy(buffer, text.c_str(), text.size() + 1);
  *out = buffer;
}

void check_pointer(const void* p, const char* what) {
  alphaspec::require(p != nullptr, ErrorCode::invalid_argument,
                     std::string(what) + " must not be null");
}

Json parse_request(const char* text) {
  check_pointer(text, "request JSON");
  return Json::parse(text);
}

int grid_size_from(const Json& j, int fallback = 2048) {
  if (!j.contains("grid")) return fallback;
  alphaspec::require(j["grid"].is_number_integer(), ErrorCode::invalid_argument,
                     "'grid' must be an integer");
  return j["grid"].get<int>();
}

}  // namespace

struct alphaspec_problem {
  alphaspec::FrequencyGrid grid;
  alphaspec::SpectralDensity psi;
  Eigen::MatrixXd sigma;
  alphaspec::GammaOperator raw_op;
  alphaspec::FeasibilityReport report;
  std::optional<alphaspec::GammaOperator> normalized_op;
  alphaspec::SolverConfig solver;
};

const char* alphaspec_version(void) { return ALPHASPEC_VERSION; }

const char* alphaspec_last_error(void) { return g_last_error.c_str(); }

void alphaspec_string_free(char* text) { std::free(text); }

alphaspec_status alphaspec_problem_create(const char* config_json,
                                          alphaspec_problem** out_problem) {
  return guarded([&] {
    check_pointer(out_problem, "output pointer");
    const Json j = parse_request(config_json);
    alphaspec::ProblemConfig config = alphaspec::problem_config_from_json(j);
    alphaspec::FrequencyGrid grid(config.grid_size);
    alphaspec::SpectralDensity psi = alphaspec::eval_rational_spec(config.prior, grid);
    alphaspec::GammaOperator raw_op(config.bank, grid);
    const alphaspec::FeasibilityReport report =
        alphaspec::feasibility_check(raw_op, config.sigma);
    std::optional<alphaspec::GammaOperator> normalized_op;
    if (report.feasible) {
      normalized_op.emplace(alphaspec::normalize_bank(config.bank, config.sigma),
                            grid);
    }
    alphaspec::SolverConfig solver;
    solver.gradient_tolerance = config.tolerance;
    solver.max_iterations = config.max_iterations;
    *out_problem = new alphaspec_problem{std::move(grid),
                                         std::move(psi),
                                         std::move(config.sigma),
                                         std::move(raw_op),
                                         report,
                                         std::move(normalized_op),
                                         solver};
  });
}

void alphaspec_problem_free(alphaspec_problem* problem) { delete problem; }

alphaspec_status alphaspec_problem_feasibility(const alphaspec_problem* problem,
                                               char** out_json) {
  return guarded([&] {
    check_pointer(problem, "problem");
    check_pointer(out_json, "output pointer");
    Json out = alphaspec::feasibility_report_to_json(problem->report);
    const std::optional<double> moment =
        alphaspec::zeroth_moment_constraint(problem->raw_op.bank());
    out["zeroth_moment"] = moment ? Json(*moment) : Json(nullptr);
    write_output(out_json, out);
  });
}

alphaspec_status alphaspec_problem_solve(const alphaspec_problem* problem, const char* nu,
                                         char** out_json) {
  return guarded([&] {
    check_pointer(problem, "problem");
    check_pointer(nu, "nu");
    check_pointer(out_json, "output pointer");
    const alphaspec::NuParameter order = alphaspec::NuParameter::parse(nu);
    if (!problem->normalized_op) {
      alphaspec::fail(ErrorCode::infeasible,
                      "sigma is infeasible (range residual " +
                          std::to_string(problem->report.range_residual) +
                          ", min eigenvalue " +
                          std::to_string(problem->report.min_eigenvalue) + ")");
    }
    const alphaspec::SolveResult result =
        alphaspec::newton_solve(*problem->normalized_op, order, problem->psi,
                                problem->solver);
    write_output(out_json,
                 alphaspec::solve_result_to_json(result, problem->psi, order));
  });
}

alphaspec_status alphaspec_problem_kl0(const alphaspec_problem* problem, char** out_json) {
  return guarded([&] {
    check_pointer(problem, "problem");
    check_pointer(out_json, "output pointer");
    if (!problem->normalized_op) {
      alphaspec::fail(ErrorCode::infeasible, "sigma is infeasible");
    }
    const alphaspec::GammaOperator& op = *problem->normalized_op;
    const alphaspec::SpectralDensity phi = alphaspec::kl0_closed_form(op);
    const int n = op.state_size();
    const double residual =
        (op.apply(phi) - Eigen::MatrixXd::Identity(n, n)).norm();
    write_output(out_json,
                 Json{{"theta", alphaspec::array_to_json(op.grid().theta())},
                      {"phi", alphaspec::array_to_json(phi.values())},
                      {"quadrature_phi", alphaspec::quadrature(op.grid(), phi.values())},
                      {"gram_residual", residual}});
  });
}

alphaspec_status alphaspec_eval_spectrum(const char* request_json, char** out_json) {
  return guarded([&] {
    check_pointer(out_json, "output pointer");
    const Json j = parse_request(request_json);
    alphaspec::require(j.contains("spec"), ErrorCode::invalid_argument,
                       "missing key 'spec'");
    const alphaspec::RationalSpec spec = alphaspec::rational_spec_from_json(j["spec"]);
    const alphaspec::FrequencyGrid grid(grid_size_from(j));
    const alphaspec::SpectralDensity density = alphaspec::eval_rational_spec(spec, grid);
    write_output(out_json,
                 Json{{"theta", alphaspec::array_to_json(grid.theta())},
                      {"values", alphaspec::array_to_json(density.values())},
                      {"quadrature", alphaspec::quadrature(grid, density.values())}});
  });
}

alphaspec_status alphaspec_gamma_covariance(const char* request_json, char** out_json) {
  return guarded([&] {
    check_pointer(out_json, "output pointer");
    const Json j = parse_request(request_json);
    alphaspec::require(j.contains("filterbank"), ErrorCode::invalid_argument,
                       "missing key 'filterbank'");
    alphaspec::require(j.contains("spec"), ErrorCode::invalid_argument,
                       "missing key 'spec'");
    const alphaspec::FilterBank bank = alphaspec::filter_bank_from_json(j["filterbank"]);
    const alphaspec::RationalSpec spec = alphaspec::rational_spec_from_json(j["spec"]);
    const alphaspec::FrequencyGrid grid(grid_size_from(j));
    const alphaspec::GammaOperator op(bank, grid);
    const alphaspec::SpectralDensity density = alphaspec::eval_rational_spec(spec, grid);
    write_output(out_json, Json{{"gamma", alphaspec::matrix_to_json(op.apply(density))}});
  });
}

alphaspec_status alphaspec_divergence_table(const char* request_json, char** out_json) {
  return guarded([&] {
    check_pointer(out_json, "output pointer");
    const Json j = parse_request(request_json);
    for (const char* key : {"phi", "psi", "divergences"})
      alphaspec::require(j.contains(key), ErrorCode::invalid_argument,
                         std::string("missing key '") + key + "'");
    const alphaspec::FrequencyGrid grid(grid_size_from(j));
    const alphaspec::SpectralDensity phi =
        alphaspec::eval_rational_spec(alphaspec::rational_spec_from_json(j["phi"]), grid);
    const alphaspec::SpectralDensity psi =
        alphaspec::eval_rational_spec(alphaspec::rational_spec_from_json(j["psi"]), grid);
    alphaspec::require(j["divergences"].is_array(), ErrorCode::invalid_argument,
                       "'divergences' must be an array");
    std::vector<alphaspec::DivergenceSpec> specs;
    Json rows = Json::array();
    for (const Json& entry : j["divergences"]) {
      const alphaspec::DivergenceSpec spec = alphaspec::divergence_spec_from_json(entry);
      specs.push_back(spec);
      const char* family = "";
      switch (spec.family) {
        case alphaspec::DivergenceSpec::Family::alpha: family = "alpha"; break;
        case alphaspec::DivergenceSpec::Family::kl: family = "kl"; break;
        case alphaspec::DivergenceSpec::Family::kl0: family = "kl0"; break;
        case alphaspec::DivergenceSpec::Family::hellinger: family = "hellinger"; break;
        case alphaspec::DivergenceSpec::Family::pearson: family = "pearson"; break;
        case alphaspec::DivergenceSpec::Family::beta: family = "beta"; break;
      }
      Json row{{"family", family}, {"value", alphaspec::divergence(phi, psi, spec)}};
      if (spec.family == alphaspec::DivergenceSpec::Family::alpha ||
          spec.family == alphaspec::DivergenceSpec::Family::beta)
        row["parameter"] = spec.parameter;
      rows.push_back(std::move(row));
    }
    // Consistency rows for each requested beta with a matching alpha = 1/beta.
    Json checks = Json::array();
    for (const alphaspec::DivergenceSpec& beta_spec : specs) {
      if (beta_spec.family != alphaspec::DivergenceSpec::Family::beta) continue;
      for (const alphaspec::DivergenceSpec& alpha_spec : specs) {
        if (alpha_spec.family != alphaspec::DivergenceSpec::Family::alpha) continue;
        if (std::abs(alpha_spec.parameter - 1.0 / beta_spec.parameter) > 1e-12) continue;
        const double beta = beta_spec.parameter;
        const double lhs = alphaspec::divergence(phi, psi, beta_spec);
        const double rhs = alphaspec::divergence(phi.pow(beta), psi.pow(beta), alpha_spec) /
                           (beta * beta);
        const double gap = std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-300});
        checks.push_back(Json{{"beta", beta},
                              {"alpha", alpha_spec.parameter},
                              {"relative_gap", gap}});
      }
    }
    write_output(out_json, Json{{"rows", std::move(rows)},
                                {"beta_alpha_checks", std::move(checks)}});
  });
}

alphaspec_status alphaspec_arma_simulate(const char* request_json, char** out_json) {
  return guarded([&] {
    check_pointer(out_json, "output pointer");
    const Json j = parse_request(request_json);
    alphaspec::require(j.contains("model"), ErrorCode::invalid_argument,
                       "missing key 'model'");
    alphaspec::require(j.contains("length") && j["length"].is_number_integer(),
                       ErrorCode::invalid_argument, "'length' must be an integer");
    const alphaspec::ArmaModel model = alphaspec::arma_model_from_json(j["model"]);
    const int length = j["length"].get<int>();
    std::uint64_t seed = 0;
    if (j.contains("seed")) {
      alphaspec::require(j["seed"].is_number_integer() && j["seed"].get<std::int64_t>() >= 0,
                         ErrorCode::invalid_argument, "'seed' must be a non-negative integer");
      seed = j["seed"].get<std::uint64_t>();
    }
    int burn_in = 1000;
    if (j.contains("burn_in")) {
      alphaspec::require(j["burn_in"].is_number_integer(), ErrorCode::invalid_argument,
                         "'burn_in' must be an integer");
      burn_in = j["burn_in"].get<int>();
    }
    const alphaspec::SampleSeries series =
        alphaspec::simulate_arma(model, length, seed, burn_in);
    write_output(out_json, Json{{"values", alphaspec::array_to_json(series.values.array())},
                                {"seed", series.seed}});
  });
}

alphaspec_status alphaspec_estimate_sigma(const char* request_json, char** out_json) {
  return guarded([&] {
    check_pointer(out_json, "output pointer");
    const Json j = parse_request(request_json);
    alphaspec::require(j.contains("filterbank"), ErrorCode::invalid_argument,
                       "missing key 'filterbank'");
    alphaspec::require(j.contains("series"), ErrorCode::invalid_argument,
                       "missing key 'series'");
    const alphaspec::FilterBank bank = alphaspec::filter_bank_from_json(j["filterbank"]);
    const Eigen::VectorXd series = alphaspec::vector_from_json(j["series"]);
    const alphaspec::FrequencyGrid grid(grid_size_from(j));
    const alphaspec::GammaOperator op(bank, grid);
    const alphaspec::CovarianceEstimate estimate = alphaspec::estimate_sigma(op, series);
    write_output(out_json,
                 Json{{"raw", alphaspec::matrix_to_json(estimate.raw)},
                      {"conditioned", alphaspec::matrix_to_json(estimate.conditioned)},
                      {"report", alphaspec::feasibility_report_to_json(estimate.report)},
                      {"floored", estimate.floored}});
  });
}
