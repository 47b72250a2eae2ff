#include "core/json_io.hpp"

#include <cmath>

namespace alphaspec {

namespace {

const Json& member(const Json& j, const char* key) {
  require(j.is_object(), ErrorCode::invalid_argument, "expected a JSON object");
  const auto it = j.find(key);
  require(it != j.end(), ErrorCode::invalid_argument,
          std::string("missing key '") + key + "'");
  return *it;
}

double number_from(const Json& j, const char* key) {
  require(j.is_number(), ErrorCode::invalid_argument,
          std::string("'") + key + "' must be a number");
  return j.get<double>();
}

int integer_from(const Json& j, const char* key) {
  require(j.is_number_integer(), ErrorCode::invalid_argument,
          std::string("'") + key + "' must be an integer");
  return j.get<int>();
}

std::vector<double> coefficients_from(const Json& j, const char* key) {
  require(j.is_array(), ErrorCode::invalid_argument,
          std::string("'") + key + "' must be an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const Json& entry : j) {
    require(entry.is_number(), ErrorCode::invalid_argument,
            std::string("'") + key + "' must be an array of numbers");
    out.push_back(entry.get<double>());
  }
  return out;
}

}  // namespace

Eigen::MatrixXd matrix_from_json(const Json& j) {
  require(j.is_array() && !j.empty(), ErrorCode::invalid_argument,
          "matrix must be a non-empty array of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  Eigen::MatrixXd m;
  for (std::size_t r = 0; r < rows; ++r) {
    const Json& row = j[r];
    require(row.is_array() && !row.empty(), ErrorCode::invalid_argument,
            "matrix rows must be non-empty arrays");
    if (r == 0) {
      cols = row.size();
      m.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    }
    require(row.size() == cols, ErrorCode::invalid_argument,
            "matrix rows must all have the same length");
    for (std::size_t c = 0; c < cols; ++c) {
      require(row[c].is_number(), ErrorCode::invalid_argument,
              "matrix entries must be numbers");
      const double v = row[c].get<double>();
      require(std::isfinite(v), ErrorCode::invalid_argument,
              "matrix entries must be finite");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
    }
  }
  return m;
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json array_to_json(const Eigen::ArrayXd& values) {
  Json out = Json::array();
  for (Eigen::Index k = 0; k < values.size(); ++k) out.push_back(values(k));
  return out;
}

Eigen::VectorXd vector_from_json(const Json& j) {
  require(j.is_array() && !j.empty(), ErrorCode::invalid_argument,
          "vector must be a non-empty array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) {
    require(j[k].is_number(), ErrorCode::invalid_argument,
            "vector entries must be numbers");
    const double value = j[k].get<double>();
    require(std::isfinite(value), ErrorCode::invalid_argument,
            "vector entries must be finite");
    v(static_cast<Eigen::Index>(k)) = value;
  }
  return v;
}

RationalSpec rational_spec_from_json(const Json& j) {
  const Json& kind = member(j, "kind");
  require(kind.is_string(), ErrorCode::invalid_argument, "'kind' must be a string");
  const std::string name = kind.get<std::string>();
  if (name == "constant") return RationalSpec::constant(number_from(member(j, "value"), "value"));
  if (name == "transfer")
    return RationalSpec::transfer(coefficients_from(member(j, "num"), "num"),
                                  coefficients_from(member(j, "den"), "den"));
  if (name == "laurent")
    return RationalSpec::laurent(coefficients_from(member(j, "num"), "num"),
                                 coefficients_from(member(j, "den"), "den"));
  fail(ErrorCode::invalid_argument,
       "unknown spectrum kind '" + name + "' (expected constant, transfer or laurent)");
}

FilterBank filter_bank_from_json(const Json& j) {
  require(j.is_object(), ErrorCode::invalid_argument, "filter bank must be a JSON object");
  if (j.contains("lag_bank")) return covariance_lag_bank(integer_from(j["lag_bank"], "lag_bank"));
  return build_filter_bank(matrix_from_json(member(j, "A")),
                           vector_from_json(member(j, "B")));
}

ArmaModel arma_model_from_json(const Json& j) {
  ArmaModel model;
  model.num = coefficients_from(member(j, "num"), "num");
  model.den = coefficients_from(member(j, "den"), "den");
  if (j.contains("variance")) model.variance = number_from(j["variance"], "variance");
  return model;
}

DivergenceSpec divergence_spec_from_json(const Json& j) {
  const Json& family = member(j, "family");
  require(family.is_string(), ErrorCode::invalid_argument, "'family' must be a string");
  const std::string name = family.get<std::string>();
  DivergenceSpec spec;
  if (name == "alpha") {
    spec.family = DivergenceSpec::Family::alpha;
    spec.parameter = number_from(member(j, "parameter"), "parameter");
  } else if (name == "beta") {
    spec.family = DivergenceSpec::Family::beta;
    spec.parameter = number_from(member(j, "parameter"), "parameter");
  } else if (name == "kl") {
    spec.family = DivergenceSpec::Family::kl;
  } else if (name == "kl0") {
    spec.family = DivergenceSpec::Family::kl0;
  } else if (name == "hellinger") {
    spec.family = DivergenceSpec::Family::hellinger;
  } else if (name == "pearson") {
    spec.family = DivergenceSpec::Family::pearson;
  } else {
    fail(ErrorCode::invalid_argument, "unknown divergence family '" + name + "'");
  }
  return spec;
}

ProblemConfig problem_config_from_json(const Json& j) {
  require(j.is_object(), ErrorCode::invalid_argument, "config must be a JSON object");
  ProblemConfig config;
  config.bank = filter_bank_from_json(member(j, "filterbank"));
  if (j.contains("prior")) config.prior = rational_spec_from_json(j["prior"]);
  if (!j.contains("sigma") || (j["sigma"].is_string() && j["sigma"] == "identity")) {
    config.sigma = Eigen::MatrixXd::Identity(config.bank.size(), config.bank.size());
  } else {
    config.sigma = matrix_from_json(j["sigma"]);
    require(config.sigma.rows() == config.bank.size() &&
                config.sigma.cols() == config.bank.size(),
            ErrorCode::dimension_mismatch, "'sigma' size must match the filter bank");
  }
  if (j.contains("grid")) config.grid_size = integer_from(j["grid"], "grid");
  if (j.contains("tol")) config.tolerance = number_from(j["tol"], "tol");
  if (j.contains("max_iter")) config.max_iterations = integer_from(j["max_iter"], "max_iter");
  return config;
}

Json feasibility_report_to_json(const FeasibilityReport& report) {
  return Json{{"feasible", report.feasible},
              {"in_range", report.in_range},
              {"range_residual", report.range_residual},
              {"positive_definite", report.positive_definite},
              {"min_eigenvalue", report.min_eigenvalue},
              {"tolerance", report.tolerance}};
}

Json solve_result_to_json(const SolveResult& result, const SpectralDensity& psi,
                          const NuParameter& nu) {
  Json trace = Json::array();
  for (const TraceEntry& entry : result.trace) {
    trace.push_back(Json{{"iteration", entry.iteration},
                         {"dual_value", entry.dual_value},
                         {"gradient_norm", entry.gradient_norm},
                         {"step", entry.step}});
  }
  std::vector<double> coords(result.lambda_opt.coords.begin(),
                             result.lambda_opt.coords.end());
  return Json{{"nu", nu.str()},
              {"dual_value", result.dual_value},
              {"primal_value", result.primal_value},
              {"constraint_residual", result.constraint_residual},
              {"iterations", result.iterations},
              {"lambda_coords", coords},
              {"lambda", matrix_to_json(result.lambda_opt.matrix)},
              {"trace", std::move(trace)},
              {"quadrature_phi",
               quadrature(result.phi_opt.grid(), result.phi_opt.values())},
              {"theta", array_to_json(result.phi_opt.grid().theta())},
              {"phi", array_to_json(result.phi_opt.values())},
              {"psi", array_to_json(psi.values())}};
}

}  // namespace alphaspec
