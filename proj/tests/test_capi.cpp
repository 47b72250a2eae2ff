#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include <alphaspec/alphaspec.h>

using Json = nlohmann::json;

namespace {

std::string take(char* text) {
  REQUIRE(text != nullptr);
  std::string out(text);
  alphaspec_string_free(text);
  return out;
}

Json call(alphaspec_status (*fn)(const char*, char**), const Json& request,
          alphaspec_status expected = ALPHASPEC_OK) {
  char* out = nullptr;
  const alphaspec_status status = fn(request.dump().c_str(), &out);
  CHECK_MESSAGE(status == expected, "status ", status, ": ", alphaspec_last_error());
  if (status != ALPHASPEC_OK) {
    CHECK(out == nullptr);
    CHECK(std::strlen(alphaspec_last_error()) > 0);
    return Json();
  }
  return Json::parse(take(out));
}

struct Problem {
  alphaspec_problem* handle = nullptr;
  ~Problem() { alphaspec_problem_free(handle); }
};

Json study_config(int grid = 1024) {
  return Json{
      {"prior", Json{{"kind", "transfer"}, {"num", Json::array({0, 1})},
                     {"den", Json::array({-0.82, 1})}}},
      {"filterbank", Json{{"lag_bank", 6}}},
      {"sigma", "computed-below"},
      {"grid", grid},
  };
}

Json study_sigma(int grid = 1024) {
  const Json request{
      {"filterbank", Json{{"lag_bank", 6}}},
      {"spec", Json{{"kind", "transfer"},
                    {"num", Json::array({0.0, 0.0, -0.15, 0.08, 1.1, 1.0})},
                    {"den", Json::array({-0.1192, 0.0425, -0.602, 0.42, -0.5, 1.0})}}},
      {"grid", grid}};
  return call(alphaspec_gamma_covariance, request)["gamma"];
}

}  // namespace

TEST_CASE("version string is a semantic version") {
  const char* version = alphaspec_version();
  REQUIRE(version != nullptr);
  int major = -1, minor = -1, patch = -1;
  CHECK(std::sscanf(version, "%d.%d.%d", &major, &minor, &patch) == 3);
  CHECK(major >= 1);
}

TEST_CASE("null pointers are rejected without crashing") {
  CHECK(alphaspec_problem_create(nullptr, nullptr) == ALPHASPEC_INVALID_INPUT);
  char* out = nullptr;
  CHECK(alphaspec_problem_create("{}", nullptr) == ALPHASPEC_INVALID_INPUT);
  CHECK(alphaspec_problem_create(nullptr, nullptr) == ALPHASPEC_INVALID_INPUT);
  CHECK(alphaspec_eval_spectrum(nullptr, &out) == ALPHASPEC_INVALID_INPUT);
  CHECK(out == nullptr);
  CHECK(alphaspec_problem_feasibility(nullptr, &out) == ALPHASPEC_INVALID_INPUT);
  CHECK(alphaspec_problem_solve(nullptr, "2", &out) == ALPHASPEC_INVALID_INPUT);
  CHECK(std::strlen(alphaspec_last_error()) > 0);
  alphaspec_problem_free(nullptr);  // must be a no-op
  alphaspec_string_free(nullptr);   // must be a no-op
}

TEST_CASE("malformed json comes back as invalid input with a message") {
  char* out = nullptr;
  CHECK(alphaspec_eval_spectrum("{not json", &out) == ALPHASPEC_INVALID_INPUT);
  CHECK(out == nullptr);
  const std::string message = alphaspec_last_error();
  CHECK(message.find("malformed JSON") != std::string::npos);
}

TEST_CASE("spectrum evaluation returns samples and quadrature") {
  const Json response = call(
      alphaspec_eval_spectrum,
      Json{{"spec", Json{{"kind", "constant"}, {"value", 2.0}}}, {"grid", 64}});
  REQUIRE(response["theta"].size() == 64);
  REQUIRE(response["values"].size() == 64);
  CHECK(response["values"][0].get<double>() == 2.0);
  CHECK(response["quadrature"].get<double>() == doctest::Approx(2.0));

  char* out = nullptr;
  CHECK(alphaspec_eval_spectrum(
            R"({"spec":{"kind":"constant","value":-1},"grid":64})", &out) ==
        ALPHASPEC_INVALID_INPUT);
}

TEST_CASE("gamma covariance of the unit density through the two-state bank") {
  const double a21 = std::sqrt(8.0 / 3.0) - std::sqrt(6.0);
  const Json request{
      {"filterbank",
       Json{{"A", Json::array({Json::array({0.5, 0.0}), Json::array({a21, 1.0 / 3.0})})},
            {"B", Json::array({std::sqrt(3.0) / 2.0, std::sqrt(2.0) / 3.0})}}},
      {"spec", Json{{"kind", "constant"}, {"value", 1.0}}},
      {"grid", 2048}};
  const Json gamma = call(alphaspec_gamma_covariance, request)["gamma"];
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      CHECK(gamma[r][c].get<double>() == doctest::Approx(r == c ? 1.0 : 0.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("problem lifecycle: create, feasibility, solve, free") {
  Json config = study_config();
  config["sigma"] = study_sigma();
  Problem problem;
  REQUIRE(alphaspec_problem_create(config.dump().c_str(), &problem.handle) == ALPHASPEC_OK);

  char* out = nullptr;
  REQUIRE(alphaspec_problem_feasibility(problem.handle, &out) == ALPHASPEC_OK);
  const Json report = Json::parse(take(out));
  CHECK(report["feasible"] == true);
  CHECK(report["in_range"] == true);
  CHECK(report["positive_definite"] == true);
  CHECK(report["zeroth_moment"].get<double>() == doctest::Approx(1.0).epsilon(1e-9));

  for (const char* nu : {"1", "2", "4", "inf"}) {
    char* solved = nullptr;
    REQUIRE_MESSAGE(alphaspec_problem_solve(problem.handle, nu, &solved) == ALPHASPEC_OK,
                    alphaspec_last_error());
    const Json result = Json::parse(take(solved));
    CHECK(result["nu"] == nu);
    CHECK(result["constraint_residual"].get<double>() < 1e-6);
    CHECK(result["iterations"].get<int>() < 50);
    CHECK(result["phi"].size() == 1024);
    CHECK(result["trace"].size() == result["iterations"].get<std::size_t>() + 1);
  }

  // Unknown or out-of-family orders are invalid input.
  char* bad = nullptr;
  CHECK(alphaspec_problem_solve(problem.handle, "0", &bad) == ALPHASPEC_INVALID_INPUT);
  CHECK(alphaspec_problem_solve(problem.handle, "-2", &bad) == ALPHASPEC_INVALID_INPUT);
  CHECK(alphaspec_problem_solve(problem.handle, "fast", &bad) == ALPHASPEC_INVALID_INPUT);
  CHECK(alphaspec_problem_solve(problem.handle, nullptr, &bad) == ALPHASPEC_INVALID_INPUT);
}

TEST_CASE("infeasible sigma reports and refuses to solve") {
  Json config = study_config(256);
  Json negative = Json::array();
  for (int r = 0; r < 6; ++r) {
    Json row = Json::array();
    for (int c = 0; c < 6; ++c) row.push_back(r == c ? -1.0 : 0.0);
    negative.push_back(row);
  }
  config["sigma"] = negative;

  Problem problem;
  REQUIRE(alphaspec_problem_create(config.dump().c_str(), &problem.handle) == ALPHASPEC_OK);

  char* out = nullptr;
  REQUIRE(alphaspec_problem_feasibility(problem.handle, &out) == ALPHASPEC_OK);
  const Json report = Json::parse(take(out));
  CHECK(report["feasible"] == false);
  CHECK(report["positive_definite"] == false);

  CHECK(alphaspec_problem_solve(problem.handle, "2", &out) == ALPHASPEC_INFEASIBLE);
  CHECK(alphaspec_problem_kl0(problem.handle, &out) == ALPHASPEC_INFEASIBLE);
  const std::string message = alphaspec_last_error();
  CHECK(message.find("infeasible") != std::string::npos);
}

TEST_CASE("solver starvation maps to a solver failure status") {
  Json config = study_config(512);
  config["sigma"] = study_sigma(512);
  config["max_iter"] = 2;
  Problem problem;
  REQUIRE(alphaspec_problem_create(config.dump().c_str(), &problem.handle) == ALPHASPEC_OK);
  char* out = nullptr;
  CHECK(alphaspec_problem_solve(problem.handle, "2", &out) == ALPHASPEC_SOLVER_FAILURE);
  CHECK(out == nullptr);
}

TEST_CASE("closed form for the zeroth order matches its rational reference") {
  const double a21 = std::sqrt(8.0 / 3.0) - std::sqrt(6.0);
  const Json config{
      {"filterbank",
       Json{{"A", Json::array({Json::array({0.5, 0.0}), Json::array({a21, 1.0 / 3.0})})},
            {"B", Json::array({std::sqrt(3.0) / 2.0, std::sqrt(2.0) / 3.0})}}},
      {"grid", 512}};
  Problem problem;
  REQUIRE(alphaspec_problem_create(config.dump().c_str(), &problem.handle) == ALPHASPEC_OK);
  char* out = nullptr;
  REQUIRE(alphaspec_problem_kl0(problem.handle, &out) == ALPHASPEC_OK);
  const Json solution = Json::parse(take(out));
  CHECK(solution["gram_residual"].get<double>() < 1e-6);
  REQUIRE(solution["phi"].size() == 512);
  // Reference: (434 - 245 sym(1) + 42 sym(2)) / (370 - 175 sym(1)).
  const Json reference = call(
      alphaspec_eval_spectrum,
      Json{{"spec", Json{{"kind", "laurent"}, {"num", Json::array({434, -245, 42})},
                         {"den", Json::array({370, -175})}}},
           {"grid", 512}});
  double worst = 0.0;
  for (int k = 0; k < 512; ++k) {
    const double expected = reference["values"][k].get<double>();
    worst = std::max(worst,
                     std::abs(solution["phi"][k].get<double>() - expected) / expected);
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("divergence table computes rows and beta-alpha consistency checks") {
  const Json request{
      {"phi", Json{{"kind", "constant"}, {"value", 4.0}}},
      {"psi", Json{{"kind", "constant"}, {"value", 1.0}}},
      {"grid", 64},
      {"divergences",
       Json::array({Json{{"family", "kl"}},
                    Json{{"family", "hellinger"}},
                    Json{{"family", "beta"}, {"parameter", 0.5}},
                    Json{{"family", "alpha"}, {"parameter", 2.0}}})}};
  const Json response = call(alphaspec_divergence_table, request);
  REQUIRE(response["rows"].size() == 4);
  CHECK(response["rows"][1]["value"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(response["rows"][2]["value"].get<double>() == doctest::Approx(2.0).epsilon(1e-12));
  REQUIRE(response["beta_alpha_checks"].size() == 1);
  const Json& check_row = response["beta_alpha_checks"][0];
  CHECK(check_row["beta"].get<double>() == 0.5);
  CHECK(check_row["alpha"].get<double>() == 2.0);
  CHECK(check_row["relative_gap"].get<double>() < 1e-10);
}

TEST_CASE("simulation and covariance estimation round-trip through the api") {
  const Json model{{"num", Json::array({0.0, 0.0, -0.15, 0.08, 1.1, 1.0})},
                   {"den", Json::array({-0.1192, 0.0425, -0.602, 0.42, -0.5, 1.0})}};
  const Json sim = call(alphaspec_arma_simulate,
                        Json{{"model", model}, {"length", 30000}, {"seed", 1}});
  REQUIRE(sim["values"].size() == 30000);
  CHECK(sim["seed"] == 1);

  // Determinism across calls.
  const Json again = call(alphaspec_arma_simulate,
                          Json{{"model", model}, {"length", 30000}, {"seed", 1}});
  CHECK(sim["values"] == again["values"]);

  const Json estimate = call(
      alphaspec_estimate_sigma,
      Json{{"filterbank", Json{{"lag_bank", 6}}}, {"series", sim["values"]}, {"grid", 512}});
  CHECK(estimate["report"]["feasible"] == true);
  CHECK(estimate["floored"] == false);
  REQUIRE(estimate["conditioned"].size() == 6);

  const Json sigma = study_sigma(2048);
  double worst = 0.0;
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c)
      worst = std::max(worst, std::abs(estimate["conditioned"][r][c].get<double>() -
                                       sigma[r][c].get<double>()));
  CHECK(worst < 0.3);

  // Unstable models and bad shapes are invalid input.
  char* out = nullptr;
  CHECK(alphaspec_arma_simulate(
            R"({"model":{"num":[0,1],"den":[-1.5,1]},"length":10,"seed":0})", &out) ==
        ALPHASPEC_INVALID_INPUT);
  CHECK(alphaspec_estimate_sigma(
            R"({"filterbank":{"lag_bank":6},"series":[1,2,3]})", &out) ==
        ALPHASPEC_INVALID_INPUT);
}

TEST_CASE("concurrent solves on one problem handle agree with serial solves") {
  Json config = study_config(512);
  config["sigma"] = study_sigma(512);
  Problem problem;
  REQUIRE(alphaspec_problem_create(config.dump().c_str(), &problem.handle) == ALPHASPEC_OK);

  const std::vector<std::string> orders = {"1", "2", "4", "inf"};
  std::vector<std::string> parallel(orders.size());
  std::vector<std::thread> workers;
  workers.reserve(orders.size());
  for (std::size_t i = 0; i < orders.size(); ++i) {
    workers.emplace_back([&, i] {
      char* out = nullptr;
      if (alphaspec_problem_solve(problem.handle, orders[i].c_str(), &out) == ALPHASPEC_OK) {
        parallel[i] = take(out);
      }
    });
  }
  for (auto& worker : workers) worker.join();

  for (std::size_t i = 0; i < orders.size(); ++i) {
    REQUIRE(!parallel[i].empty());
    char* out = nullptr;
    REQUIRE(alphaspec_problem_solve(problem.handle, orders[i].c_str(), &out) == ALPHASPEC_OK);
    CHECK(parallel[i] == take(out));
  }
}
