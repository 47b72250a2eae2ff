#include "core/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

namespace alphaspec {

namespace {

std::vector<double> trim_trailing_zeros(std::vector<double> coeffs) {
  while (!coeffs.empty() && coeffs.back() == 0.0) coeffs.pop_back();
  return coeffs;
}

void check_finite(const std::vector<double>& coeffs, const char* what) {
  for (double c : coeffs)
    require(std::isfinite(c), ErrorCode::invalid_argument,
            std::string(what) + " coefficients must be finite");
}

// Gaussian stream with a fixed generator and transform so that a seed yields
// the same series on every platform: mt19937_64 bits mapped to (0,1) doubles,
// then Box-Muller with the second value cached.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

  double next() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_ = radius * std::sin(angle);
    have_cached_ = true;
    return radius * std::cos(angle);
  }

 private:
  double uniform() {
    const std::uint64_t bits = engine_() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

void validate_model(const std::vector<double>& num, const std::vector<double>& den,
                    double variance) {
  require(!den.empty(), ErrorCode::invalid_argument,
          "denominator must have a nonzero leading coefficient");
  require(!num.empty(), ErrorCode::invalid_argument, "numerator must be nonzero");
  require(num.size() <= den.size(), ErrorCode::invalid_argument,
          "numerator degree must not exceed denominator degree");
  require(variance > 0.0 && std::isfinite(variance), ErrorCode::invalid_argument,
          "innovation variance must be positive");
  const std::size_t degree = den.size() - 1;
  if (degree > 0) {
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
    for (std::size_t i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
    for (std::size_t i = 0; i < degree; ++i) companion(i, degree - 1) = -den[i] / den.back();
    const Eigen::VectorXcd roots = Eigen::EigenSolver<Eigen::MatrixXd>(companion, false)
                                       .eigenvalues();
    const double radius = roots.cwiseAbs().maxCoeff();
    if (!(radius < 1.0)) {
      std::ostringstream msg;
      msg << "denominator root of modulus " << radius << " is not inside the unit disk";
      fail(ErrorCode::unstable_model, msg.str());
    }
  }
}

}  // namespace

SampleSeries simulate_arma(const ArmaModel& model, int length, std::uint64_t seed,
                           int burn_in) {
  require(length >= 1, ErrorCode::invalid_argument, "series length must be positive");
  require(burn_in >= 0, ErrorCode::invalid_argument, "burn-in must be non-negative");
  check_finite(model.num, "numerator");
  check_finite(model.den, "denominator");
  const std::vector<double> num = trim_trailing_zeros(model.num);
  const std::vector<double> den = trim_trailing_zeros(model.den);
  validate_model(num, den, model.variance);

  const std::size_t q = den.size() - 1;
  const double lead = den.back();
  const double scale = std::sqrt(model.variance);
  GaussianStream noise(seed);
  const std::size_t total = static_cast<std::size_t>(length) + burn_in;

  // Causal recursion for den(z) y = num(z) e read at lag q:
  // den_q y_k = sum_i num_i e_{k-(q-i)} - sum_{j<q} den_j y_{k-(q-j)}.
  // e_hist[i] holds e_{k-(q-i)} and y_past[j] holds y_{k-(q-j)}.
  std::vector<double> e_hist(q + 1, 0.0);
  std::vector<double> y_past(q, 0.0);
  Eigen::VectorXd out(length);
  for (std::size_t k = 0; k < total; ++k) {
    for (std::size_t i = 0; i < q; ++i) e_hist[i] = e_hist[i + 1];
    e_hist[q] = scale * noise.next();
    double acc = 0.0;
    for (std::size_t i = 0; i < num.size(); ++i) acc += num[i] * e_hist[i];
    for (std::size_t j = 0; j < q; ++j) acc -= den[j] * y_past[j];
    const double y = acc / lead;
    if (q > 0) {
      for (std::size_t j = 0; j + 1 < q; ++j) y_past[j] = y_past[j + 1];
      y_past[q - 1] = y;
    }
    if (k >= static_cast<std::size_t>(burn_in))
      out(static_cast<Eigen::Index>(k - burn_in)) = y;
  }
  return SampleSeries{std::move(out), seed};
}

Eigen::MatrixXd filter_states(const FilterBank& bank, const Eigen::VectorXd& series) {
  const int n = bank.size();
  Eigen::MatrixXd states(series.size(), n);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index k = 0; k < series.size(); ++k) {
    x = bank.A * x + bank.B * series(k);
    states.row(k) = x.transpose();
  }
  return states;
}

CovarianceEstimate estimate_sigma(const GammaOperator& op, const Eigen::VectorXd& series) {
  const int n = op.state_size();
  const Eigen::Index N = series.size();
  require(N >= 10 * n, ErrorCode::series_too_short,
          "need at least 10 * state size samples");
  require(series.allFinite(), ErrorCode::invalid_argument, "series must be finite");

  const Eigen::MatrixXd states = filter_states(op.bank(), series);
  const Eigen::MatrixXd tail = states.bottomRows(N - n);
  Eigen::MatrixXd raw = tail.transpose() * tail / static_cast<double>(N);
  raw = 0.5 * (raw + raw.transpose());
  require(raw.trace() > 0.0, ErrorCode::degenerate_data,
          "sample covariance is zero (constant or zero series)");

  Eigen::MatrixXd conditioned = op.project(raw);
  bool floored = false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(conditioned);
  if (eigen.eigenvalues().minCoeff() <= 0.0) {
    const double floor = 1e-8 * conditioned.trace() / n;
    require(floor > 0.0, ErrorCode::degenerate_data,
            "conditioned covariance has non-positive trace");
    const Eigen::VectorXd lifted = eigen.eigenvalues().cwiseMax(floor);
    conditioned = eigen.eigenvectors() * lifted.asDiagonal() * eigen.eigenvectors().transpose();
    conditioned = op.project(0.5 * (conditioned + conditioned.transpose()));
    floored = true;
  }
  const FeasibilityReport report = feasibility_check(op, conditioned);
  if (!report.feasible) {
    std::ostringstream msg;
    msg << "estimated covariance is infeasible (range residual " << report.range_residual
        << ", min eigenvalue " << report.min_eigenvalue << ")";
    fail(ErrorCode::degenerate_data, msg.str());
  }
  return CovarianceEstimate{std::move(raw), std::move(conditioned), report, floored};
}

RationalSpec arma_spectrum(const ArmaModel& model) {
  check_finite(model.num, "numerator");
  check_finite(model.den, "denominator");
  const std::vector<double> num = trim_trailing_zeros(model.num);
  const std::vector<double> den = trim_trailing_zeros(model.den);
  validate_model(num, den, model.variance);
  std::vector<double> scaled = num;
  const double scale = std::sqrt(model.variance);
  for (double& c : scaled) c *= scale;
  return RationalSpec::transfer(std::move(scaled), den);
}

void write_series_csv(const std::string& path, const Eigen::VectorXd& series) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::io_error, "cannot open '" + path + "' for writing");
  char buffer[64];
  for (Eigen::Index k = 0; k < series.size(); ++k) {
    std::snprintf(buffer, sizeof(buffer), "%.17g", series(k));
    out << buffer << '\n';
  }
  require(out.good(), ErrorCode::io_error, "write to '" + path + "' failed");
}

Eigen::VectorXd read_series_csv(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::io_error, "cannot open '" + path + "' for reading");
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      std::size_t pos = 0;
      const double v = std::stod(line, &pos);
      while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
      require(pos == line.size(), ErrorCode::invalid_argument, "trailing characters");
      values.push_back(v);
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      std::ostringstream msg;
      msg << "cannot parse '" << path << "' line " << line_no;
      fail(ErrorCode::invalid_argument, msg.str());
    }
  }
  return Eigen::Map<const Eigen::VectorXd>(values.data(),
                                           static_cast<Eigen::Index>(values.size()));
}

}  // namespace alphaspec
