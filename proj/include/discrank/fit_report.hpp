#pragma once

#include <cstdint>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "discrank/errors.hpp"
#include "discrank/numeric.hpp"

namespace discrank {

/// Record of one model fit; the evaluation harness's unit of record.
struct FitReport {
  std::string model;
  std::size_t parameter_count = 0;
  nlohmann::json config = nlohmann::json::object();
  double train_mse = std::numeric_limits<double>::quiet_NaN();
  double test_mse = std::numeric_limits<double>::quiet_NaN();
  /// Final objective per fitted block (Elo: one value; disc: one per component).
  std::vector<double> objective_trace;
  std::vector<double> orthogonality_residuals;
  std::vector<std::string> warnings;
  double wall_time_s = 0.0;
  std::uint64_t seed = 0;
  bool converged = true;
  std::size_t iterations = 0;
};

/// Optimizer ran out of iterations. Carries the report and the last iterate
/// (Elo: {u}; disc: {u1, v1, u2, v2, ...}).
class ConvergenceFailure : public Error {
 public:
  ConvergenceFailure(const std::string& what, FitReport report, std::vector<Vector> last_iterate)
      : Error(what), report_(std::move(report)), last_iterate_(std::move(last_iterate)) {}

  const FitReport& report() const { return report_; }
  const std::vector<Vector>& last_iterate() const { return last_iterate_; }

 private:
  FitReport report_;
  std::vector<Vector> last_iterate_;
};

inline nlohmann::json to_json(const FitReport& r, bool include_timing = false) {
  auto finite_or_null = [](double x) -> nlohmann::json {
    if (std::isfinite(x)) return x;
    return nullptr;
  };
  nlohmann::json j;
  j["model"] = r.model;
  j["params"] = r.parameter_count;
  j["config"] = r.config;
  j["train_mse"] = finite_or_null(r.train_mse);
  j["test_mse"] = finite_or_null(r.test_mse);
  j["objective_trace"] = r.objective_trace;
  j["orthogonality_residuals"] = r.orthogonality_residuals;
  j["warnings"] = r.warnings;
  j["seed"] = r.seed;
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  if (include_timing) j["wall_time_s"] = r.wall_time_s;
  return j;
}

}  // namespace discrank
