#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ellctl/scenarios.hpp"

namespace ellctl {

enum class Mode { Fixed, Learn, Active, KnownTheta };

std::string to_string(Mode mode);
/// Accepts fixed, learn, active, known_theta. Throws std::invalid_argument.
Mode parse_mode(const std::string& text);

struct StepRecord {
  int k = 0;
  Vector x;
  Vector u;
  Vector y;
  Vector y_ref;
  Vector theta_hat;  // belief used to choose u(k)
  Matrix shape;
  double trace_p = 0.0;
  double log_det_p = 0.0;
  double rho = 0.0;   // update from P(k) to P(k+1)
  double beta = 1.0;
  int solver_iterations = 0;
  SolverStatus solver_status = SolverStatus::Optimal;
};

struct RunRecord {
  std::string scenario;
  Mode mode = Mode::Learn;
  std::uint64_t seed = 0;
  std::vector<StepRecord> steps;
  bool aborted = false;
  std::string diagnostic;
};

/// Closed loop for spec.horizon steps. Errors inside the loop abort the run
/// and are reported through `aborted` / `diagnostic`.
RunRecord run(const ScenarioSpec& spec, Mode mode, std::uint64_t seed);

/// |y(k) - y_ref(k)|_1 for k = 1..horizon.
std::vector<double> abs_errors(const RunRecord& record);

/// Mean of abs_errors over 1..T when T <= 10, over 11..T otherwise.
double window_error(const RunRecord& record, int t);

/// J(k) = (1/k) sum_{i<=k} e_c(i)^2 per output channel c; row k-1, column c.
Matrix accumulated_cost(const RunRecord& record);

struct ModeSummary {
  Mode mode = Mode::Learn;
  int completed = 0;
  int aborted = 0;
  std::vector<double> e_bar;  // one per window
  Matrix j_bar;               // horizon x l
};

struct Ratios {
  double ratio1 = 0.0;  // (fixed - learn) / learn
  double ratio2 = 0.0;  // (fixed - active) / active
  double ratio3 = 0.0;  // (learn - active) / active
};

struct MetricsReport {
  std::string scenario;
  int m = 0;
  std::uint64_t seed0 = 0;
  std::vector<int> windows;
  std::vector<ModeSummary> modes;
  std::vector<std::optional<Ratios>> ratios;  // one per window
  bool exclusion_flag = false;                // aborted share above 5% in some mode

  const ModeSummary* find(Mode mode) const;
};

struct MonteCarloOptions {
  std::vector<Mode> modes{Mode::Fixed, Mode::Learn, Mode::Active};
  int m = 100;
  std::uint64_t seed0 = 0;
  std::vector<int> windows;  // empty: the scenario's defaults
  int jobs = 0;              // 0: OpenMP default
};

/// Reference implementation: runs every (mode, seed) in order.
MetricsReport monte_carlo_serial(const ScenarioSpec& spec, const MonteCarloOptions& options);

/// Same result, bit for bit, with runs spread over OpenMP threads.
MetricsReport monte_carlo_parallel(const ScenarioSpec& spec, const MonteCarloOptions& options);

}  // namespace ellctl
