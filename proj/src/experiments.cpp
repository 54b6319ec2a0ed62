#include "ellctl/experiments.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <omp.h>

#include "ellctl/active_controller.hpp"
#include "ellctl/errors.hpp"
#include "ellctl/estimator.hpp"

namespace ellctl {

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::Fixed: return "fixed";
    case Mode::Learn: return "learn";
    case Mode::Active: return "active";
    case Mode::KnownTheta: return "known_theta";
  }
  return "unknown";
}

Mode parse_mode(const std::string& text) {
  if (text == "fixed") return Mode::Fixed;
  if (text == "learn") return Mode::Learn;
  if (text == "active") return Mode::Active;
  if (text == "known_theta") return Mode::KnownTheta;
  throw std::invalid_argument("unknown mode '" + text + "'");
}

RunRecord run(const ScenarioSpec& spec, Mode mode, std::uint64_t seed) {
  spec.validate();
  RunRecord record;
  record.scenario = spec.name;
  record.mode = mode;
  record.seed = seed;

  const AffineUncertainModel& model = spec.model;
  const Ellipsoid noise = model.disturbance_set();
  const Matrix q = model.output_noise_shape();
  const auto p = model.theta_dim();
  const Ellipsoid point(spec.theta_true, Matrix::Zero(p, p));
  Rng rng(seed);
  ParameterBelief belief(spec.belief0);
  Vector x = spec.x0;

  for (int k = 1; k <= spec.horizon; ++k) {
    StepRecord rec;
    rec.k = k;
    rec.x = x;
    rec.y = model.c * x;
    rec.y_ref = reference_at(spec.reference, k);
    const Ellipsoid& set = mode == Mode::KnownTheta ? point : belief.set;
    rec.theta_hat = set.center();
    rec.shape = set.shape();
    const VolumeMeasures vm = volume_measures(set);
    rec.trace_p = vm.trace;
    rec.log_det_p = vm.log_det;
    try {
      const TrackingInstance inst = build_instance(model, x, reference_at(spec.reference, k + 1));
      const RobustSolution sol = solve_robust(inst, set, q, spec.bounds);
      if (sol.status == SolverStatus::Infeasible) {
        throw std::runtime_error("robust step infeasible");
      }
      Vector u = sol.u;
      rec.solver_iterations = sol.iterations;
      rec.solver_status = sol.status;
      if (mode == Mode::Active) {
        const InfoQuadratic info = build_info_quadratic(model, set, x);
        u = solve_active(info, trust_region(u, vm.trace, spec.ma), spec.bounds);
      }
      rec.u = u;
      const Vector omega = sample_interior(noise, rng);
      const StepResult next = step(model, x, u, spec.theta_true, omega);
      if (!next.x_next.allFinite()) throw NumericError("state is no longer finite");
      if (mode == Mode::Learn || mode == Mode::Active) {
        belief = update(belief, build_observation(model, x, u, next.y_next));
        rec.rho = belief.last_rho;
        rec.beta = belief.last_beta;
      }
      x = next.x_next;
    } catch (const std::exception& e) {
      record.aborted = true;
      record.diagnostic = "step " + std::to_string(k) + ": " + e.what();
      return record;
    }
    record.steps.push_back(std::move(rec));
  }
  return record;
}

std::vector<double> abs_errors(const RunRecord& record) {
  std::vector<double> out;
  out.reserve(record.steps.size());
  for (const auto& s : record.steps) out.push_back((s.y - s.y_ref).lpNorm<1>());
  return out;
}

double window_error(const RunRecord& record, int t) {
  const auto e = abs_errors(record);
  if (t < 1 || static_cast<std::size_t>(t) > e.size()) {
    throw std::invalid_argument("window_error: T outside the recorded horizon");
  }
  const int first = t <= 10 ? 1 : 11;
  double acc = 0.0;
  for (int k = first; k <= t; ++k) acc += e[static_cast<std::size_t>(k - 1)];
  return acc / static_cast<double>(t - first + 1);
}

Matrix accumulated_cost(const RunRecord& record) {
  const auto n = static_cast<Eigen::Index>(record.steps.size());
  const Eigen::Index l = n == 0 ? 0 : record.steps.front().y.size();
  Matrix j(n, l);
  Vector acc = Vector::Zero(l);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& s = record.steps[static_cast<std::size_t>(k)];
    acc += (s.y - s.y_ref).cwiseAbs2();
    j.row(k) = (acc / static_cast<double>(k + 1)).transpose();
  }
  return j;
}

const ModeSummary* MetricsReport::find(Mode mode) const {
  for (const auto& s : modes) {
    if (s.mode == mode) return &s;
  }
  return nullptr;
}

namespace {

struct RunSummary {
  bool aborted = true;
  std::vector<double> e;
  Matrix j;
};

struct Plan {
  std::vector<Mode> modes;
  std::vector<int> windows;
  int m = 0;
  std::uint64_t seed0 = 0;

  std::size_t tasks() const { return modes.size() * static_cast<std::size_t>(m); }
  Mode mode_of(std::size_t i) const { return modes[i / static_cast<std::size_t>(m)]; }
  std::uint64_t seed_of(std::size_t i) const { return seed0 + i % static_cast<std::size_t>(m); }
};

Plan make_plan(const ScenarioSpec& spec, const MonteCarloOptions& options) {
  spec.validate();
  if (options.m < 1) throw std::invalid_argument("monte_carlo: M must be >= 1");
  if (options.modes.empty()) throw std::invalid_argument("monte_carlo: no modes given");
  Plan plan{options.modes, options.windows.empty() ? spec.windows : options.windows, options.m,
            options.seed0};
  for (const int t : plan.windows) {
    if (t < 1 || t > spec.horizon) {
      throw std::invalid_argument("monte_carlo: window T=" + std::to_string(t) +
                                  " outside 1.." + std::to_string(spec.horizon));
    }
  }
  return plan;
}

RunSummary summarize(const ScenarioSpec& spec, const Plan& plan, std::size_t i) {
  const RunRecord rec = run(spec, plan.mode_of(i), plan.seed_of(i));
  RunSummary out;
  if (rec.aborted) return out;
  out.aborted = false;
  for (const int t : plan.windows) out.e.push_back(window_error(rec, t));
  out.j = accumulated_cost(rec);
  return out;
}

// Deterministic fold in task index order.
MetricsReport fold(const ScenarioSpec& spec, const Plan& plan,
                   const std::vector<RunSummary>& runs) {
  MetricsReport report;
  report.scenario = spec.name;
  report.m = plan.m;
  report.seed0 = plan.seed0;
  report.windows = plan.windows;
  const auto l = spec.model.output_dim();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t mi = 0; mi < plan.modes.size(); ++mi) {
    ModeSummary s;
    s.mode = plan.modes[mi];
    s.e_bar.assign(plan.windows.size(), 0.0);
    s.j_bar = Matrix::Zero(spec.horizon, l);
    for (int r = 0; r < plan.m; ++r) {
      const auto& run = runs[mi * static_cast<std::size_t>(plan.m) + static_cast<std::size_t>(r)];
      if (run.aborted) {
        ++s.aborted;
        continue;
      }
      ++s.completed;
      for (std::size_t w = 0; w < plan.windows.size(); ++w) s.e_bar[w] += run.e[w];
      s.j_bar += run.j;
    }
    if (s.completed > 0) {
      for (auto& v : s.e_bar) v /= s.completed;
      s.j_bar /= static_cast<double>(s.completed);
    } else {
      for (auto& v : s.e_bar) v = nan;
      s.j_bar.setConstant(nan);
    }
    if (s.aborted > 0.05 * plan.m) report.exclusion_flag = true;
    report.modes.push_back(std::move(s));
  }
  const ModeSummary* fixed = report.find(Mode::Fixed);
  const ModeSummary* learn = report.find(Mode::Learn);
  const ModeSummary* active = report.find(Mode::Active);
  for (std::size_t w = 0; w < plan.windows.size(); ++w) {
    if (fixed && learn && active && fixed->completed && learn->completed && active->completed) {
      const double e1 = fixed->e_bar[w];
      const double e2 = learn->e_bar[w];
      const double e3 = active->e_bar[w];
      report.ratios.push_back(Ratios{(e1 - e2) / e2, (e1 - e3) / e3, (e2 - e3) / e3});
    } else {
      report.ratios.push_back(std::nullopt);
    }
  }
  return report;
}

}  // namespace

MetricsReport monte_carlo_serial(const ScenarioSpec& spec, const MonteCarloOptions& options) {
  const Plan plan = make_plan(spec, options);
  std::vector<RunSummary> runs(plan.tasks());
  for (std::size_t i = 0; i < runs.size(); ++i) runs[i] = summarize(spec, plan, i);
  return fold(spec, plan, runs);
}

MetricsReport monte_carlo_parallel(const ScenarioSpec& spec, const MonteCarloOptions& options) {
  const Plan plan = make_plan(spec, options);
  std::vector<RunSummary> runs(plan.tasks());
  const int threads = options.jobs > 0 ? options.jobs : omp_get_max_threads();
  const auto count = static_cast<long>(runs.size());
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (long i = 0; i < count; ++i) {
    runs[static_cast<std::size_t>(i)] = summarize(spec, plan, static_cast<std::size_t>(i));
  }
  return fold(spec, plan, runs);
}

}  // namespace ellctl
