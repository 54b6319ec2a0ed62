// Command-line front end: closed-loop runs, Monte Carlo tables, self-checks.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ellctl/active_controller.hpp"
#include "ellctl/errors.hpp"
#include "ellctl/experiments.hpp"
#include "ellctl/report_io.hpp"
#include "ellctl/scenario_io.hpp"

namespace fs = std::filesystem;
using namespace ellctl;

namespace {

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct CommonFlags {
  std::string scenario = "sim1";
  std::string config;
  std::optional<int> steps;
  std::string out = ".";
  bool plot = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--scenario", f.scenario, "Built-in scenario: sim1, sim2, sim3")
      ->check(CLI::IsMember(scenario_names()));
  cmd->add_option("--config", f.config, "Scenario JSON file (overrides --scenario)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--steps", f.steps, "Override the scenario horizon")->check(CLI::PositiveNumber);
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_flag("--plot", f.plot, "Also write SVG plots");
}

ScenarioSpec resolve(const CommonFlags& f) {
  ScenarioSpec spec = f.config.empty() ? scenario(f.scenario) : load_scenario(f.config);
  if (f.steps) {
    spec.horizon = *f.steps;
    std::erase_if(spec.windows, [&](int t) { return t > spec.horizon; });
    if (spec.windows.empty()) spec.windows = {spec.horizon};
  }
  return spec;
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

fs::path prepare_dir(const std::string& dir) {
  fs::path p(dir);
  fs::create_directories(p);
  return p;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

std::vector<double> steps_axis(const RunRecord& r) {
  std::vector<double> k;
  for (const auto& s : r.steps) k.push_back(s.k);
  return k;
}

std::string tracking_svg(const std::vector<RunRecord>& runs, Eigen::Index channel,
                         const std::string& title) {
  std::vector<Series> series;
  if (!runs.empty()) {
    Series ref{"reference", steps_axis(runs.front()), {}};
    for (const auto& s : runs.front().steps) ref.y.push_back(s.y_ref(channel));
    series.push_back(ref);
  }
  for (const auto& r : runs) {
    Series s{to_string(r.mode), steps_axis(r), {}};
    for (const auto& st : r.steps) s.y.push_back(st.y(channel));
    series.push_back(s);
  }
  std::ostringstream out;
  write_svg_plot(out, title, "k", "y", series);
  return out.str();
}

std::string trace_svg(const std::vector<RunRecord>& runs, const std::string& title) {
  std::vector<Series> series;
  for (const auto& r : runs) {
    if (r.mode == Mode::KnownTheta) continue;
    Series s{to_string(r.mode), steps_axis(r), {}};
    for (const auto& st : r.steps) s.y.push_back(st.trace_p);
    series.push_back(s);
  }
  std::ostringstream out;
  write_svg_plot(out, title, "k", "trace(P)", series);
  return out.str();
}

void write_run_plots(const fs::path& dir, const std::string& stem,
                     const std::vector<RunRecord>& runs) {
  if (runs.empty() || runs.front().steps.empty()) return;
  const auto l = runs.front().steps.front().y.size();
  for (Eigen::Index c = 0; c < l; ++c) {
    const std::string suffix = l == 1 ? "" : "_y" + std::to_string(c + 1);
    write_file(dir / ("tracking_" + stem + suffix + ".svg"),
               tracking_svg(runs, c, "Output tracking (" + stem + suffix + ")"));
  }
  write_file(dir / ("trace_" + stem + ".svg"), trace_svg(runs, "Belief trace (" + stem + ")"));
}

int cmd_simulate(const CommonFlags& f, const std::string& mode_text, std::uint64_t seed) {
  const ScenarioSpec spec = resolve(f);
  const Mode mode = parse_mode(mode_text);
  const RunRecord rec = run(spec, mode, seed);
  const fs::path dir = prepare_dir(f.out);
  const std::string stem = spec.name + "_" + to_string(mode) + "_seed" + std::to_string(seed);
  std::ostringstream csv;
  write_run_csv(csv, rec);
  write_file(dir / ("run_" + stem + ".csv"), csv.str());
  if (f.plot) write_run_plots(dir, stem, {rec});
  if (rec.aborted) {
    std::cerr << "run aborted at " << rec.diagnostic << "\n";
    return 1;
  }
  std::cout << "wrote " << (dir / ("run_" + stem + ".csv")).string() << " (" << rec.steps.size()
            << " steps)\n";
  return 0;
}

int cmd_montecarlo(const CommonFlags& f, const std::string& modes_text, int m,
                   std::uint64_t seed0, int jobs, const std::string& windows_text) {
  const ScenarioSpec spec = resolve(f);
  MonteCarloOptions opt;
  opt.modes.clear();
  for (const auto& name : split(modes_text)) opt.modes.push_back(parse_mode(name));
  opt.m = m;
  opt.seed0 = seed0;
  opt.jobs = jobs;
  for (const auto& t : split(windows_text)) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != t.size() || v < 1 || v > spec.horizon) {
      throw UsageError("--t-windows: '" + t + "' is not a step in 1.." +
                       std::to_string(spec.horizon));
    }
    opt.windows.push_back(v);
  }
  const MetricsReport report = monte_carlo_parallel(spec, opt);

  const fs::path dir = prepare_dir(f.out);
  std::ostringstream rep;
  std::ostringstream cost;
  std::ostringstream counts;
  write_report_csv(rep, report);
  write_cost_csv(cost, report);
  write_run_counts_csv(counts, report);
  write_file(dir / ("report_" + spec.name + ".csv"), rep.str());
  write_file(dir / ("cost_" + spec.name + ".csv"), cost.str());
  write_file(dir / ("runs_" + spec.name + ".csv"), counts.str());
  std::cout << rep.str();

  if (f.plot) {
    const auto l = spec.model.output_dim();
    for (Eigen::Index c = 0; c < l; ++c) {
      std::vector<Series> series;
      for (const auto& s : report.modes) {
        Series line{to_string(s.mode), {}, {}};
        for (Eigen::Index k = 0; k < s.j_bar.rows(); ++k) {
          line.x.push_back(static_cast<double>(k + 1));
          line.y.push_back(s.j_bar(k, c));
        }
        series.push_back(line);
      }
      const std::string suffix = l == 1 ? "" : "_y" + std::to_string(c + 1);
      std::ostringstream svg;
      write_svg_plot(svg, "Average accumulated cost (" + spec.name + suffix + ")", "k", "J(k)",
                     series);
      write_file(dir / ("cost_" + spec.name + suffix + ".svg"), svg.str());
    }
    std::vector<RunRecord> runs;
    for (const Mode mode : opt.modes) runs.push_back(run(spec, mode, seed0));
    write_run_plots(dir, spec.name + "_seed" + std::to_string(seed0), runs);
  }

  if (report.exclusion_flag) {
    std::cerr << "warning: more than 5% of runs aborted in at least one mode\n";
  }
  for (const auto& s : report.modes) {
    if (s.completed == 0) {
      std::cerr << "every run aborted in mode " << to_string(s.mode) << "\n";
      return 1;
    }
  }
  return 0;
}

// ---- validate -------------------------------------------------------------

struct Check {
  std::string name;
  bool pass;
  std::string detail;
};

Check check_zoh() {
  const ContinuousModel c = aircraft_continuous();
  const Dynamics z = zoh_discretize(c.a, c.b, 0.1);
  const Dynamics p = aircraft_discrete_printed();
  const double dev = std::max((z.a - p.a).cwiseAbs().maxCoeff(), (z.b - p.b).cwiseAbs().maxCoeff());
  return {"zoh_matches_printed_aircraft", dev <= 1e-3,
          "max |zoh - printed| = " + std::to_string(dev) + " (limit 1e-3)"};
}

Check check_euler() {
  const ContinuousModel c = aircraft_continuous();
  const Dynamics e = euler_discretize(c.a, c.b, 0.1);
  const Dynamics p = aircraft_discrete_printed();
  const double dev = std::max((e.a - p.a).cwiseAbs().maxCoeff(), (e.b - p.b).cwiseAbs().maxCoeff());
  return {"euler_matches_printed_aircraft", dev <= 1e-3,
          "max |euler - printed| = " + std::to_string(dev)};
}

Check check_closed_loop() {
  const ScenarioSpec spec = scenario("sim1");
  int violations = 0;
  int volume_breaks = 0;
  int aborted = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    for (const Mode mode : {Mode::Learn, Mode::Active}) {
      const RunRecord r = run(spec, mode, seed);
      if (r.aborted) ++aborted;
      for (std::size_t i = 0; i < r.steps.size(); ++i) {
        const auto& s = r.steps[i];
        if (!contains(Ellipsoid(s.theta_hat, s.shape), spec.theta_true, 1e-7)) ++violations;
        if (i > 0 && s.log_det_p > r.steps[i - 1].log_det_p + 1e-9) ++volume_breaks;
      }
    }
  }
  return {"sim1_containment_and_volume", violations == 0 && volume_breaks == 0 && aborted == 0,
          std::to_string(violations) + " containment violations, " +
              std::to_string(volume_breaks) + " volume increases, " + std::to_string(aborted) +
              " aborted runs"};
}

Check check_trace_identity() {
  Rng rng(7);
  std::normal_distribution<double> nd;
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    AffineUncertainModel m;
    m.a0 = Matrix::Identity(3, 3);
    m.b0 = Matrix::Zero(3, 2);
    m.c = Matrix::NullaryExpr(2, 3, [&] { return nd(rng); });
    m.disturbance_shape = Matrix::Identity(3, 3);
    m.a_perturbations = {Matrix::NullaryExpr(3, 3, [&] { return nd(rng); })};
    m.b_perturbations = {Matrix::NullaryExpr(3, 2, [&] { return nd(rng); }),
                         Matrix::NullaryExpr(3, 2, [&] { return nd(rng); })};
    const Matrix g = Matrix::NullaryExpr(3, 3, [&] { return nd(rng); });
    const Ellipsoid belief(Vector::Zero(3), g * g.transpose());
    const Vector x = Vector::NullaryExpr(3, [&] { return nd(rng); });
    const Vector u = Vector::NullaryExpr(2, [&] { return nd(rng); });
    const InfoQuadratic info = build_info_quadratic(m, belief, x);
    const Observation obs = build_observation(m, x, u, Vector::Zero(2));
    const double direct = (obs.phi * belief.shape() * obs.phi.transpose()).trace();
    const double viaq = info_objective(info, u) + info.constant;
    worst = std::max(worst, std::abs(direct - viaq) / (1.0 + std::abs(direct)));
  }
  return {"information_trace_identity", worst <= 1e-10,
          "max relative gap " + std::to_string(worst)};
}

Check check_socp_grid() {
  Rng rng(11);
  std::normal_distribution<double> nd;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    TrackingInstance inst;
    inst.f = Vector::Constant(1, 3.0 * nd(rng));
    inst.b0 = Matrix::Constant(1, 1, nd(rng));
    inst.w = {Matrix::Constant(1, 1, nd(rng)), Matrix::Constant(1, 1, nd(rng))};
    inst.x = Vector::Zero(1);
    inst.y_ref_next = Vector::Zero(1);
    const Matrix g = Matrix::NullaryExpr(2, 2, [&] { return nd(rng); });
    const Ellipsoid set(Vector::NullaryExpr(2, [&] { return nd(rng); }), 0.3 * g * g.transpose());
    const Matrix q = Matrix::Constant(1, 1, 0.2);
    const ControlBounds b{Vector::Constant(1, -5.0), Vector::Constant(1, 5.0)};
    const RobustSolution sol = solve_robust(inst, set, q, b);
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 20000; ++i) {
      const Vector u = Vector::Constant(1, -5.0 + 10.0 * i / 20000.0);
      const ErrorInterval iv = worst_case_interval(inst, set, q, u);
      best = std::min(best, std::max(std::abs(iv.lo(0)), std::abs(iv.hi(0))));
    }
    worst = std::max(worst, sol.objective - best);
  }
  return {"robust_step_vs_grid", worst <= 1e-3, "max excess over grid " + std::to_string(worst)};
}

int cmd_validate() {
  const std::vector<Check> checks{check_zoh(), check_euler(), check_closed_loop(),
                                  check_trace_identity(), check_socp_grid()};
  bool ok = true;
  for (const auto& c : checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
    ok = ok && c.pass;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive robust tracking control with ellipsoidal set learning"};
  app.require_subcommand(1);

  CommonFlags sim_flags;
  std::string mode = "learn";
  std::uint64_t seed = 0;
  auto* sim = app.add_subcommand("simulate", "Run one closed-loop simulation");
  add_common(sim, sim_flags);
  sim->add_option("--mode", mode, "fixed, learn, active or known_theta")
      ->check(CLI::IsMember({"fixed", "learn", "active", "known_theta"}));
  sim->add_option("--seed", seed, "Disturbance seed");

  CommonFlags mc_flags;
  std::string modes = "fixed,learn,active";
  int m = 100;
  std::uint64_t seed0 = 0;
  int jobs = 0;
  std::string windows;
  auto* mc = app.add_subcommand("montecarlo", "Monte Carlo comparison of controller modes");
  add_common(mc, mc_flags);
  mc->add_option("--modes", modes, "Comma-separated modes");
  mc->add_option("--M", m, "Runs per mode")->check(CLI::PositiveNumber);
  mc->add_option("--seed0", seed0, "First seed");
  mc->add_option("--jobs", jobs, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
  mc->add_option("--t-windows", windows, "Comma-separated T values for the error table");

  app.add_subcommand("validate", "Golden discretization check and property suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return 2;
  }

  try {
    if (sim->parsed()) return cmd_simulate(sim_flags, mode, seed);
    if (mc->parsed()) {
      for (const auto& name : split(modes)) {
        try {
          parse_mode(name);
        } catch (const std::invalid_argument& e) {
          throw UsageError(std::string("--modes: ") + e.what());
        }
      }
      if (split(modes).empty()) throw UsageError("--modes: empty list");
      return cmd_montecarlo(mc_flags, modes, m, seed0, jobs, windows);
    }
    return cmd_validate();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
