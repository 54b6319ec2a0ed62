#include <doctest.h>

#include <cmath>

#include "ellctl/experiments.hpp"
#include "oracles.hpp"

using namespace ellctl;

TEST_CASE("references") {
  const ScenarioSpec s1 = scenario("sim1");
  CHECK(reference_at(s1.reference, 23)(0) == doctest::Approx(5.0));
  CHECK(reference_at(s1.reference, 24)(0) == doctest::Approx(5.0));
  CHECK(reference_at(s1.reference, 46)(0) == doctest::Approx(5.0 / 23.0));
  CHECK(reference_at(s1.reference, 47)(0) == doctest::Approx(reference_at(s1.reference, 1)(0)));
  CHECK_THROWS(reference_at(s1.reference, 0));

  const ScenarioSpec s2 = scenario("sim2");
  CHECK(reference_at(s2.reference, 1)(0) == 4.0);
  CHECK(reference_at(s2.reference, 30)(0) == -5.0);
  CHECK(reference_at(s2.reference, 500)(0) == -1.5);

  const ScenarioSpec s3 = scenario("sim3");
  REQUIRE(reference_dim(s3.reference) == 2);
  CHECK(reference_at(s3.reference, 25)(0) == 250.0);
  CHECK(std::abs(reference_at(s3.reference, 25)(1)) < 1e-12);
  CHECK(s3.x0(0) == 250.0);
}

TEST_CASE("scenario registry") {
  for (const auto& name : scenario_names()) CHECK_NOTHROW(scenario(name).validate());
  CHECK_THROWS_AS(scenario("sim9"), std::invalid_argument);
  CHECK(parse_mode("known_theta") == Mode::KnownTheta);
  CHECK_THROWS_AS(parse_mode("greedy"), std::invalid_argument);
  for (const Mode m : {Mode::Fixed, Mode::Learn, Mode::Active, Mode::KnownTheta}) CHECK(parse_mode(to_string(m)) == m);
}

TEST_CASE("single runs") {
  const ScenarioSpec s1 = scenario("sim1");
  SUBCASE("fixed keeps the prior") {
    const RunRecord r = run(s1, Mode::Fixed, 0);
    REQUIRE_FALSE(r.aborted);
    REQUIRE(r.steps.size() == static_cast<std::size_t>(s1.horizon));
    for (const auto& st : r.steps) CHECK(st.trace_p == r.steps.front().trace_p);
  }
  SUBCASE("learning shrinks volume and keeps the truth") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      for (const Mode m : {Mode::Learn, Mode::Active}) {
        const RunRecord r = run(s1, m, seed);
        REQUIRE_FALSE(r.aborted);
        for (std::size_t k = 0; k < r.steps.size(); ++k) {
          const auto& st = r.steps[k];
          CHECK(contains(Ellipsoid(st.theta_hat, st.shape), s1.theta_true, 1e-7));
          if (k > 0) CHECK(st.log_det_p <= r.steps[k - 1].log_det_p + 1e-9);
          CHECK((st.u.array() >= s1.bounds.u_min.array()).all());
          CHECK((st.u.array() <= s1.bounds.u_max.array()).all());
        }
      }
    }
  }
  SUBCASE("deterministic") {
    const RunRecord a = run(s1, Mode::Active, 7);
    const RunRecord b = run(s1, Mode::Active, 7);
    REQUIRE(a.steps.size() == b.steps.size());
    for (std::size_t k = 0; k < a.steps.size(); ++k) {
      CHECK(a.steps[k].y == b.steps[k].y);
      CHECK(a.steps[k].u == b.steps[k].u);
    }
  }
  SUBCASE("first output is C x0") {
    const RunRecord r = run(s1, Mode::Learn, 1);
    CHECK((r.steps.front().y - s1.model.c * s1.x0).norm() == 0.0);
  }
  SUBCASE("overflow aborts") {
    ScenarioSpec bad = s1;
    bad.model.a0 = 1e200 * Matrix::Identity(3, 3);
    const RunRecord r = run(bad, Mode::Learn, 0);
    CHECK(r.aborted);
    CHECK(r.diagnostic.rfind("step ", 0) == 0);
  }
}

TEST_CASE("metrics") {
  RunRecord r;
  for (int k = 1; k <= 20; ++k) {
    StepRecord st;
    st.k = k;
    st.y = Vector::Constant(1, k);
    st.y_ref = Vector::Zero(1);
    r.steps.push_back(st);
  }
  CHECK(window_error(r, 4) == doctest::Approx(2.5));
  CHECK(window_error(r, 10) == doctest::Approx(5.5));
  CHECK(window_error(r, 15) == doctest::Approx(13.0));
  CHECK_THROWS_AS(window_error(r, 21), std::invalid_argument);
  const Matrix j = accumulated_cost(r);
  CHECK(j(0, 0) == doctest::Approx(1.0));
  CHECK(j(2, 0) == doctest::Approx(14.0 / 3.0));

  RunRecord two;
  StepRecord st;
  st.y = Vector::Constant(2, 1.0);
  st.y_ref = Vector::Zero(2);
  st.y(1) = -2.0;
  two.steps.push_back(st);
  CHECK(abs_errors(two)[0] == doctest::Approx(3.0));
  CHECK(accumulated_cost(two)(0, 1) == doctest::Approx(4.0));
}

TEST_CASE("monte carlo") {
  const ScenarioSpec s1 = scenario("sim1");
  MonteCarloOptions opt;
  opt.m = 6;
  opt.seed0 = 3;
  const MetricsReport serial = monte_carlo_serial(s1, opt);
  REQUIRE(serial.windows == s1.windows);
  REQUIRE(serial.modes.size() == 3);
  for (const int jobs : {1, 2, 4}) {
    opt.jobs = jobs;
    const MetricsReport par = monte_carlo_parallel(s1, opt);
    for (std::size_t i = 0; i < serial.modes.size(); ++i) {
      CHECK(par.modes[i].e_bar == serial.modes[i].e_bar);
      CHECK(par.modes[i].j_bar == serial.modes[i].j_bar);
    }
  }

  // Averages and ratios follow from the individual runs.
  const ModeSummary* fixed = serial.find(Mode::Fixed);
  const ModeSummary* learn = serial.find(Mode::Learn);
  REQUIRE(fixed);
  REQUIRE(learn);
  double acc = 0.0;
  for (int s = 0; s < 6; ++s) acc += window_error(run(s1, Mode::Learn, 3 + s), 45);
  const std::size_t w45 = serial.windows.size() - 1;
  CHECK(learn->e_bar[w45] == doctest::Approx(acc / 6).epsilon(1e-14));
  REQUIRE(serial.ratios[w45].has_value());
  CHECK(serial.ratios[w45]->ratio1 == doctest::Approx((fixed->e_bar[w45] - learn->e_bar[w45]) / learn->e_bar[w45]));
  CHECK_FALSE(serial.exclusion_flag);

  MonteCarloOptions one;
  one.m = 1;
  one.seed0 = 11;
  one.modes = {Mode::Active};
  one.windows = {2, 45};
  const MetricsReport single = monte_carlo_serial(s1, one);
  const RunRecord ref = run(s1, Mode::Active, 11);
  CHECK(single.modes[0].e_bar[0] == window_error(ref, 2));
  CHECK(single.modes[0].j_bar == accumulated_cost(ref));
  CHECK_FALSE(single.ratios[0].has_value());

  one.windows = {47};
  CHECK_THROWS_AS(monte_carlo_serial(s1, one), std::invalid_argument);
  one.windows = {};
  one.m = 0;
  CHECK_THROWS_AS(monte_carlo_parallel(s1, one), std::invalid_argument);

  ScenarioSpec bad = s1;
  bad.model.a0 = 1e200 * Matrix::Identity(3, 3);
  MonteCarloOptions bo;
  bo.m = 3;
  bo.modes = {Mode::Learn};
  const MetricsReport br = monte_carlo_parallel(bad, bo);
  CHECK(br.modes[0].aborted == 3);
  CHECK(br.exclusion_flag);
}
