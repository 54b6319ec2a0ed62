#include <doctest.h>

#include <cmath>

#include "ellctl/estimator.hpp"
#include "ellctl/scenarios.hpp"
#include "oracles.hpp"

using namespace ellctl;

namespace {

Observation scalar_obs(double h, double phi, double q) {
  return {Vector::Constant(1, h), Matrix::Constant(1, 1, phi), Matrix::Constant(1, 1, q)};
}

ParameterBelief scalar_belief(double c, double p) {
  return ParameterBelief(Ellipsoid(Vector::Constant(1, c), Matrix::Constant(1, 1, p)));
}

// Shortest interval length produced by the fusion formulas over a rho grid.
double best_scalar_shape(double c, double p, double h, double q) {
  double best = 1e300;
  for (int i = 1; i <= 200000; ++i) {
    const double rho = 5e-4 * i;
    const double t = q + rho * p;
    const double eps = h - c;
    const double beta = 1.0 + rho - rho * eps * eps / t;
    if (beta <= 0.0) continue;
    const double k = rho * p / t;
    const double shape = beta * ((1 - k) * (1 - k) * p + k * k * q / rho);
    best = std::min(best, shape);
  }
  return best;
}

}  // namespace

TEST_CASE("build observation") {
  const ScenarioSpec s1 = scenario("sim1");
  const Observation zero = build_observation(s1.model, Vector::Zero(3), Vector::Zero(1), Vector::Constant(1, 0.7));
  CHECK(zero.h(0) == 0.7);
  CHECK(zero.phi.norm() == 0.0);

  const Observation one = build_observation(s1.model, Vector::Zero(3), Vector::Constant(1, 1.0), Vector::Zero(1));
  REQUIRE(one.phi.cols() == 2);
  CHECK(std::abs(one.phi(0, 0)) < 1e-15);  // C B1 cancels exactly
  CHECK(one.phi(0, 1) == doctest::Approx(0.5 * -0.5 + 0.8 * 0.5 + 1.1 * -0.3));
  CHECK(one.q(0, 0) == doctest::Approx(1.05));

  // H = phi theta + upsilon for the realized step.
  const ScenarioSpec s2 = scenario("sim2");
  std::mt19937_64 rng(4);
  const Vector x = oracle::random_vec(3, rng);
  const Vector u = oracle::random_vec(1, rng);
  const Vector w = 0.1 * oracle::random_vec(3, rng);
  const StepResult st = step(s2.model, x, u, s2.theta_true, w);
  const Observation obs = build_observation(s2.model, x, u, st.y_next);
  CHECK((obs.h - obs.phi * s2.theta_true - s2.model.c * w).norm() < 1e-12);
}

TEST_CASE("update basics") {
  SUBCASE("zero innovation keeps the center") {
    const ParameterBelief prior(Ellipsoid(Vector::Constant(2, 0.5), Matrix::Identity(2, 2)));
    Observation obs{Vector::Constant(1, 1.0), Matrix::Constant(1, 2, 1.0), Matrix::Constant(1, 1, 0.01)};
    const ParameterBelief post = update(prior, obs);
    CHECK(post.last_rho > 0.0);
    CHECK((post.set.center() - prior.set.center()).norm() < 1e-12);
    CHECK(volume_measures(post.set).log_det < volume_measures(prior.set).log_det);
  }
  SUBCASE("rho = 0 reproduces the prior") {
    const ParameterBelief prior = scalar_belief(0.3, 2.0);
    const ParameterBelief post = update_with_rho(prior, scalar_obs(1.0, 1.0, 1.0), 0.0);
    CHECK(post.set.center() == prior.set.center());
    CHECK(post.set.shape() == prior.set.shape());
    CHECK(post.last_beta == 1.0);
  }
  SUBCASE("touching intervals") {
    // Prior [-2, 2], observation [2, 4]: the intersection is the point 2.
    const ParameterBelief post = update(scalar_belief(0.0, 4.0), scalar_obs(3.0, 1.0, 1.0));
    CHECK(post.set.center()(0) == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(post.set.shape()(0, 0) < 1e-6);
    CHECK(contains(post.set, Vector::Constant(1, 2.0), 1e-6));
  }
  SUBCASE("overlapping intervals match the rho grid") {
    // Prior [-2, 2], observation [1.5, 3.5].
    const ParameterBelief post = update(scalar_belief(0.0, 4.0), scalar_obs(2.5, 1.0, 1.0));
    const double best = best_scalar_shape(0.0, 4.0, 2.5, 1.0);
    CHECK(post.set.shape()(0, 0) == doctest::Approx(best).epsilon(1e-4));
    CHECK(contains(post.set, Vector::Constant(1, 1.5)));
    CHECK(contains(post.set, Vector::Constant(1, 2.0)));
  }
  SUBCASE("inconsistent observation") {
    const Observation far = scalar_obs(10.0, 1.0, 1.0);
    CHECK_THROWS_AS(update(scalar_belief(0.0, 1.0), far), InconsistentObservationError);
    const ParameterBelief kept = update(scalar_belief(0.0, 1.0), far, InconsistencyPolicy::SkipUpdate);
    CHECK(kept.skipped);
    CHECK(kept.set.shape()(0, 0) == 1.0);
  }
}

TEST_CASE("update agrees with generic fusion for square regressors") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const int d = 1 + trial % 3;
    const Matrix p = oracle::random_spd(d, rng);
    const Matrix q = oracle::random_spd(d, rng);
    Matrix phi = oracle::random_spd(d, rng);
    const Vector center = oracle::random_vec(d, rng);
    const Vector theta = oracle::rejection_sample(center, p, rng);
    const Vector h = phi * theta + oracle::rejection_sample(Vector::Zero(d), q, rng);
    const ParameterBelief prior(Ellipsoid(center, p));
    const Observation obs{h, phi, q};
    const double rho = 0.2 + 0.3 * trial;
    const Matrix phi_inv = phi.inverse();
    const Ellipsoid slab(phi_inv * h, phi_inv * q * phi_inv.transpose());
    const auto generic = intersection_bound(prior.set, slab, rho);
    const ParameterBelief gain = update_with_rho(prior, obs, rho);
    CHECK((gain.set.center() - generic.set.center()).norm() < 1e-8 * (1 + generic.set.center().norm()));
    CHECK((gain.set.shape() - generic.set.shape()).norm() < 1e-8 * (1 + generic.set.shape().norm()));
  }
}

TEST_CASE("guaranteed containment and volume monotonicity") {
  std::mt19937_64 rng(77);
  int violations = 0;
  int increases = 0;
  for (int run = 0; run < 30; ++run) {
    const int d = 2 + run % 3;
    const int l = 1 + run % 2;
    const Vector theta = oracle::random_vec(d, rng);
    ParameterBelief belief(Ellipsoid(theta + 0.5 * oracle::random_vec(d, rng).normalized(), 2.0 * Matrix::Identity(d, d)));
    const Matrix q = 0.3 * oracle::random_spd(l, rng);
    for (int k = 0; k < 30; ++k) {
      const Matrix phi = Matrix::NullaryExpr(l, d, [&] { return std::normal_distribution<double>()(rng); });
      const Vector h = phi * theta + oracle::rejection_sample(Vector::Zero(l), q, rng);
      const ParameterBelief next = update(belief, {h, phi, q});
      if (!contains(next.set, theta, 1e-7)) ++violations;
      if (volume_measures(next.set).log_det > volume_measures(belief.set).log_det + 1e-9) ++increases;
      belief = next;
    }
  }
  CHECK(violations == 0);
  CHECK(increases == 0);
}

TEST_CASE("innovation ellipsoid") {
  SUBCASE("no parameter contribution") {
    const ParameterBelief b(Ellipsoid(Vector::Zero(2), Matrix::Identity(2, 2)));
    const Observation obs{Vector::Zero(1), Matrix::Zero(1, 2), Matrix::Constant(1, 1, 0.5)};
    const Ellipsoid e = innovation_ellipsoid(b, obs);
    CHECK(e.shape()(0, 0) == doctest::Approx(1.0));  // q = 1 fallback: (1 + 1) Q
  }
  SUBCASE("symmetric operands") {
    const ParameterBelief b(Ellipsoid(Vector::Zero(2), Matrix::Identity(2, 2)));
    const Observation obs{Vector::Zero(2), Matrix::Identity(2, 2), Matrix::Identity(2, 2)};
    CHECK((innovation_ellipsoid(b, obs).shape() - 4.0 * Matrix::Identity(2, 2)).norm() < 1e-8);
  }
  SUBCASE("realized innovations are covered") {
    const ScenarioSpec s1 = scenario("sim1");
    const ParameterBelief b(s1.belief0);
    std::mt19937_64 rng(8);
    Rng lib(8);
    const Vector x = s1.x0;
    const Vector u = Vector::Constant(1, 3.0);
    int misses = 0;
    Ellipsoid cover = innovation_ellipsoid(b, build_observation(s1.model, x, u, Vector::Zero(1)));
    for (int i = 0; i < 1000; ++i) {
      const Vector theta = oracle::rejection_sample(b.set.center(), b.set.shape(), rng);
      const Vector w = sample_interior(s1.model.disturbance_set(), lib);
      const StepResult st = step(s1.model, x, u, theta, w);
      const Observation obs = build_observation(s1.model, x, u, st.y_next);
      if (!contains(cover, obs.h - obs.phi * b.set.center())) ++misses;
    }
    CHECK(misses == 0);
  }
}

TEST_CASE("regularized noise") {
  const Matrix q = Matrix::Identity(2, 2);
  CHECK((regularized_noise(q) - (1 + 1e-12) * q).norm() < 1e-20);
  CHECK(regularized_noise(Matrix::Zero(1, 1))(0, 0) > 0.0);
}
