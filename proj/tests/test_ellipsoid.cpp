#include <doctest.h>

#include <cmath>

#include "ellctl/ellipsoid.hpp"
#include "ellctl/errors.hpp"
#include "ellctl/scalar_roots.hpp"
#include "oracles.hpp"

using namespace ellctl;

namespace {

Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

Matrix m2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

Ellipsoid scalar(double c, double p) { return Ellipsoid(Vector::Constant(1, c), Matrix::Constant(1, 1, p)); }

const Ellipsoid kPrior(v2(0.8, 0.7), m2(4, 1, 1, 2));

}  // namespace

TEST_CASE("construction validates shape") {
  CHECK_THROWS_AS(Ellipsoid(Vector::Zero(2), Matrix::Identity(3, 3)), DimensionError);
  CHECK_THROWS_AS(Ellipsoid(Vector::Zero(2), m2(1, 0.5, 0.0, 1)), std::invalid_argument);
  CHECK_THROWS_AS(Ellipsoid(Vector::Zero(2), m2(1, 0, 0, -0.5)), std::invalid_argument);
  CHECK_NOTHROW(Ellipsoid(Vector::Zero(2), Matrix::Zero(2, 2)));
}

TEST_CASE("contains") {
  const Ellipsoid ball = Ellipsoid::ball(2);
  CHECK(contains(ball, v2(1, 0)));
  CHECK_FALSE(contains(ball, v2(1.1, 0)));
  const Vector theta = v2(0.2, 0.1);
  CHECK(oracle::quad_form(kPrior.center(), kPrior.shape(), theta) <= 1.0);
  CHECK(contains(kPrior, theta));
  CHECK_THROWS_AS(contains(ball, Vector::Zero(3)), DimensionError);

  SUBCASE("flat sets use range membership") {
    const Ellipsoid flat(Vector::Zero(2), m2(1, 0, 0, 0));
    CHECK(contains(flat, v2(0.9, 0)));
    CHECK_FALSE(contains(flat, v2(0.5, 1e-3)));
    CHECK_FALSE(contains(flat, v2(1.2, 0)));
  }
}

TEST_CASE("support function") {
  CHECK(support(Ellipsoid::ball(2), v2(1, 0), Sense::Max) == doctest::Approx(1.0));
  CHECK(support(kPrior, v2(1, 0), Sense::Max) == doctest::Approx(2.8));
  const double lo = support(kPrior, v2(0, 1), Sense::Min);
  CHECK(lo == doctest::Approx(0.7 - std::sqrt(2.0)));

  // Dense boundary parameterization as the oracle.
  const Matrix l = Eigen::LLT<Matrix>(kPrior.shape()).matrixL();
  double best = 1e300;
  for (int i = 0; i < 200000; ++i) {
    const double t = 2.0 * M_PI * i / 200000.0;
    const Vector x = kPrior.center() + l * v2(std::cos(t), std::sin(t));
    best = std::min(best, x(1));
  }
  CHECK(lo == doctest::Approx(best).epsilon(1e-6));
}

TEST_CASE("minkowski sum bound") {
  SUBCASE("equal balls") {
    const auto sb = minkowski_sum_bound(Ellipsoid::ball(3), Ellipsoid::ball(3));
    CHECK(sb.tau == doctest::Approx(1.0));
    CHECK((sb.set.shape() - 4.0 * Matrix::Identity(3, 3)).norm() < 1e-8);
  }
  SUBCASE("1-D intervals add exactly") {
    const auto sb = minkowski_sum_bound(scalar(0, 4), scalar(0, 1));
    CHECK(sb.tau == doctest::Approx(2.0));
    CHECK(sb.set.shape()(0, 0) == doctest::Approx(9.0));
    // tau solves sum 1/(lambda + tau) = n / (tau (tau + 1)) with lambda = 4.
    CHECK(1.0 / (4.0 + sb.tau) == doctest::Approx(1.0 / (sb.tau * (sb.tau + 1.0))));
  }
  SUBCASE("centers add") {
    const auto sb = minkowski_sum_bound(Ellipsoid(v2(1, 0), m2(2, 0, 0, 1)),
                                        Ellipsoid(v2(0, 1), m2(1, 0.2, 0.2, 3)));
    CHECK((sb.set.center() - v2(1, 1)).norm() < 1e-15);
  }
  SUBCASE("singular second operand") {
    CHECK_THROWS_AS(minkowski_sum_bound(Ellipsoid::ball(2), Ellipsoid(Vector::Zero(2), m2(1, 0, 0, 0))),
                    DegenerateOperandError);
  }
}

TEST_CASE("intersection bound") {
  SUBCASE("identity fusion") {
    const Ellipsoid e(v2(0.3, -1), m2(2, 0.4, 0.4, 1));
    for (const double rho : {0.1, 1.0, 10.0}) {
      const auto fb = intersection_bound(e, e, rho);
      CHECK((fb.set.center() - e.center()).norm() < 1e-9);
      CHECK((fb.set.shape() - e.shape()).norm() < 1e-9);
    }
  }
  SUBCASE("rho = 0 returns the first operand") {
    const auto fb = intersection_bound(kPrior, Ellipsoid::ball(2), 0.0);
    CHECK(fb.beta == 1.0);
    CHECK(fb.set.shape() == kPrior.shape());
    CHECK(fb.set.center() == kPrior.center());
  }
  SUBCASE("scalar hand evaluation") {
    // L = Pa/(Pa + Pb/rho) = 1/2, c = 1/2, beta = 1 + rho - rho d^2/(rho Pa + Pb) = 2 - 1/8,
    // Pc = beta ((1-L)^2 Pa + L^2 Pb / rho) = 1.875 * 2.
    const auto fb = intersection_bound(scalar(0, 4), scalar(1, 4), 1.0);
    CHECK(fb.beta == doctest::Approx(1.875));
    CHECK(fb.set.center()(0) == doctest::Approx(0.5));
    CHECK(fb.set.shape()(0, 0) == doctest::Approx(3.75));
  }
  SUBCASE("negative rho rejected") {
    CHECK_THROWS(intersection_bound(kPrior, kPrior, -1.0));
  }
}

TEST_CASE("optimal rho") {
  CHECK(optimal_rho(kPrior, kPrior) == 0.0);

  SUBCASE("scalar grid oracle") {
    const Ellipsoid a = scalar(0, 4);
    const Ellipsoid b = scalar(3, 1);
    double best = 1e300;
    for (int i = 1; i <= 1000000; ++i) {
      const double rho = 1e-4 * i;
      try {
        best = std::min(best, intersection_bound(a, b, rho).set.shape()(0, 0));
      } catch (const InconsistentSetsError&) {
      }
    }
    const double rho = optimal_rho(a, b);
    const double ours = intersection_bound(a, b, rho).set.shape()(0, 0);
    CHECK(ours <= best + 1e-6);
    CHECK(ours >= best - 1e-6);
  }
  SUBCASE("disjoint operands") {
    CHECK_THROWS_AS(optimal_rho(scalar(0, 1), scalar(5, 1)), InconsistentSetsError);
  }
}

TEST_CASE("volume measures") {
  const auto vm = volume_measures(kPrior);
  CHECK(vm.trace == doctest::Approx(6.0));
  CHECK(vm.log_det == doctest::Approx(std::log(7.0)));
  CHECK(volume_measures(Ellipsoid::ball(3)).log_det == doctest::Approx(0.0));
  CHECK(volume_measures(Ellipsoid(Vector::Zero(4), 2.0 * Matrix::Identity(4, 4))).trace == doctest::Approx(8.0));
  CHECK(std::isinf(volume_measures(Ellipsoid(Vector::Zero(2), m2(1, 0, 0, 0))).log_det));
}

TEST_CASE("interior sampling") {
  Rng rng(3);
  const Ellipsoid ball = Ellipsoid::ball(2);
  Vector mean = Vector::Zero(2);
  for (int i = 0; i < 10000; ++i) {
    const Vector x = sample_interior(ball, rng);
    REQUIRE(contains(ball, x));
    mean += x / 10000.0;
  }
  CHECK(mean.norm() < 0.05);

  // Uniform in volume: P(|x| <= 1/2) = 1/4 in the plane.
  int inner = 0;
  for (int i = 0; i < 20000; ++i) inner += sample_interior(ball, rng).norm() <= 0.5;
  CHECK(inner / 20000.0 == doctest::Approx(0.25).epsilon(0.08));

  const Ellipsoid point(v2(1, 2), Matrix::Zero(2, 2));
  CHECK(sample_interior(point, rng) == point.center());
}

TEST_CASE("fusion containment property") {
  std::mt19937_64 rng(101);
  int violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + trial % 4;
    const Matrix pa = oracle::random_spd(d, rng);
    const Matrix pb = oracle::random_spd(d, rng);
    const Vector shared = oracle::random_vec(d, rng);
    // Both sets contain `shared`, so the intersection is nonempty.
    const Ellipsoid ea(shared + 0.5 * Matrix(Eigen::LLT<Matrix>(pa).matrixL()) * oracle::random_vec(d, rng).normalized(), pa);
    const Ellipsoid eb(shared + 0.5 * Matrix(Eigen::LLT<Matrix>(pb).matrixL()) * oracle::random_vec(d, rng).normalized(), pb);
    const auto fb = intersection_bound(ea, eb, optimal_rho(ea, eb));
    for (int s = 0; s < 200; ++s) {
      const Vector x = oracle::rejection_sample(ea.center(), ea.shape(), rng);
      if (oracle::quad_form(eb.center(), eb.shape(), x) <= 1.0 && !contains(fb.set, x, 1e-9)) ++violations;
    }
    // Never worse than the rho = 0 anchor.
    CHECK(volume_measures(fb.set).log_det <= volume_measures(ea).log_det + 1e-9);
  }
  CHECK(violations == 0);
}

TEST_CASE("sum containment property") {
  std::mt19937_64 rng(202);
  int violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + trial % 4;
    const Ellipsoid ea(oracle::random_vec(d, rng), oracle::random_spd(d, rng));
    const Ellipsoid eb(oracle::random_vec(d, rng), oracle::random_spd(d, rng));
    const auto sb = minkowski_sum_bound(ea, eb);
    for (int s = 0; s < 100; ++s) {
      const Vector x = oracle::rejection_sample(ea.center(), ea.shape(), rng) +
                       oracle::rejection_sample(eb.center(), eb.shape(), rng);
      if (!contains(sb.set, x)) ++violations;
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("scalar root helpers") {
  CHECK(roots::bisect([](double x) { return x * x - 2.0; }, 0.0, 2.0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(roots::bisect_log([](double x) { return std::log(x) - 3.0; }, 1e-3, 1e6) ==
        doctest::Approx(std::exp(3.0)));
  CHECK_THROWS_AS(roots::bisect([](double x) { return x * x + 1.0; }, -1.0, 1.0), RootFindError);
  const auto grid = roots::logspace(1e-2, 1e2, 5);
  REQUIRE(grid.size() == 5);
  CHECK(grid[2] == doctest::Approx(1.0));
}

TEST_CASE("psd helpers") {
  const Matrix p = m2(4, 1, 1, 2);
  const Matrix s = psd_sqrt(p);
  CHECK((s * s.transpose() - p).norm() < 1e-12);
  const Matrix r = repair_psd(m2(1, 0, 1e-3, -1e-9));
  CHECK((r - r.transpose()).norm() == 0.0);
  CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(r).eigenvalues().minCoeff() >= -1e-15);
}
