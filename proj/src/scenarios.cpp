#include "ellctl/scenarios.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ellctl/errors.hpp"

namespace ellctl {

namespace {

Matrix rows(std::initializer_list<std::initializer_list<double>> data) {
  const auto r = static_cast<Eigen::Index>(data.size());
  const auto c = static_cast<Eigen::Index>(data.begin()->size());
  Matrix m(r, c);
  Eigen::Index i = 0;
  for (const auto& row : data) {
    Eigen::Index j = 0;
    for (const double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

Vector vec(std::initializer_list<double> data) {
  Vector v(static_cast<Eigen::Index>(data.size()));
  Eigen::Index i = 0;
  for (const double x : data) v(i++) = x;
  return v;
}

AffineUncertainModel siso_model() {
  AffineUncertainModel m;
  m.a0 = rows({{0, 1, 0}, {0, 0, 1}, {-0.3, 0.4, 0.2}});
  m.b0 = rows({{-0.8}, {0.7}, {-0.5}});
  m.b_perturbations = {rows({{0.3}, {-0.6}, {0.3}}), rows({{-0.5}, {0.5}, {-0.3}})};
  m.c = rows({{0.5, 0.8, 1.1}});
  m.disturbance_shape = 0.5 * Matrix::Identity(3, 3);
  return m;
}

ScenarioSpec sim1() {
  ScenarioSpec s;
  s.name = "sim1";
  s.model = siso_model();
  s.theta_true = vec({0.2, 0.1});
  s.x0 = vec({1, 1, 1});
  s.belief0 = Ellipsoid(vec({0.8, 0.7}), rows({{4, 1}, {1, 2}}));
  s.reference = TriangleReference{5.0, 23};
  s.horizon = 46;
  s.bounds = {vec({-25}), vec({25})};
  s.ma = rows({{0.8}});
  s.windows = {2, 4, 6, 8, 10, 15, 20, 25, 30, 45};
  return s;
}

ScenarioSpec sim2() {
  ScenarioSpec s;
  s.name = "sim2";
  s.model = siso_model();
  s.model.a_perturbations = {rows({{0, 0, 0}, {0, 0, 0.5}, {0, 0, 0}})};
  s.theta_true = vec({0.15, 0.2, 0.1});
  s.x0 = vec({1, 1, 1});
  s.belief0 = Ellipsoid(vec({0.9, 0.8, 0.7}), rows({{3, 1, 1}, {1, 4, 1}, {1, 1, 2}}));
  s.reference = StepsReference{{1, 25, 75}, {4.0, -5.0, -1.5}};
  s.horizon = 100;
  s.bounds = {vec({-25}), vec({25})};
  s.ma = rows({{0.6}});
  s.windows = {2, 5, 10, 20, 30, 40, 55, 70, 85, 100};
  return s;
}

ScenarioSpec sim3() {
  ScenarioSpec s;
  s.name = "sim3";
  const Dynamics d = aircraft_discrete_printed();
  AffineUncertainModel& m = s.model;
  m.a0 = d.a;
  m.b0 = d.b;
  Matrix a1 = Matrix::Zero(4, 4);
  Matrix a2 = Matrix::Zero(4, 4);
  Matrix b1 = Matrix::Zero(4, 2);
  Matrix b2 = Matrix::Zero(4, 2);
  // Roughly 10% of the nominal entries, as tabulated.
  a1(0, 0) = 0.09962;
  a2(0, 1) = 0.18984;
  b1(0, 0) = 0.101;
  b2(1, 1) = 0.00086;
  m.a_perturbations = {a1, a2};
  m.b_perturbations = {b1, b2};
  m.c = rows({{1, 0, 0, 0}, {0, 1, 0, 0}});
  m.disturbance_shape = vec({0.1, 0.05, 0.05, 0.05}).asDiagonal();
  s.theta_true = vec({0.5, -0.8, 0.2, -0.6});
  s.x0 = vec({250, 0.01, 0.01, 0.01});
  s.belief0 = Ellipsoid(vec({0.1, -0.1, 0.1, -0.1}), 2.0 * Matrix::Identity(4, 4));
  s.reference = SinusoidReference{250.0, 6.0, 25.0};
  s.horizon = 100;
  s.bounds = {vec({-1e3, -1e4}), vec({1e3, 1e4})};
  s.ma = vec({0.2, 10000.0}).asDiagonal();
  s.windows = {2, 5, 10, 20, 30, 50, 75, 100};
  return s;
}

}  // namespace

Vector reference_at(const Reference& ref, long k) {
  if (k < 1) throw std::invalid_argument("reference_at: steps start at 1");
  return std::visit(
      [k](const auto& r) -> Vector {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, TriangleReference>) {
          const long period = 2L * r.half;
          const long kk = (k - 1) % period + 1;
          const double slope = r.peak / r.half;
          const double v = kk <= r.half ? slope * static_cast<double>(kk)
                                        : r.peak - slope * static_cast<double>(kk - r.half - 1);
          return Vector::Constant(1, v);
        } else if constexpr (std::is_same_v<T, StepsReference>) {
          double v = r.values.front();
          for (std::size_t i = 0; i < r.starts.size(); ++i) {
            if (k >= r.starts[i]) v = r.values[i];
          }
          return Vector::Constant(1, v);
        } else {
          Vector v(2);
          v << r.level, r.amplitude * std::sin(static_cast<double>(k) * std::numbers::pi / r.period);
          return v;
        }
      },
      ref);
}

Eigen::Index reference_dim(const Reference& ref) {
  return std::holds_alternative<SinusoidReference>(ref) ? 2 : 1;
}

std::string reference_kind(const Reference& ref) {
  switch (ref.index()) {
    case 0: return "triangle";
    case 1: return "steps";
    default: return "aircraft";
  }
}

void ScenarioSpec::validate() const {
  model.validate();
  const auto n = model.state_dim();
  const auto m = model.input_dim();
  require_dim(x0.size() == n, "scenario: x0 size");
  require_dim(theta_true.size() == model.theta_dim(), "scenario: theta size");
  require_dim(belief0.dim() == model.theta_dim(), "scenario: belief size");
  require_dim(reference_dim(reference) == model.output_dim(), "scenario: reference size");
  require_dim(bounds.u_min.size() == m && bounds.u_max.size() == m, "scenario: bounds size");
  require_dim(ma.rows() == m && ma.cols() == m, "scenario: Ma size");
  if (horizon < 1) throw std::invalid_argument("scenario: horizon must be >= 1");
  if ((bounds.u_min.array() > bounds.u_max.array()).any()) {
    throw std::invalid_argument("scenario: u_min > u_max");
  }
  if (Eigen::LLT<Matrix>(ma).info() != Eigen::Success) {
    throw std::invalid_argument("scenario: Ma must be positive definite");
  }
  if (const auto* steps = std::get_if<StepsReference>(&reference)) {
    if (steps->starts.empty() || steps->starts.size() != steps->values.size() ||
        steps->starts.front() != 1) {
      throw std::invalid_argument("scenario: steps reference needs starts[0] = 1");
    }
  }
  if (const auto* tri = std::get_if<TriangleReference>(&reference); tri && tri->half < 1) {
    throw std::invalid_argument("scenario: triangle half period must be >= 1");
  }
  if (!contains(belief0, theta_true)) {
    throw std::invalid_argument("scenario: theta_true lies outside the initial belief");
  }
}

ScenarioSpec scenario(const std::string& name) {
  if (name == "sim1") return sim1();
  if (name == "sim2") return sim2();
  if (name == "sim3") return sim3();
  throw std::invalid_argument("unknown scenario '" + name + "'");
}

std::vector<std::string> scenario_names() { return {"sim1", "sim2", "sim3"}; }

ContinuousModel aircraft_continuous() {
  return {rows({{-0.038, 18.984, 0, -32.174},
                {-0.001, -0.632, 1, 0},
                {0, -0.759, -0.518, 0},
                {0, 0, 1, 0}}),
          rows({{10.1, 0}, {0, -0.0086}, {0.025, -0.011}, {0, 0}})};
}

Dynamics aircraft_discrete_printed() {
  return {rows({{0.9962, 1.8984, 0, -3.2174},
                {-0.0001, 0.9368, 0.1, 0},
                {0, -0.0759, 0.9482, 0},
                {0, 0, 0.1, 1}}),
          rows({{1.01, 0}, {0, -0.0009}, {0.0025, -0.0011}, {0, 0}})};
}

}  // namespace ellctl
