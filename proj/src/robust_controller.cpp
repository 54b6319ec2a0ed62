#include "ellctl/robust_controller.hpp"

#include <cmath>
#include <limits>

#include "ellctl/errors.hpp"

namespace ellctl {

ControlBounds ControlBounds::unbounded(Eigen::Index m) {
  const double inf = std::numeric_limits<double>::infinity();
  return {Vector::Constant(m, -inf), Vector::Constant(m, inf)};
}

TrackingInstance build_instance(const AffineUncertainModel& model, const Vector& x,
                                const Vector& y_ref_next) {
  model.validate();
  require_dim(x.size() == model.state_dim(), "build_instance: state size");
  require_dim(y_ref_next.size() == model.output_dim(), "build_instance: reference size");
  TrackingInstance inst;
  inst.f = model.c * (model.a0 * x) - y_ref_next;
  inst.b0 = model.c * model.b0;
  for (const auto& ai : model.a_perturbations) inst.v.push_back(model.c * ai);
  for (const auto& bj : model.b_perturbations) inst.w.push_back(model.c * bj);
  inst.x = x;
  inst.y_ref_next = y_ref_next;
  return inst;
}

Matrix regressor(const TrackingInstance& inst, const Vector& u) {
  require_dim(u.size() == inst.input_dim(), "regressor: control size");
  const auto l = inst.output_dim();
  Matrix g(l, inst.theta_dim());
  Eigen::Index col = 0;
  for (const auto& vi : inst.v) g.col(col++) = vi * inst.x;
  for (const auto& wj : inst.w) g.col(col++) = wj * u;
  return g;
}

Vector tracking_error(const TrackingInstance& inst, const Vector& u, const Vector& theta,
                      const Vector& upsilon) {
  require_dim(theta.size() == inst.theta_dim(), "tracking_error: theta size");
  require_dim(upsilon.size() == inst.output_dim(), "tracking_error: noise size");
  return inst.f + inst.b0 * u + regressor(inst, u) * theta + upsilon;
}

ErrorInterval worst_case_interval(const TrackingInstance& inst, const Ellipsoid& theta_set,
                                  const Matrix& q, const Vector& u) {
  require_dim(theta_set.dim() == inst.theta_dim(), "worst_case_interval: belief size");
  require_dim(q.rows() == inst.output_dim() && q.cols() == inst.output_dim(),
              "worst_case_interval: Q size");
  const Matrix g = regressor(inst, u);
  const Vector mid = inst.f + inst.b0 * u + g * theta_set.center();
  ErrorInterval out{mid, mid};
  for (Eigen::Index t = 0; t < mid.size(); ++t) {
    const double spread = g.row(t).dot(theta_set.shape() * g.row(t).transpose());
    const double rad = std::sqrt(std::max(spread, 0.0)) + std::sqrt(std::max(q(t, t), 0.0));
    out.lo(t) -= rad;
    out.hi(t) += rad;
  }
  return out;
}

socp::Problem robust_problem(const TrackingInstance& inst, const Ellipsoid& theta_set,
                             const Matrix& q, const ControlBounds& bounds) {
  const auto l = inst.output_dim();
  const auto m = inst.input_dim();
  const auto r = static_cast<Eigen::Index>(inst.v.size());
  const auto s = static_cast<Eigen::Index>(inst.w.size());
  require_dim(theta_set.dim() == r + s, "solve_robust: belief size");
  require_dim(q.rows() == l && q.cols() == l, "solve_robust: Q size");
  require_dim(bounds.u_min.size() == m && bounds.u_max.size() == m, "solve_robust: bounds size");

  const Matrix root = psd_sqrt(theta_set.shape());
  const Vector& center = theta_set.center();

  socp::Problem p;
  p.c.resize(l);
  p.a.resize(l, m);
  p.q.resize(l);
  p.lo = bounds.u_min;
  p.hi = bounds.u_max;
  for (Eigen::Index t = 0; t < l; ++t) {
    // g^{(t)}(u) = g0 + G u
    Vector g0 = Vector::Zero(r + s);
    Matrix gu = Matrix::Zero(r + s, m);
    for (Eigen::Index i = 0; i < r; ++i) g0(i) = inst.v[static_cast<std::size_t>(i)].row(t).dot(inst.x);
    for (Eigen::Index j = 0; j < s; ++j) gu.row(r + j) = inst.w[static_cast<std::size_t>(j)].row(t);
    p.c(t) = inst.f(t) + g0.dot(center);
    p.a.row(t) = inst.b0.row(t) + (gu.transpose() * center).transpose();
    p.f.push_back(root * gu);
    p.h.push_back(root * g0);
    p.q(t) = std::sqrt(std::max(q(t, t), 0.0));
  }
  return p;
}

RobustSolution solve_robust(const TrackingInstance& inst, const Ellipsoid& theta_set,
                            const Matrix& q, const ControlBounds& bounds) {
  const socp::Problem p = robust_problem(inst, theta_set, q, bounds);
  const socp::Result res = socp::solve(p);
  RobustSolution out;
  out.u = res.u;
  out.status = res.status;
  out.iterations = res.iterations;
  if (res.status == socp::Status::Infeasible) {
    out.z = Vector::Constant(inst.output_dim(), std::numeric_limits<double>::infinity());
    out.objective = std::numeric_limits<double>::infinity();
    return out;
  }
  const ErrorInterval iv = worst_case_interval(inst, theta_set, q, out.u);
  out.z = iv.lo.cwiseAbs().cwiseMax(iv.hi.cwiseAbs());
  out.objective = out.z.sum();
  return out;
}

RobustSolution solve_known_theta(const TrackingInstance& inst, const Vector& theta_true,
                                 const Matrix& q, const ControlBounds& bounds) {
  require_dim(theta_true.size() == inst.theta_dim(), "solve_known_theta: theta size");
  const Ellipsoid point(theta_true, Matrix::Zero(theta_true.size(), theta_true.size()));
  return solve_robust(inst, point, q, bounds);
}

}  // namespace ellctl
