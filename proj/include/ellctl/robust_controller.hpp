#pragma once

#include <vector>

#include "ellctl/estimator.hpp"
#include "ellctl/socp.hpp"
#include "ellctl/system_model.hpp"

namespace ellctl {

/// Next-step tracking error e = f + b0 u + sum_i g_i theta_i + upsilon,
/// with g_i = V_i x (i < r) and g_{r+j} = W_j u.
struct TrackingInstance {
  Vector f;               // C A0 x - y_ref_next
  Matrix b0;              // C B0
  std::vector<Matrix> v;  // C A_i
  std::vector<Matrix> w;  // C B_j
  Vector x;
  Vector y_ref_next;

  Eigen::Index output_dim() const { return f.size(); }
  Eigen::Index input_dim() const { return b0.cols(); }
  Eigen::Index theta_dim() const {
    return static_cast<Eigen::Index>(v.size() + w.size());
  }
};

struct ControlBounds {
  Vector u_min;
  Vector u_max;

  static ControlBounds unbounded(Eigen::Index m);
};

using SolverStatus = socp::Status;

struct RobustSolution {
  Vector u;
  Vector z;  // per-output worst-case |e_t|
  double objective = 0.0;
  SolverStatus status = SolverStatus::Optimal;
  int iterations = 0;
};

struct ErrorInterval {
  Vector lo;
  Vector hi;
};

TrackingInstance build_instance(const AffineUncertainModel& model, const Vector& x,
                                const Vector& y_ref_next);

/// Row t is g^{(t)}(u) = [V_i^{(t)} x ..., W_j^{(t)} u ...].
Matrix regressor(const TrackingInstance& inst, const Vector& u);

/// Error for a specific parameter and output disturbance.
Vector tracking_error(const TrackingInstance& inst, const Vector& u, const Vector& theta,
                      const Vector& upsilon);

/// Per-output range of e over theta in the set and upsilon_t in [-sqrt(Q_tt), sqrt(Q_tt)].
ErrorInterval worst_case_interval(const TrackingInstance& inst, const Ellipsoid& theta_set,
                                  const Matrix& q, const Vector& u);

/// The cone program whose optimum is min_u sum_t max(|lo_t|, |hi_t|).
socp::Problem robust_problem(const TrackingInstance& inst, const Ellipsoid& theta_set,
                             const Matrix& q, const ControlBounds& bounds);

RobustSolution solve_robust(const TrackingInstance& inst, const Ellipsoid& theta_set,
                            const Matrix& q, const ControlBounds& bounds);

inline RobustSolution solve_robust(const TrackingInstance& inst, const ParameterBelief& belief,
                                   const Matrix& q, const ControlBounds& bounds) {
  return solve_robust(inst, belief.set, q, bounds);
}

/// Robust control against a point belief at theta_true; only the disturbance
/// stays uncertain.
RobustSolution solve_known_theta(const TrackingInstance& inst, const Vector& theta_true,
                                 const Matrix& q, const ControlBounds& bounds);

}  // namespace ellctl
