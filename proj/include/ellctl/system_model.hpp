#pragma once

#include <vector>

#include "ellctl/ellipsoid.hpp"

namespace ellctl {

/// x(k+1) = A(theta) x(k) + B(theta) u(k) + w(k),  y = C x,  w in E(R, 0),
/// with A = A0 + sum_i A_i theta_i (i < r) and B = B0 + sum_j B_j theta_{r+j}.
struct AffineUncertainModel {
  Matrix a0;
  std::vector<Matrix> a_perturbations;
  Matrix b0;
  std::vector<Matrix> b_perturbations;
  Matrix c;
  Matrix disturbance_shape;  // R, n x n

  Eigen::Index state_dim() const { return a0.rows(); }
  Eigen::Index input_dim() const { return b0.cols(); }
  Eigen::Index output_dim() const { return c.rows(); }
  Eigen::Index num_alpha() const { return static_cast<Eigen::Index>(a_perturbations.size()); }
  Eigen::Index num_beta() const { return static_cast<Eigen::Index>(b_perturbations.size()); }
  Eigen::Index theta_dim() const { return num_alpha() + num_beta(); }

  /// Throws DimensionError / std::invalid_argument when inconsistent.
  void validate() const;

  /// E(R, 0) as an ellipsoid value.
  Ellipsoid disturbance_set() const;
  /// Q = C R C^T, the output-noise shape.
  Matrix output_noise_shape() const;
};

struct Dynamics {
  Matrix a;
  Matrix b;
};

Dynamics assemble_dynamics(const AffineUncertainModel& model, const Vector& theta);

struct StepResult {
  Vector x_next;
  Vector y_next;
};

StepResult step(const AffineUncertainModel& model, const Vector& x, const Vector& u,
                const Vector& theta_true, const Vector& omega);

/// exp(M) by scaling and squaring of a truncated Taylor series.
Matrix expm(const Matrix& m);

/// Zero-order-hold sampling via exp([[Ac, Bc], [0, 0]] dt).
Dynamics zoh_discretize(const Matrix& ac, const Matrix& bc, double dt);

/// First-order (forward Euler) sampling: I + Ac dt, Bc dt.
Dynamics euler_discretize(const Matrix& ac, const Matrix& bc, double dt);

}  // namespace ellctl
