#include "ellctl/system_model.hpp"

#include <cmath>
#include <stdexcept>

#include "ellctl/errors.hpp"

namespace ellctl {

void AffineUncertainModel::validate() const {
  const auto n = state_dim();
  const auto m = input_dim();
  require_dim(a0.cols() == n, "A0 must be square");
  require_dim(b0.rows() == n, "B0 row count must equal state dimension");
  require_dim(c.cols() == n, "C column count must equal state dimension");
  require_dim(disturbance_shape.rows() == n && disturbance_shape.cols() == n,
              "R must be n x n");
  for (const auto& ai : a_perturbations) {
    require_dim(ai.rows() == n && ai.cols() == n, "A_i must match A0");
  }
  for (const auto& bj : b_perturbations) {
    require_dim(bj.rows() == n && bj.cols() == m, "B_j must match B0");
  }
  // Ellipsoid checks symmetry and PSD-ness of R.
  (void)disturbance_set();
}

Ellipsoid AffineUncertainModel::disturbance_set() const {
  return Ellipsoid(Vector::Zero(state_dim()), disturbance_shape);
}

Matrix AffineUncertainModel::output_noise_shape() const {
  Matrix q = c * disturbance_shape * c.transpose();
  return 0.5 * (q + q.transpose());
}

Dynamics assemble_dynamics(const AffineUncertainModel& model, const Vector& theta) {
  require_dim(theta.size() == model.theta_dim(), "theta dimension mismatch");
  Dynamics out{model.a0, model.b0};
  const auto r = model.num_alpha();
  for (Eigen::Index i = 0; i < r; ++i) {
    out.a += theta(i) * model.a_perturbations[static_cast<std::size_t>(i)];
  }
  for (Eigen::Index j = 0; j < model.num_beta(); ++j) {
    out.b += theta(r + j) * model.b_perturbations[static_cast<std::size_t>(j)];
  }
  return out;
}

StepResult step(const AffineUncertainModel& model, const Vector& x, const Vector& u,
                const Vector& theta_true, const Vector& omega) {
  require_dim(x.size() == model.state_dim(), "step: state dimension mismatch");
  require_dim(u.size() == model.input_dim(), "step: input dimension mismatch");
  require_dim(omega.size() == model.state_dim(), "step: disturbance dimension mismatch");
  const Dynamics dyn = assemble_dynamics(model, theta_true);
  StepResult out;
  out.x_next = dyn.a * x + dyn.b * u + omega;
  out.y_next = model.c * out.x_next;
  return out;
}

Matrix expm(const Matrix& m) {
  require_dim(m.rows() == m.cols(), "expm: matrix must be square");
  const auto n = m.rows();
  if (n == 0) return m;
  const double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Matrix scaled = m / std::ldexp(1.0, squarings);

  // ||scaled|| <= 1/2, so 20 terms leave a remainder far below 1e-16.
  Matrix sum = Matrix::Identity(n, n);
  Matrix term = Matrix::Identity(n, n);
  for (int k = 1; k <= 30; ++k) {
    term = term * scaled / static_cast<double>(k);
    sum += term;
    if (term.cwiseAbs().maxCoeff() <= 1e-18 * sum.cwiseAbs().maxCoeff()) break;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

Dynamics zoh_discretize(const Matrix& ac, const Matrix& bc, double dt) {
  require_dim(ac.rows() == ac.cols() && bc.rows() == ac.rows(),
              "zoh_discretize: dimension mismatch");
  if (!(dt > 0.0)) throw std::invalid_argument("zoh_discretize: dt must be positive");
  const auto n = ac.rows();
  const auto m = bc.cols();
  Matrix aug = Matrix::Zero(n + m, n + m);
  aug.topLeftCorner(n, n) = ac * dt;
  aug.topRightCorner(n, m) = bc * dt;
  const Matrix phi = expm(aug);
  return {phi.topLeftCorner(n, n), phi.topRightCorner(n, m)};
}

Dynamics euler_discretize(const Matrix& ac, const Matrix& bc, double dt) {
  require_dim(ac.rows() == ac.cols() && bc.rows() == ac.rows(),
              "euler_discretize: dimension mismatch");
  if (!(dt > 0.0)) throw std::invalid_argument("euler_discretize: dt must be positive");
  return {Matrix::Identity(ac.rows(), ac.cols()) + ac * dt, bc * dt};
}

}  // namespace ellctl
