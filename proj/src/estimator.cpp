#include "ellctl/estimator.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "ellctl/scalar_roots.hpp"

namespace ellctl {

namespace {

constexpr double kRhoLo = 1e-10;
constexpr double kRhoHi = 1e8;
constexpr int kScanPoints = 200;

void check_dims(const ParameterBelief& belief, const Observation& obs) {
  const auto d = belief.set.dim();
  const auto l = obs.h.size();
  require_dim(obs.phi.rows() == l && obs.phi.cols() == d, "observation phi has wrong shape");
  require_dim(obs.q.rows() == l && obs.q.cols() == l, "observation Q has wrong shape");
}

class Fusion {
 public:
  Fusion(const ParameterBelief& belief, const Observation& obs)
      : p_(belief.set.shape()),
        phi_(obs.phi),
        q_(regularized_noise(obs.q)),
        eps_(obs.h - obs.phi * belief.set.center()),
        s_(obs.phi * belief.set.shape() * obs.phi.transpose()) {}

  struct Terms {
    double beta;
    double beta_prime;
    double trace_term;
  };

  // T = Q + rho phi P phi^T is PD for every rho >= 0.
  Terms terms(double rho) const {
    const Eigen::LLT<Matrix> llt(q_ + rho * s_);
    if (llt.info() != Eigen::Success) throw NumericError("estimator: Q + rho phi P phi^T singular");
    const Vector te = llt.solve(eps_);
    return {1.0 + rho - rho * eps_.dot(te), 1.0 - te.dot(q_ * te), llt.solve(s_).trace()};
  }

  // d/drho of -log det(posterior shape) up to sign: > 0 while shrinking.
  double defect(double rho) const {
    const Terms t = terms(rho);
    if (t.beta < -1e-12 * (1.0 + rho)) {
      throw InconsistentObservationError("estimator: beta(" + std::to_string(rho) +
                                         ") = " + std::to_string(t.beta) + " <= 0");
    }
    const double beta = std::max(t.beta, std::numeric_limits<double>::min());
    const double n = static_cast<double>(p_.rows());
    return t.trace_term - n * t.beta_prime / beta;
  }

  const Matrix& p() const { return p_; }
  const Matrix& phi() const { return phi_; }
  const Matrix& q() const { return q_; }
  const Vector& eps() const { return eps_; }
  const Matrix& s() const { return s_; }

 private:
  Matrix p_;
  Matrix phi_;
  Matrix q_;
  Vector eps_;
  Matrix s_;
};

}  // namespace

Observation build_observation(const AffineUncertainModel& model, const Vector& x,
                              const Vector& u, const Vector& y_next) {
  require_dim(x.size() == model.state_dim(), "build_observation: state dimension");
  require_dim(u.size() == model.input_dim(), "build_observation: input dimension");
  require_dim(y_next.size() == model.output_dim(), "build_observation: output dimension");
  Observation obs;
  obs.h = y_next - model.c * model.a0 * x - model.c * model.b0 * u;
  const auto r = model.num_alpha();
  obs.phi.resize(model.output_dim(), model.theta_dim());
  for (Eigen::Index i = 0; i < r; ++i) {
    obs.phi.col(i) = model.c * model.a_perturbations[static_cast<std::size_t>(i)] * x;
  }
  for (Eigen::Index j = 0; j < model.num_beta(); ++j) {
    obs.phi.col(r + j) = model.c * model.b_perturbations[static_cast<std::size_t>(j)] * u;
  }
  obs.q = model.output_noise_shape();
  return obs;
}

Matrix regularized_noise(const Matrix& q) {
  const auto l = q.rows();
  if (l == 0) return q;
  double eps = 1e-12 * q.trace() / static_cast<double>(l);
  if (!(eps > 0.0)) eps = 1e-12;
  return 0.5 * (q + q.transpose()) + eps * Matrix::Identity(l, l);
}

double choose_rho(const ParameterBelief& belief, const Observation& obs) {
  check_dims(belief, obs);
  const Fusion fusion(belief, obs);
  // Closed-form no-solution case: n (1 - eps^T Q^-1 eps) - tr(P phi^T Q^-1 phi) > 0.
  const double d0 = fusion.defect(0.0);
  if (d0 <= 0.0) return 0.0;

  std::vector<double> grid{0.0};
  const auto tail = roots::logspace(kRhoLo, kRhoHi, kScanPoints);
  grid.insert(grid.end(), tail.begin(), tail.end());
  auto f = [&](double rho) { return fusion.defect(rho); };
  const auto bracket = roots::first_downcrossing(f, grid);
  if (!bracket) return 0.0;
  return roots::bisect(f, bracket->first, bracket->second, 1e-10);
}

ParameterBelief update_with_rho(const ParameterBelief& belief, const Observation& obs,
                                double rho) {
  check_dims(belief, obs);
  if (!(rho >= 0.0)) throw std::invalid_argument("update_with_rho: rho must be >= 0");
  const Fusion fusion(belief, obs);
  ParameterBelief out(belief.set);
  out.last_innovation = fusion.eps();
  out.last_rho = rho;
  out.last_beta = 1.0;
  if (rho == 0.0) return out;

  const Eigen::LLT<Matrix> llt(fusion.q() + rho * fusion.s());
  if (llt.info() != Eigen::Success) throw NumericError("estimator: gain matrix singular");
  const Vector te = llt.solve(fusion.eps());
  double beta = 1.0 + rho - rho * fusion.eps().dot(te);
  if (beta < -1e-12 * (1.0 + rho)) {
    throw InconsistentObservationError("estimator: beta(" + std::to_string(rho) +
                                       ") = " + std::to_string(beta) + " <= 0");
  }
  beta = std::max(beta, 0.0);

  const Matrix& p = fusion.p();
  const Matrix& phi = fusion.phi();
  // K = P phi^T (phi P phi^T + Q/rho)^{-1} = rho P phi^T T^{-1}
  const Matrix t_inv_phi_p = llt.solve(phi * p);
  const Matrix gain = rho * t_inv_phi_p.transpose();
  const auto d = p.rows();
  const Matrix i_kphi = Matrix::Identity(d, d) - gain * phi;
  // Q-term: rho^{-1} K Q K^T = rho (T^{-1} phi P)^T Q (T^{-1} phi P)
  const Matrix shape = beta * (i_kphi * p * i_kphi.transpose() +
                               rho * t_inv_phi_p.transpose() * fusion.q() * t_inv_phi_p);
  out.set = Ellipsoid(belief.set.center() + gain * fusion.eps(), repair_psd(shape));
  out.last_beta = beta;
  return out;
}

ParameterBelief update(const ParameterBelief& belief, const Observation& obs,
                       InconsistencyPolicy policy) {
  try {
    return update_with_rho(belief, obs, choose_rho(belief, obs));
  } catch (const InconsistentObservationError&) {
    if (policy == InconsistencyPolicy::Raise) throw;
    ParameterBelief out(belief.set);
    out.last_innovation = obs.h - obs.phi * belief.set.center();
    out.skipped = true;
    return out;
  }
}

Ellipsoid innovation_ellipsoid(const ParameterBelief& belief, const Observation& obs) {
  check_dims(belief, obs);
  const Matrix q = regularized_noise(obs.q);
  Matrix s = obs.phi * belief.set.shape() * obs.phi.transpose();
  s = 0.5 * (s + s.transpose());
  double tau = 1.0;
  try {
    tau = optimal_tau(s, q);
  } catch (const RootFindError&) {
    tau = 1.0;
  } catch (const DegenerateOperandError&) {
    tau = 1.0;
  }
  const Matrix shape = (1.0 / tau + 1.0) * s + (tau + 1.0) * q;
  return Ellipsoid(Vector::Zero(obs.h.size()), repair_psd(shape));
}

}  // namespace ellctl
