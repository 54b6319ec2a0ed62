#pragma once

#include "ellctl/ellipsoid.hpp"
#include "ellctl/errors.hpp"
#include "ellctl/system_model.hpp"

namespace ellctl {

/// The current parameter ellipsoid plus diagnostics of the update that
/// produced it.
struct ParameterBelief {
  Ellipsoid set;
  double last_rho = 0.0;
  double last_beta = 1.0;
  Vector last_innovation;
  bool skipped = false;  // set when an inconsistent observation was dropped

  explicit ParameterBelief(Ellipsoid s) : set(std::move(s)) {}
};

/// H = phi theta + upsilon, upsilon in E(Q, 0).
struct Observation {
  Vector h;
  Matrix phi;  // l x (r + s)
  Matrix q;
};

/// beta(rho) <= 0: the observation contradicts the prior (true theta outside
/// the prior, or the disturbance bound was violated).
class InconsistentObservationError : public InconsistentSetsError {
 public:
  using InconsistentSetsError::InconsistentSetsError;
};

enum class InconsistencyPolicy { Raise, SkipUpdate };

Observation build_observation(const AffineUncertainModel& model, const Vector& x,
                              const Vector& u, const Vector& y_next);

/// Q + 1e-12 trace(Q)/l I.
Matrix regularized_noise(const Matrix& q);

/// Volume-minimizing fusion weight; 0 when the stationarity equation has no
/// root (including the closed-form no-solution case).
double choose_rho(const ParameterBelief& belief, const Observation& obs);

/// Gain-form fusion of the prior with the observation slab at a given rho.
ParameterBelief update_with_rho(const ParameterBelief& belief, const Observation& obs,
                                double rho);

/// choose_rho followed by update_with_rho.
ParameterBelief update(const ParameterBelief& belief, const Observation& obs,
                       InconsistencyPolicy policy = InconsistencyPolicy::Raise);

/// Outer bound E(P_eps, 0) on the innovation H - phi theta_hat.
Ellipsoid innovation_ellipsoid(const ParameterBelief& belief, const Observation& obs);

}  // namespace ellctl
