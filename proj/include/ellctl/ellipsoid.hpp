#pragma once

#include <Eigen/Dense>
#include <random>

namespace ellctl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Rng = std::mt19937_64;

/// E(P, a) = { x : (x - a)^T P^{-1} (x - a) <= 1 }.
///
/// The shape may be rank deficient; a singular shape describes a flat set
/// living in center + range(P). Values are immutable once built.
class Ellipsoid {
 public:
  /// Throws DimensionError on size mismatch and std::invalid_argument when the
  /// shape is not symmetric (1e-10) or not PSD (min eig < -1e-9 (1 + trace)).
  Ellipsoid(Vector center, Matrix shape);

  static Ellipsoid ball(Eigen::Index dim, double radius = 1.0);

  const Vector& center() const noexcept { return center_; }
  const Matrix& shape() const noexcept { return shape_; }
  Eigen::Index dim() const noexcept { return center_.size(); }

 private:
  Vector center_;
  Matrix shape_;
};

enum class Sense { Min, Max };

/// Membership with a pseudo-inverse reading for singular shapes.
bool contains(const Ellipsoid& e, const Vector& x, double tol = 1e-9);

/// Support value of eta over e: eta^T a -/+ sqrt(eta^T P eta).
double support(const Ellipsoid& e, const Vector& eta, Sense sense);

struct SumBound {
  Ellipsoid set;
  double tau;
};

/// Root tau > 0 of sum_i 1/(lambda_i + tau) = n / (tau (tau + 1)), lambda_i the
/// eigenvalues of Pa Pb^{-1}. Pb must be positive definite.
double optimal_tau(const Matrix& pa, const Matrix& pb);

/// Minimum-volume outer bound of the Minkowski sum ea (+) eb.
SumBound minkowski_sum_bound(const Ellipsoid& ea, const Ellipsoid& eb);

struct FusionBound {
  Ellipsoid set;
  double beta;
};

/// Outer bound of ea ∩ eb for the given rho >= 0. rho = 0 returns ea.
/// Throws InconsistentSetsError when beta(rho) <= 0.
FusionBound intersection_bound(const Ellipsoid& ea, const Ellipsoid& eb, double rho);

/// Volume-minimizing rho for intersection_bound. Returns 0 when the
/// stationarity equation has no root in the bracket. Throws
/// InconsistentSetsError if beta(rho) <= 0 is met during the search, which
/// certifies an empty intersection.
double optimal_rho(const Ellipsoid& ea, const Ellipsoid& eb);

struct VolumeMeasures {
  double trace;
  double log_det;  // -inf for a singular shape
};

VolumeMeasures volume_measures(const Ellipsoid& e);

/// Uniform draw from the solid ellipsoid.
Vector sample_interior(const Ellipsoid& e, Rng& rng);

/// Uniform draw from the boundary surface of the unit sphere mapped onto e
/// (not uniform in surface measure for non-spherical shapes).
Vector sample_boundary(const Ellipsoid& e, Rng& rng);

/// (P + P^T) / 2 with negative eigenvalues clipped to zero.
Matrix repair_psd(const Matrix& p);

/// Symmetric factor S with S S^T = P (negative eigenvalues treated as zero).
Matrix psd_sqrt(const Matrix& p);

}  // namespace ellctl
