#include "ellctl/ellipsoid.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <vector>
#include <string>

#include "ellctl/errors.hpp"
#include "ellctl/scalar_roots.hpp"

namespace ellctl {

namespace {

constexpr double kSymTol = 1e-10;
constexpr double kPsdTol = 1e-9;

// Scan grid and bracket for the fusion parameter.
constexpr double kRhoMin = 1e-10;
constexpr double kRhoMax = 1e9;
constexpr int kRhoGrid = 200;

Eigen::SelfAdjointEigenSolver<Matrix> eig(const Matrix& p) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (p + p.transpose()));
}

// Quantities of the intersection bound written through T = rho Pa + Pb so
// that rho = 0 needs no special casing.
struct FusionTerms {
  double beta;
  double beta_prime;
  double trace_term;  // sum_i lambda_i / (1 + rho lambda_i)
};

std::optional<FusionTerms> fusion_terms(const Matrix& pa, const Matrix& pb,
                                        const Vector& delta, double rho) {
  const Matrix t = rho * pa + pb;
  Eigen::LDLT<Matrix> ldlt(t);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return std::nullopt;
  const Vector td = ldlt.solve(delta);
  if (!td.allFinite()) return std::nullopt;
  FusionTerms out{};
  out.beta = 1.0 + rho - rho * delta.dot(td);
  out.beta_prime = 1.0 - td.dot(pb * td);
  out.trace_term = ldlt.solve(pa).trace();
  return out;
}

}  // namespace

Ellipsoid::Ellipsoid(Vector center, Matrix shape)
    : center_(std::move(center)), shape_(std::move(shape)) {
  require_dim(shape_.rows() == shape_.cols(), "ellipsoid shape must be square");
  require_dim(shape_.rows() == center_.size(), "ellipsoid center/shape size mismatch");
  if (!center_.allFinite() || !shape_.allFinite()) {
    throw std::invalid_argument("ellipsoid has non-finite entries");
  }
  if (shape_.size() == 0) return;
  const double asym = (shape_ - shape_.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymTol) {
    throw std::invalid_argument("ellipsoid shape not symmetric (max asym " +
                                std::to_string(asym) + ")");
  }
  shape_ = 0.5 * (shape_ + shape_.transpose());
  const double min_eig = eig(shape_).eigenvalues().minCoeff();
  if (min_eig < -kPsdTol * (1.0 + std::abs(shape_.trace()))) {
    throw std::invalid_argument("ellipsoid shape not PSD (min eigenvalue " +
                                std::to_string(min_eig) + ")");
  }
}

Ellipsoid Ellipsoid::ball(Eigen::Index dim, double radius) {
  return Ellipsoid(Vector::Zero(dim), radius * radius * Matrix::Identity(dim, dim));
}

bool contains(const Ellipsoid& e, const Vector& x, double tol) {
  require_dim(x.size() == e.dim(), "contains: dimension mismatch");
  if (e.dim() == 0) return true;
  const Vector d = x - e.center();
  // Eigen-directions with negligible extent are floored at `cut`; a zero
  // shape only contains its center.
  const auto es = eig(e.shape());
  const Vector& lam = es.eigenvalues();
  const double cut = 1e-12 * std::max(lam.maxCoeff(), 0.0);
  const Vector proj = es.eigenvectors().transpose() * d;
  const double scale = 1.0 + e.center().norm();
  double q = 0.0;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (cut > 0.0) {
      q += proj(i) * proj(i) / std::max(lam(i), cut);
    } else if (std::abs(proj(i)) > tol * scale) {
      return false;
    }
  }
  return q <= 1.0 + tol;
}

double support(const Ellipsoid& e, const Vector& eta, Sense sense) {
  require_dim(eta.size() == e.dim(), "support: dimension mismatch");
  const double spread = std::sqrt(std::max(eta.dot(e.shape() * eta), 0.0));
  const double mid = eta.dot(e.center());
  return sense == Sense::Max ? mid + spread : mid - spread;
}

double optimal_tau(const Matrix& pa, const Matrix& pb) {
  require_dim(pa.rows() == pb.rows() && pa.cols() == pb.cols(),
              "optimal_tau: dimension mismatch");
  Eigen::LLT<Matrix> llt(pb);
  if (llt.info() != Eigen::Success) {
    throw DegenerateOperandError("minkowski bound: second shape not positive definite");
  }
  // Eigenvalues of Pa Pb^{-1} equal those of the pencil (Pa, Pb).
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(
      0.5 * (pa + pa.transpose()), 0.5 * (pb + pb.transpose()));
  if (ges.info() != Eigen::Success) {
    throw DegenerateOperandError("minkowski bound: eigen solve failed");
  }
  const Vector lam = ges.eigenvalues().cwiseMax(0.0);
  const double n = static_cast<double>(lam.size());
  // tau (tau + 1) * sum 1/(lambda + tau) - n has the sign of the defect.
  auto h = [&](double tau) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) s += 1.0 / (lam(i) + tau);
    return tau * (tau + 1.0) * s - n;
  };
  return roots::bisect_log(h, 1e-12, 1e12, 1e-10);
}

SumBound minkowski_sum_bound(const Ellipsoid& ea, const Ellipsoid& eb) {
  require_dim(ea.dim() == eb.dim(), "minkowski_sum_bound: dimension mismatch");
  const double tau = optimal_tau(ea.shape(), eb.shape());
  Matrix pc = (1.0 / tau + 1.0) * ea.shape() + (tau + 1.0) * eb.shape();
  return {Ellipsoid(ea.center() + eb.center(), repair_psd(pc)), tau};
}

FusionBound intersection_bound(const Ellipsoid& ea, const Ellipsoid& eb, double rho) {
  require_dim(ea.dim() == eb.dim(), "intersection_bound: dimension mismatch");
  if (!(rho >= 0.0)) throw std::invalid_argument("intersection_bound: rho must be >= 0");
  if (rho == 0.0) return {ea, 1.0};

  const Matrix& pa = ea.shape();
  const Matrix& pb = eb.shape();
  const Vector delta = eb.center() - ea.center();
  const Matrix t = rho * pa + pb;
  Eigen::LDLT<Matrix> ldlt(t);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw NumericError("intersection_bound: rho Pa + Pb is singular");
  }
  // L = Pa (Pa + Pb/rho)^{-1} = rho Pa T^{-1}
  const Matrix gain = rho * ldlt.solve(pa).transpose();
  const Vector td = ldlt.solve(delta);
  double beta = 1.0 + rho - rho * delta.dot(td);
  if (beta < -1e-12 * (1.0 + rho)) {
    throw InconsistentSetsError("intersection_bound: beta(rho) = " +
                                std::to_string(beta) + " <= 0");
  }
  beta = std::max(beta, 0.0);
  const Eigen::Index n = ea.dim();
  const Matrix i_minus_l = Matrix::Identity(n, n) - gain;
  const Matrix core = i_minus_l * pa * i_minus_l.transpose() +
                      (1.0 / rho) * gain * pb * gain.transpose();
  return {Ellipsoid(ea.center() + gain * delta, repair_psd(beta * core)), beta};
}

double optimal_rho(const Ellipsoid& ea, const Ellipsoid& eb) {
  require_dim(ea.dim() == eb.dim(), "optimal_rho: dimension mismatch");
  const Matrix& pa = ea.shape();
  const Matrix& pb = eb.shape();
  const Vector delta = eb.center() - ea.center();
  const double n = static_cast<double>(ea.dim());
  if (n == 0) return 0.0;

  bool inconsistent = false;
  // Derivative of -log det of the fused shape; positive means the volume is
  // still shrinking as rho grows.
  auto defect = [&](double rho) {
    const auto terms = fusion_terms(pa, pb, delta, rho);
    if (!terms) return std::numeric_limits<double>::quiet_NaN();
    if (terms->beta < -1e-12 * (1.0 + rho)) {
      inconsistent = true;
      return -1.0;
    }
    const double beta = std::max(terms->beta, std::numeric_limits<double>::min());
    return terms->trace_term - n * terms->beta_prime / beta;
  };

  const double d0 = defect(0.0);
  if (!std::isfinite(d0) || d0 <= 0.0) return 0.0;

  std::vector<double> grid{0.0};
  const auto tail = roots::logspace(kRhoMin, kRhoMax, kRhoGrid);
  grid.insert(grid.end(), tail.begin(), tail.end());
  const auto bracket = roots::first_downcrossing(
      [&](double rho) {
        const double d = defect(rho);
        return std::isfinite(d) ? d : 1.0;
      },
      grid);
  if (inconsistent) {
    throw InconsistentSetsError("optimal_rho: beta(rho) <= 0, sets do not intersect");
  }
  if (!bracket) return 0.0;
  auto [lo, hi] = *bracket;
  return roots::bisect(defect, lo, hi, 1e-10);
}

VolumeMeasures volume_measures(const Ellipsoid& e) {
  VolumeMeasures out{e.shape().trace(), 0.0};
  if (e.dim() == 0) return out;
  const Vector lam = eig(e.shape()).eigenvalues();
  if (lam.minCoeff() <= 0.0) {
    out.log_det = -std::numeric_limits<double>::infinity();
  } else {
    out.log_det = lam.array().log().sum();
  }
  return out;
}

namespace {

Vector unit_direction(Eigen::Index d, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(d);
  double norm = 0.0;
  do {
    for (Eigen::Index i = 0; i < d; ++i) v(i) = normal(rng);
    norm = v.norm();
  } while (norm == 0.0);
  return v / norm;
}

}  // namespace

Vector sample_interior(const Ellipsoid& e, Rng& rng) {
  const Eigen::Index d = e.dim();
  if (d == 0) return e.center();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const Vector dir = unit_direction(d, rng);
  const double radius = std::pow(unif(rng), 1.0 / static_cast<double>(d));
  Vector x = e.center() + psd_sqrt(e.shape()) * (radius * dir);
  return x;
}

Vector sample_boundary(const Ellipsoid& e, Rng& rng) {
  const Eigen::Index d = e.dim();
  if (d == 0) return e.center();
  return e.center() + psd_sqrt(e.shape()) * unit_direction(d, rng);
}

Matrix repair_psd(const Matrix& p) {
  if (p.size() == 0) return p;
  const Matrix sym = 0.5 * (p + p.transpose());
  const auto es = eig(sym);
  if (es.eigenvalues().minCoeff() >= 0.0) return sym;
  const Vector lam = es.eigenvalues().cwiseMax(0.0);
  Matrix out = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

Matrix psd_sqrt(const Matrix& p) {
  if (p.size() == 0) return p;
  const auto es = eig(p);
  const Vector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace ellctl
