// Independent reference computations used only by the tests: grids, brute
// force and direct formula evaluation. Nothing here calls the solvers under test.
#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include <Eigen/Dense>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Minimum of f on [lo, hi]: coarse grid, then a fine grid around the best cell.
inline double grid_min_1d(const std::function<double(double)>& f, double lo, double hi,
                          int coarse = 4001, int fine = 4001) {
  double best = std::numeric_limits<double>::infinity();
  double arg = lo;
  const double h = (hi - lo) / (coarse - 1);
  for (int i = 0; i < coarse; ++i) {
    const double x = lo + h * i;
    const double v = f(x);
    if (v < best) {
      best = v;
      arg = x;
    }
  }
  const double a = std::max(lo, arg - h);
  const double b = std::min(hi, arg + h);
  for (int i = 0; i < fine; ++i) {
    const double x = a + (b - a) * i / (fine - 1);
    best = std::min(best, f(x));
  }
  return best;
}

/// Minimum of f over a box in R^2 with the same two-stage refinement.
inline double grid_min_2d(const std::function<double(double, double)>& f, double lo0, double hi0,
                          double lo1, double hi1, int coarse = 401, int fine = 201) {
  double best = std::numeric_limits<double>::infinity();
  double a0 = lo0;
  double a1 = lo1;
  const double h0 = (hi0 - lo0) / (coarse - 1);
  const double h1 = (hi1 - lo1) / (coarse - 1);
  for (int i = 0; i < coarse; ++i) {
    for (int j = 0; j < coarse; ++j) {
      const double v = f(lo0 + h0 * i, lo1 + h1 * j);
      if (v < best) {
        best = v;
        a0 = lo0 + h0 * i;
        a1 = lo1 + h1 * j;
      }
    }
  }
  const double b0 = std::max(lo0, a0 - 2 * h0);
  const double e0 = std::min(hi0, a0 + 2 * h0);
  const double b1 = std::max(lo1, a1 - 2 * h1);
  const double e1 = std::min(hi1, a1 + 2 * h1);
  for (int i = 0; i < fine; ++i) {
    for (int j = 0; j < fine; ++j) {
      best = std::min(best, f(b0 + (e0 - b0) * i / (fine - 1), b1 + (e1 - b1) * j / (fine - 1)));
    }
  }
  return best;
}

/// Maximum of g(u) = u'Au + b'u over {u : (u-c)' S^{-1} (u-c) <= 1} ∩ [lo, hi]
/// for u in R^1 or R^2, by dense sampling of the whitened disk plus a local refine.
inline double grid_max_trust_region(const Mat& a, const Vec& b, const Vec& c, const Mat& s,
                                    const Vec& lo, const Vec& hi) {
  auto g = [&](const Vec& u) { return u.dot(a * u) + b.dot(u); };
  const Eigen::SelfAdjointEigenSolver<Mat> eig(s);
  const Mat root = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                   eig.eigenvectors().transpose();
  const Mat sinv = s.inverse();
  auto feasible = [&](const Vec& u) {
    if ((u.array() < lo.array() - 1e-12).any() || (u.array() > hi.array() + 1e-12).any()) return false;
    const Vec d = u - c;
    return d.dot(sinv * d) <= 1.0 + 1e-12;
  };
  double best = -std::numeric_limits<double>::infinity();
  if (c.size() == 1) {
    const double r = root(0, 0);
    for (int i = 0; i <= 200000; ++i) {
      Vec u(1);
      u(0) = c(0) - r + 2.0 * r * i / 200000.0;
      if (feasible(u)) best = std::max(best, g(u));
    }
    return best;
  }
  // Polar grid in the whitened disk, radius and angle, boundary included.
  Vec arg = c;
  const int nr = 400;
  const int nt = 2000;
  for (int i = 0; i <= nr; ++i) {
    const double rad = static_cast<double>(i) / nr;
    for (int t = 0; t < nt; ++t) {
      const double ang = 2.0 * M_PI * t / nt;
      Vec w(2);
      w << rad * std::cos(ang), rad * std::sin(ang);
      const Vec u = c + root * w;
      if (!feasible(u)) continue;
      const double v = g(u);
      if (v > best) {
        best = v;
        arg = u;
      }
    }
  }
  // Also walk the box edges inside the region: maxima often sit on them.
  for (int dim = 0; dim < 2; ++dim) {
    for (const double fixed : {lo(dim), hi(dim)}) {
      if (!std::isfinite(fixed)) continue;
      const int other = 1 - dim;
      const double span = std::sqrt(s(other, other)) * 1.01;
      for (int i = 0; i <= 200000; ++i) {
        Vec u(2);
        u(dim) = fixed;
        u(other) = c(other) - span + 2.0 * span * i / 200000.0;
        if (feasible(u)) best = std::max(best, g(u));
      }
    }
  }
  return best;
}

/// tr(phi P phi^T) with phi built column by column from its definition.
inline double direct_info_trace(const std::vector<Mat>& a_pert, const std::vector<Mat>& b_pert,
                                const Mat& c, const Mat& p, const Vec& x, const Vec& u) {
  const auto r = static_cast<Eigen::Index>(a_pert.size());
  const auto s = static_cast<Eigen::Index>(b_pert.size());
  Mat phi(c.rows(), r + s);
  for (Eigen::Index i = 0; i < r; ++i) phi.col(i) = c * a_pert[static_cast<std::size_t>(i)] * x;
  for (Eigen::Index j = 0; j < s; ++j) phi.col(r + j) = c * b_pert[static_cast<std::size_t>(j)] * u;
  double tr = 0.0;
  for (Eigen::Index t = 0; t < phi.rows(); ++t) {
    for (Eigen::Index i = 0; i < r + s; ++i) {
      for (Eigen::Index j = 0; j < r + s; ++j) tr += phi(t, i) * p(i, j) * phi(t, j);
    }
  }
  return tr;
}

/// Quadratic form (x-a)' P^{-1} (x-a) through an explicit inverse.
inline double quad_form(const Vec& a, const Mat& p, const Vec& x) {
  const Vec d = x - a;
  return d.dot(p.inverse() * d);
}

inline Mat random_spd(int n, std::mt19937_64& rng, double floor = 0.1) {
  std::normal_distribution<double> nd;
  Mat g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) g(i, j) = nd(rng);
  }
  return g * g.transpose() + floor * Mat::Identity(n, n);
}

inline Vec random_vec(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> nd;
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = scale * nd(rng);
  return v;
}

/// Uniform point in the ellipsoid by rejection from the bounding box of the
/// unit ball (independent of the library sampler).
inline Vec rejection_sample(const Vec& a, const Mat& p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  const Eigen::LLT<Mat> llt(p);
  const Mat l = llt.matrixL();
  const auto n = a.size();
  for (;;) {
    Vec w(n);
    for (Eigen::Index i = 0; i < n; ++i) w(i) = ud(rng);
    if (w.squaredNorm() <= 1.0) return a + l * w;
  }
}

}  // namespace oracle
