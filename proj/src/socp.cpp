#include "ellctl/socp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ellctl/errors.hpp"

namespace ellctl::socp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Problem restricted to the free coordinates: u = base + E v.
struct Reduced {
  std::vector<Matrix> f;
  std::vector<Vector> h;
  Vector c;
  Matrix a;
  Vector q;
  Vector lo;
  Vector hi;
  Vector base;
  std::vector<Eigen::Index> free;

  Eigen::Index nv() const { return static_cast<Eigen::Index>(free.size()); }
  Eigen::Index nl() const { return c.size(); }

  Vector lift(const Vector& v) const {
    Vector u = base;
    for (Eigen::Index k = 0; k < nv(); ++k) u(free[static_cast<std::size_t>(k)]) = v(k);
    return u;
  }
};

Reduced reduce(const Problem& p) {
  Reduced r;
  const auto m = p.lo.size();
  r.base = Vector::Zero(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double lo = p.lo(i);
    const double hi = p.hi(i);
    const double width = hi - lo;
    if (std::isfinite(width) && width <= 1e-12 * (1.0 + std::abs(lo) + std::abs(hi))) {
      r.base(i) = 0.5 * (lo + hi);
    } else {
      r.free.push_back(i);
    }
  }
  const auto nv = r.nv();
  Matrix e = Matrix::Zero(m, nv);
  for (Eigen::Index k = 0; k < nv; ++k) e(r.free[static_cast<std::size_t>(k)], k) = 1.0;
  r.c = p.c + p.a * r.base;
  r.a = p.a * e;
  r.q = p.q;
  for (std::size_t t = 0; t < p.f.size(); ++t) {
    r.f.push_back(p.f[t] * e);
    r.h.push_back(p.h[t] + p.f[t] * r.base);
  }
  r.lo.resize(nv);
  r.hi.resize(nv);
  for (Eigen::Index k = 0; k < nv; ++k) {
    r.lo(k) = p.lo(r.free[static_cast<std::size_t>(k)]);
    r.hi(k) = p.hi(r.free[static_cast<std::size_t>(k)]);
  }
  return r;
}

// Barrier state for w = [v, s, z].
struct Eval {
  bool feasible = false;
  double value = 0.0;
  Vector grad;
  Matrix hess;
};

class Barrier {
 public:
  explicit Barrier(const Reduced& r) : r_(r), nv_(r.nv()), nl_(r.nl()) {}

  Eigen::Index size() const { return nv_ + 2 * nl_; }

  double degree() const {
    double nu = 4.0 * static_cast<double>(nl_);
    for (Eigen::Index k = 0; k < nv_; ++k) {
      if (std::isfinite(r_.lo(k))) nu += 1.0;
      if (std::isfinite(r_.hi(k))) nu += 1.0;
    }
    return nu;
  }

  bool feasible(const Vector& w) const {
    const Vector v = w.head(nv_);
    for (Eigen::Index k = 0; k < nv_; ++k) {
      if (std::isfinite(r_.lo(k)) && !(v(k) > r_.lo(k))) return false;
      if (std::isfinite(r_.hi(k)) && !(v(k) < r_.hi(k))) return false;
    }
    for (Eigen::Index t = 0; t < nl_; ++t) {
      const double s = w(nv_ + t);
      const double z = w(nv_ + nl_ + t);
      const Vector cone = r_.f[static_cast<std::size_t>(t)] * v + r_.h[static_cast<std::size_t>(t)];
      if (!(s > 0.0) || !(s * s - cone.squaredNorm() > 0.0)) return false;
      const double mid = r_.c(t) + r_.a.row(t).dot(v);
      if (!(z - s - r_.q(t) - mid > 0.0) || !(z - s - r_.q(t) + mid > 0.0)) return false;
    }
    return w.allFinite();
  }

  // t * sum z - sum log D_k with gradient and Hessian.
  Eval evaluate(const Vector& w, double t_weight) const {
    Eval out;
    const auto n = size();
    out.grad = Vector::Zero(n);
    out.hess = Matrix::Zero(n, n);
    if (!feasible(w)) return out;
    out.feasible = true;
    const Vector v = w.head(nv_);

    auto add_linear = [&](double d, const Vector& gd) {
      out.value -= std::log(d);
      out.grad -= gd / d;
      out.hess += gd * gd.transpose() / (d * d);
    };

    for (Eigen::Index k = 0; k < nv_; ++k) {
      Vector gd = Vector::Zero(n);
      if (std::isfinite(r_.lo(k))) {
        gd(k) = 1.0;
        add_linear(v(k) - r_.lo(k), gd);
      }
      if (std::isfinite(r_.hi(k))) {
        gd(k) = -1.0;
        add_linear(r_.hi(k) - v(k), gd);
      }
    }
    for (Eigen::Index t = 0; t < nl_; ++t) {
      const Eigen::Index is = nv_ + t;
      const Eigen::Index iz = nv_ + nl_ + t;
      const Matrix& f = r_.f[static_cast<std::size_t>(t)];
      const Vector cone = f * v + r_.h[static_cast<std::size_t>(t)];
      const double s = w(is);

      // D = s^2 - ||F v + h||^2
      const double d = s * s - cone.squaredNorm();
      Vector gd = Vector::Zero(n);
      gd.head(nv_) = -2.0 * f.transpose() * cone;
      gd(is) = 2.0 * s;
      Matrix hd = Matrix::Zero(n, n);
      hd.topLeftCorner(nv_, nv_) = -2.0 * f.transpose() * f;
      hd(is, is) = 2.0;
      out.value -= std::log(d);
      out.grad -= gd / d;
      out.hess += -hd / d + gd * gd.transpose() / (d * d);

      const double mid = r_.c(t) + r_.a.row(t).dot(v);
      for (const double sign : {1.0, -1.0}) {
        Vector gl = Vector::Zero(n);
        gl.head(nv_) = -sign * r_.a.row(t).transpose();
        gl(is) = -1.0;
        gl(iz) = 1.0;
        add_linear(w(iz) - s - r_.q(t) - sign * mid, gl);
      }
      out.value += t_weight * w(iz);
      out.grad(iz) += t_weight;
    }
    return out;
  }

 private:
  const Reduced& r_;
  Eigen::Index nv_;
  Eigen::Index nl_;
};

Vector initial_point(const Reduced& r) {
  const auto nv = r.nv();
  const auto nl = r.nl();
  Vector w(nv + 2 * nl);
  for (Eigen::Index k = 0; k < nv; ++k) {
    const double lo = r.lo(k);
    const double hi = r.hi(k);
    if (std::isfinite(lo) && std::isfinite(hi)) {
      w(k) = 0.5 * (lo + hi);
    } else if (std::isfinite(lo)) {
      w(k) = lo + 1.0;
    } else if (std::isfinite(hi)) {
      w(k) = hi - 1.0;
    } else {
      w(k) = 0.0;
    }
  }
  const Vector v = w.head(nv);
  for (Eigen::Index t = 0; t < nl; ++t) {
    const double cone = (r.f[static_cast<std::size_t>(t)] * v + r.h[static_cast<std::size_t>(t)]).norm();
    const double s = cone + 1.0;
    const double mid = r.c(t) + r.a.row(t).dot(v);
    w(nv + t) = s;
    w(nv + nl + t) = std::abs(mid) + s + r.q(t) + 1.0;
  }
  return w;
}

}  // namespace

double objective(const Problem& p, const Vector& u) {
  double total = 0.0;
  for (Eigen::Index t = 0; t < p.c.size(); ++t) {
    const double cone = (p.f[static_cast<std::size_t>(t)] * u + p.h[static_cast<std::size_t>(t)]).norm();
    total += std::abs(p.c(t) + p.a.row(t).dot(u)) + cone + p.q(t);
  }
  return total;
}

Result solve(const Problem& p, const Options& options) {
  const auto m = p.lo.size();
  require_dim(p.hi.size() == m && p.a.cols() == m, "socp: bound/row size mismatch");
  require_dim(p.a.rows() == p.c.size() && p.q.size() == p.c.size(), "socp: output count mismatch");
  require_dim(static_cast<Eigen::Index>(p.f.size()) == p.c.size() &&
                  static_cast<Eigen::Index>(p.h.size()) == p.c.size(),
              "socp: cone count mismatch");

  bool finite = p.c.allFinite() && p.a.allFinite() && p.q.allFinite() && !p.lo.hasNaN() && !p.hi.hasNaN();
  for (std::size_t t = 0; t < p.f.size(); ++t) finite = finite && p.f[t].allFinite() && p.h[t].allFinite();
  if (!finite) throw NumericError("socp: non-finite problem data");

  Result result;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (p.lo(i) > p.hi(i)) {
      result.status = Status::Infeasible;
      result.u = Vector::Zero(m);
      result.objective = kInf;
      return result;
    }
  }

  const Reduced r = reduce(p);
  const Barrier barrier(r);
  Vector w = initial_point(r);
  const double nu = barrier.degree();
  double t = options.t0;
  int newton = 0;
  bool converged = false;

  // Each outer step scales t, so a few dozen cover any sane gap target.
  for (int outer = 0; outer < 64 && newton < options.max_newton; ++outer) {
    // Centering.
    for (int inner = 0; inner < 100 && newton < options.max_newton; ++inner, ++newton) {
      const Eval e = barrier.evaluate(w, t);
      if (!e.feasible) break;
      Eigen::LDLT<Matrix> ldlt(e.hess);
      Vector dir = -ldlt.solve(e.grad);
      if (ldlt.info() != Eigen::Success || !dir.allFinite() || e.grad.dot(dir) >= 0.0) {
        const double shift = 1e-12 * (1.0 + e.hess.diagonal().cwiseAbs().maxCoeff());
        const Matrix reg = e.hess + shift * Matrix::Identity(e.hess.rows(), e.hess.cols());
        dir = -reg.ldlt().solve(e.grad);
        if (!dir.allFinite() || e.grad.dot(dir) >= 0.0) dir = -e.grad;
      }
      const double decrement = -e.grad.dot(dir);
      if (decrement <= 1e-12) break;
      double step = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 80; ++ls, step *= 0.5) {
        const Vector trial = w + step * dir;
        const Eval te = barrier.evaluate(trial, t);
        if (te.feasible && te.value <= e.value - 0.25 * step * decrement) {
          w = trial;
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
    const double gap = nu / t;
    const double obj = objective(p, r.lift(w.head(r.nv())));
    if (gap <= options.gap_tol * (1.0 + std::abs(obj))) {
      converged = true;
      break;
    }
    t *= options.t_factor;
  }

  Vector u = r.lift(w.head(r.nv()));
  for (Eigen::Index i = 0; i < m; ++i) u(i) = std::clamp(u(i), p.lo(i), p.hi(i));
  result.u = u;
  result.objective = objective(p, u);
  result.iterations = newton;
  result.status = converged ? Status::Optimal : Status::MaxIter;
  return result;
}

}  // namespace ellctl::socp
