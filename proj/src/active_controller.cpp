#include "ellctl/active_controller.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>

#include "ellctl/errors.hpp"

namespace ellctl {

InfoQuadratic build_info_quadratic(const AffineUncertainModel& model, const Ellipsoid& belief,
                                   const Vector& x) {
  model.validate();
  const auto r = model.num_alpha();
  const auto s = model.num_beta();
  const auto m = model.input_dim();
  const auto l = model.output_dim();
  require_dim(belief.dim() == r + s, "build_info_quadratic: belief size");
  require_dim(x.size() == model.state_dim(), "build_info_quadratic: state size");

  const Matrix& p = belief.shape();
  const Matrix pxx = p.topLeftCorner(r, r);
  const Matrix pxu = p.topRightCorner(r, s);
  const Matrix puu = p.bottomRightCorner(s, s);

  InfoQuadratic out{Matrix::Zero(m, m), Vector::Zero(m), 0.0};
  for (Eigen::Index t = 0; t < l; ++t) {
    Vector ax(r);
    for (Eigen::Index i = 0; i < r; ++i) {
      ax(i) = model.c.row(t).dot(model.a_perturbations[static_cast<std::size_t>(i)] * x);
    }
    Matrix wt(s, m);
    for (Eigen::Index j = 0; j < s; ++j) {
      wt.row(j) = model.c.row(t) * model.b_perturbations[static_cast<std::size_t>(j)];
    }
    out.pw += wt.transpose() * puu * wt;
    out.pvw_x += 2.0 * (ax.transpose() * pxu * wt).transpose();
    out.constant += ax.dot(pxx * ax);
  }
  out.pw = 0.5 * (out.pw + out.pw.transpose()).eval();
  return out;
}

double info_objective(const InfoQuadratic& info, const Vector& u) {
  return u.dot(info.pw * u) + info.pvw_x.dot(u);
}

Ellipsoid trust_region(const Vector& u_r, double trace_p, const Matrix& ma) {
  require_dim(ma.rows() == u_r.size() && ma.cols() == u_r.size(), "trust_region: Ma size");
  return Ellipsoid(u_r, std::max(trace_p, 0.0) * ma);
}

namespace detail {

namespace {

// Root of a monotone-on-bracket function by bisection; f(lo) and f(hi) differ in sign.
double bisect_sign(const std::function<double(double)>& f, double lo, double hi) {
  const bool lo_neg = f(lo) < 0.0;
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if ((f(mid) < 0.0) == lo_neg) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<Vector> sphere_kkt_points(const Matrix& a, const Vector& b) {
  const auto k = a.rows();
  std::vector<Vector> out;
  if (k == 0) return out;
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (a + a.transpose()));
  const Vector lam = eig.eigenvalues();
  const Matrix vec = eig.eigenvectors();
  const Vector d = 0.5 * (vec.transpose() * b);

  const double scale = 1.0 + lam.cwiseAbs().maxCoeff();
  struct Group {
    double lambda;
    double mass;
    std::vector<Eigen::Index> idx;
  };
  std::vector<Group> groups;
  for (Eigen::Index i = 0; i < k; ++i) {
    if (!groups.empty() && lam(i) - groups.back().lambda <= 1e-12 * scale) {
      groups.back().idx.push_back(i);
      groups.back().mass += d(i) * d(i);
    } else {
      groups.push_back({lam(i), d(i) * d(i), {i}});
    }
  }
  const double mass_floor = std::pow(1e-14 * (1.0 + b.norm()), 2);

  std::vector<const Group*> poles;
  double total = 0.0;
  for (const auto& g : groups) {
    if (g.mass > mass_floor) {
      poles.push_back(&g);
      total += g.mass;
    }
  }
  auto secular = [&](double mu) {
    double acc = -1.0;
    for (const auto* g : poles) {
      const double gap = mu - g->lambda;
      acc += g->mass / (gap * gap);
    }
    return acc;
  };
  auto point_at = [&](double mu) {
    Vector wt(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      const double gap = mu - lam(i);
      wt(i) = gap == 0.0 ? 0.0 : d(i) / gap;
    }
    Vector w = vec * wt;
    const double n = w.norm();
    if (n > 0.0) w /= n;
    return w;
  };

  std::vector<double> roots;
  if (!poles.empty()) {
    const double reach = std::sqrt(total) + 1.0;
    roots.push_back(bisect_sign(secular, poles.front()->lambda - reach, poles.front()->lambda));
    roots.push_back(bisect_sign(secular, poles.back()->lambda, poles.back()->lambda + reach));
    for (std::size_t g = 0; g + 1 < poles.size(); ++g) {
      double lo = poles[g]->lambda;
      double hi = poles[g + 1]->lambda;
      // secular is convex between poles; golden-section for its minimum.
      const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
      double x1 = hi - phi * (hi - lo);
      double x2 = lo + phi * (hi - lo);
      double f1 = secular(x1);
      double f2 = secular(x2);
      for (int it = 0; it < 200 && hi - lo > 1e-15 * scale; ++it) {
        if (f1 < f2) {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - phi * (hi - lo);
          f1 = secular(x1);
        } else {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + phi * (hi - lo);
          f2 = secular(x2);
        }
      }
      const double mu_min = 0.5 * (lo + hi);
      if (secular(mu_min) < 0.0) {
        roots.push_back(bisect_sign(secular, poles[g]->lambda, mu_min));
        roots.push_back(bisect_sign(secular, mu_min, poles[g + 1]->lambda));
      }
    }
  }
  for (const double mu : roots) out.push_back(point_at(mu));

  // Hard case: multiplier sitting on an eigenvalue that b does not excite.
  for (const auto& g : groups) {
    if (g.mass > mass_floor) continue;
    Vector wt = Vector::Zero(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      const double gap = g.lambda - lam(i);
      if (std::find(g.idx.begin(), g.idx.end(), i) == g.idx.end() && gap != 0.0) wt(i) = d(i) / gap;
    }
    const double rem = 1.0 - wt.squaredNorm();
    if (rem < -1e-12) continue;
    const double fill = std::sqrt(std::max(rem, 0.0));
    for (const auto i : g.idx) {
      for (const double sign : {1.0, -1.0}) {
        Vector cand = wt;
        cand(i) = sign * fill;
        out.push_back(vec * cand);
      }
    }
  }
  return out;
}

}  // namespace detail

namespace {

double quad_value(const Matrix& a, const Vector& b, const Vector& u) {
  return u.dot(a * u) + b.dot(u);
}

bool in_box(const Vector& u, const Vector& lo, const Vector& hi) {
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double slack = 1e-10 * (1.0 + std::abs(u(i)));
    if (u(i) < lo(i) - slack || u(i) > hi(i) + slack) return false;
  }
  return true;
}

// max u^T A u + b^T u over { c + S w : ||w|| <= 1 } intersected with [lo, hi].
std::optional<Vector> maximize_on_slice(const Matrix& a, const Vector& b, const Vector& c,
                                        const Matrix& shape, const Vector& lo, const Vector& hi) {
  const auto k = c.size();
  if (k == 0) return Vector(0);

  std::vector<Vector> cands;
  const Matrix root = psd_sqrt(shape);
  const Matrix aw = root * a * root;
  const Vector bw = root * (2.0 * a * c + b);
  for (const auto& w : detail::sphere_kkt_points(aw, bw)) cands.push_back(c + root * w);
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (aw + aw.transpose()));
  if (eig.eigenvalues().maxCoeff() < 0.0) {
    const Vector w = (-2.0 * aw).ldlt().solve(bw);
    if (w.norm() <= 1.0) cands.push_back(c + root * w);
  }
  cands.push_back(c);

  std::optional<Vector> best;
  double best_val = 0.0;
  auto offer = [&](const Vector& u) {
    if (!in_box(u, lo, hi)) return;
    const Vector clamped = u.cwiseMax(lo).cwiseMin(hi);
    const double val = quad_value(a, b, clamped);
    const double tie = 1e-12 * (1.0 + std::abs(best_val));
    const bool smaller = best && std::lexicographical_compare(clamped.data(), clamped.data() + k,
                                                              best->data(), best->data() + k);
    if (!best || val > best_val + tie || (val >= best_val - tie && smaller)) {
      best = clamped;
      best_val = val;
    }
  };
  for (const auto& u : cands) offer(u);

  // Box faces: fix one coordinate at a finite bound and recurse on the slice.
  for (Eigen::Index i = 0; i < k; ++i) {
    std::vector<Eigen::Index> rest;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (j != i) rest.push_back(j);
    }
    const auto kr = static_cast<Eigen::Index>(rest.size());
    for (const double v : {lo(i), hi(i)}) {
      if (!std::isfinite(v)) continue;
      const double sii = shape(i, i);
      const double off = v - c(i);
      Vector cr(kr);
      Matrix sr(kr, kr);
      Vector lor(kr);
      Vector hir(kr);
      Matrix ar(kr, kr);
      Vector br(kr);
      double shrink;
      if (sii <= 1e-300) {
        if (std::abs(off) > 1e-10 * (1.0 + std::abs(v))) continue;
        shrink = 1.0;
      } else {
        const double t = off * off / sii;
        if (t > 1.0 + 1e-12) continue;
        shrink = std::max(0.0, 1.0 - t);
      }
      for (Eigen::Index p = 0; p < kr; ++p) {
        const auto rp = rest[static_cast<std::size_t>(p)];
        cr(p) = c(rp) + (sii > 1e-300 ? shape(rp, i) * off / sii : 0.0);
        lor(p) = lo(rp);
        hir(p) = hi(rp);
        br(p) = b(rp) + 2.0 * a(rp, i) * v;
        for (Eigen::Index q = 0; q < kr; ++q) {
          const auto rq = rest[static_cast<std::size_t>(q)];
          const double cond = sii > 1e-300 ? shape(rp, i) * shape(i, rq) / sii : 0.0;
          sr(p, q) = (shape(rp, rq) - cond) * shrink;
          ar(p, q) = a(rp, rq);
        }
      }
      sr = repair_psd(sr);
      const auto sub = maximize_on_slice(ar, br, cr, sr, lor, hir);
      if (!sub) continue;
      Vector u(k);
      u(i) = v;
      for (Eigen::Index p = 0; p < kr; ++p) u(rest[static_cast<std::size_t>(p)]) = (*sub)(p);
      offer(u);
    }
  }
  return best;
}

double form_value(const Matrix& g, const Vector& c, const Vector& u) {
  const Vector d = u - c;
  return d.dot(g * d);
}

// Moves a box-feasible point onto omega along the ray from the center.
Vector pull_into(const Matrix& g, const Vector& c, const Vector& u) {
  const double q = form_value(g, c, u);
  if (q <= 1.0) return u;
  return c + (u - c) / std::sqrt(q);
}

// Coordinate ascent confined to omega and the box.
Vector polish(const Matrix& a, const Vector& b, const Matrix& g, const Vector& c, Vector u,
              const Vector& lo, const Vector& hi) {
  const auto k = u.size();
  for (int sweep = 0; sweep < 20; ++sweep) {
    for (Eigen::Index i = 0; i < k; ++i) {
      const Vector d = u - c;
      // g_ii t^2 + 2 t beta + gamma <= 1 with t = d_i.
      const double gii = g(i, i);
      const double beta = g.row(i).dot(d) - gii * d(i);
      const double gamma = d.dot(g * d) - 2.0 * d(i) * g.row(i).dot(d) + gii * d(i) * d(i);
      const double disc = beta * beta - gii * (gamma - 1.0);
      if (gii <= 0.0 || disc < 0.0) continue;
      const double sq = std::sqrt(disc);
      double t_lo = (-beta - sq) / gii + c(i);
      double t_hi = (-beta + sq) / gii + c(i);
      t_lo = std::max(t_lo, lo(i));
      t_hi = std::min(t_hi, hi(i));
      if (t_lo > t_hi) continue;
      // objective in u_i: a_ii u_i^2 + (2 a_i,rest u_rest + b_i) u_i
      const double aii = a(i, i);
      const double lin = 2.0 * (a.row(i).dot(u) - aii * u(i)) + b(i);
      auto val = [&](double t) { return aii * t * t + lin * t; };
      double best_t = u(i);
      double best_v = val(u(i));
      for (const double t : {t_lo, t_hi}) {
        if (val(t) > best_v) {
          best_v = val(t);
          best_t = t;
        }
      }
      if (aii < 0.0) {
        const double t = std::clamp(-lin / (2.0 * aii), t_lo, t_hi);
        if (val(t) > best_v) best_t = t;
      }
      Vector trial = u;
      trial(i) = best_t;
      if (form_value(g, c, trial) <= 1.0 + 1e-12 &&
          quad_value(a, b, trial) > quad_value(a, b, u)) {
        u = trial;
      }
    }
  }
  return u;
}

}  // namespace

Vector solve_active(const InfoQuadratic& info, const Ellipsoid& omega, const ControlBounds& bounds) {
  const auto m = omega.dim();
  require_dim(info.pw.rows() == m && info.pw.cols() == m && info.pvw_x.size() == m,
              "solve_active: quadratic size");
  require_dim(bounds.u_min.size() == m && bounds.u_max.size() == m, "solve_active: bounds size");
  const Vector& u_r = omega.center();
  const Matrix& shape = omega.shape();
  if (!(shape.trace() > 0.0)) return u_r;

  const Matrix& a = info.pw;
  const Vector& b = info.pvw_x;
  const Vector& lo = bounds.u_min;
  const Vector& hi = bounds.u_max;

  std::vector<Vector> cands{u_r};
  if (const auto exact = maximize_on_slice(a, b, u_r, shape, lo, hi)) cands.push_back(*exact);

  // Ball optimum, clipped, pulled back into omega and polished.
  const Eigen::LDLT<Matrix> ldlt(shape);
  const Matrix g = ldlt.solve(Matrix::Identity(m, m));
  if (g.allFinite()) {
    const Matrix root = psd_sqrt(shape);
    const Matrix aw = root * a * root;
    const Vector bw = root * (2.0 * a * u_r + b);
    std::optional<Vector> ball_best;
    for (const auto& w : detail::sphere_kkt_points(aw, bw)) {
      const Vector u = u_r + root * w;
      if (!ball_best || quad_value(a, b, u) > quad_value(a, b, *ball_best)) ball_best = u;
    }
    if (ball_best) {
      const Vector clipped = pull_into(g, u_r, ball_best->cwiseMax(lo).cwiseMin(hi));
      cands.push_back(polish(a, b, g, u_r, clipped, lo, hi));
    }
  }

  // Keep only feasible points; snap tiny excursions back onto omega.
  double best = -std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, Vector>> scored;
  for (auto u : cands) {
    u = u.cwiseMax(lo).cwiseMin(hi);
    if (g.allFinite()) u = pull_into(g, u_r, u);
    const double v = quad_value(a, b, u);
    scored.emplace_back(v, u);
    best = std::max(best, v);
  }
  const double tie = 1e-12 * (1.0 + std::abs(best));
  const Vector* pick = nullptr;
  for (const auto& [v, u] : scored) {
    if (v < best - tie) continue;
    if (!pick || std::lexicographical_compare(u.data(), u.data() + m, pick->data(),
                                              pick->data() + m)) {
      pick = &u;
    }
  }
  return *pick;
}

}  // namespace ellctl
