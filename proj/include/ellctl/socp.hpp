#pragma once

#include <vector>

#include "ellctl/ellipsoid.hpp"

namespace ellctl::socp {

enum class Status { Optimal, MaxIter, Infeasible };

/// min_u  sum_t z_t
/// s.t.   || F_t u + h_t || + q_t + (c_t + a_t^T u) <= z_t
///        || F_t u + h_t || + q_t - (c_t + a_t^T u) <= z_t
///        lo <= u <= hi              (entries may be +-inf)
///
/// Written as a standard SOCP with auxiliary s_t >= ||F_t u + h_t||.
struct Problem {
  std::vector<Matrix> f;  // each k_t x m
  std::vector<Vector> h;
  Vector c;               // l
  Matrix a;               // l x m, row t is a_t^T
  Vector q;               // l, nonnegative
  Vector lo;              // m
  Vector hi;              // m
};

struct Options {
  double gap_tol = 1e-8;  // stop when (barrier degree)/t <= gap_tol (1 + |objective|)
  double t0 = 1.0;
  double t_factor = 10.0;
  int max_newton = 500;
};

struct Result {
  Vector u;
  double objective = 0.0;
  int iterations = 0;
  Status status = Status::Optimal;
};

/// Exact value of sum_t max(|c_t + a_t u| + ||F_t u + h_t|| + q_t) at u.
double objective(const Problem& p, const Vector& u);

/// Log-barrier path following with damped Newton centering steps.
Result solve(const Problem& p, const Options& options = {});

}  // namespace ellctl::socp
