#pragma once

#include <functional>
#include <optional>
#include <vector>

namespace ellctl::roots {

/// Bisection on [lo, hi] where f(lo) and f(hi) have opposite signs (or one is
/// zero). Stops when hi - lo <= rel_tol * max(|lo|, |hi|) or after 400 halvings.
double bisect(const std::function<double(double)>& f, double lo, double hi,
              double rel_tol = 1e-10);

/// Same, but halves in log space; requires 0 < lo < hi.
double bisect_log(const std::function<double(double)>& f, double lo, double hi,
                  double rel_tol = 1e-10);

/// `count` points log-spaced over [lo, hi] inclusive.
std::vector<double> logspace(double lo, double hi, int count);

/// First adjacent pair (a, b) in `grid` with f(a) > 0 and f(b) <= 0.
std::optional<std::pair<double, double>> first_downcrossing(
    const std::function<double(double)>& f, const std::vector<double>& grid);

}  // namespace ellctl::roots
