#include "ellctl/scalar_roots.hpp"

#include <algorithm>
#include <cmath>

#include "ellctl/errors.hpp"

namespace ellctl::roots {

namespace {

bool same_sign(double a, double b) { return (a > 0 && b > 0) || (a < 0 && b < 0); }

}  // namespace

double bisect(const std::function<double(double)>& f, double lo, double hi,
              double rel_tol) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (same_sign(flo, fhi)) throw RootFindError("no sign change", lo, hi);
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= rel_tol * std::max(std::abs(lo), std::abs(hi))) break;
    const double fmid = f(mid);
    if (fmid == 0.0) return mid;
    if (same_sign(fmid, flo)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double bisect_log(const std::function<double(double)>& f, double lo, double hi,
                  double rel_tol) {
  if (!(lo > 0.0) || !(hi > lo)) throw RootFindError("invalid log bracket", lo, hi);
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (same_sign(flo, fhi)) throw RootFindError("no sign change", lo, hi);
  for (int it = 0; it < 400; ++it) {
    if (hi / lo - 1.0 <= rel_tol) break;
    const double mid = std::sqrt(lo * hi);
    const double fmid = f(mid);
    if (fmid == 0.0) return mid;
    if (same_sign(fmid, flo)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return std::sqrt(lo * hi);
}

std::vector<double> logspace(double lo, double hi, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] =
        count == 1 ? lo : std::exp(a + (b - a) * i / (count - 1));
  }
  out.back() = hi;
  return out;
}

std::optional<std::pair<double, double>> first_downcrossing(
    const std::function<double(double)>& f, const std::vector<double>& grid) {
  if (grid.size() < 2) return std::nullopt;
  double prev = f(grid[0]);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double cur = f(grid[i]);
    if (prev > 0.0 && cur <= 0.0) return std::make_pair(grid[i - 1], grid[i]);
    prev = cur;
  }
  return std::nullopt;
}

}  // namespace ellctl::roots
