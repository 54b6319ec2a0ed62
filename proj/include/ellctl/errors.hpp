#pragma once

#include <stdexcept>
#include <string>

namespace ellctl {

/// Operand shapes do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A shape matrix that must be invertible is not.
class DegenerateOperandError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bracketing failed to find a sign change.
class RootFindError : public std::runtime_error {
 public:
  RootFindError(const std::string& what, double lo, double hi)
      : std::runtime_error(what + " (bracket [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "])"),
        lo_(lo),
        hi_(hi) {}

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

 private:
  double lo_;
  double hi_;
};

/// beta(rho) <= 0: the two sets provably do not intersect.
class InconsistentSetsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Matrix that had to be inverted is numerically singular.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require_dim(bool ok, const char* what) {
  if (!ok) throw DimensionError(what);
}

}  // namespace ellctl
