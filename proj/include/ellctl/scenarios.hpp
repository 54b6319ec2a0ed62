#pragma once

#include <string>
#include <variant>
#include <vector>

#include "ellctl/ellipsoid.hpp"
#include "ellctl/robust_controller.hpp"
#include "ellctl/system_model.hpp"

namespace ellctl {

/// Rises linearly to `peak` over `half` steps, falls back over the next
/// `half`, then repeats.
struct TriangleReference {
  double peak = 5.0;
  int half = 23;
};

/// Piecewise constant; values[i] holds from starts[i] on. starts[0] must be 1.
struct StepsReference {
  std::vector<int> starts;
  std::vector<double> values;
};

/// (level, amplitude sin(k pi / period)).
struct SinusoidReference {
  double level = 250.0;
  double amplitude = 6.0;
  double period = 25.0;
};

using Reference = std::variant<TriangleReference, StepsReference, SinusoidReference>;

/// Reference output at step k >= 1 (defined past the horizon too).
Vector reference_at(const Reference& ref, long k);
Eigen::Index reference_dim(const Reference& ref);
std::string reference_kind(const Reference& ref);

struct ScenarioSpec {
  std::string name;
  AffineUncertainModel model;
  Vector theta_true;
  Vector x0;
  Ellipsoid belief0{Vector::Zero(1), Matrix::Zero(1, 1)};
  Reference reference;
  int horizon = 1;
  ControlBounds bounds;
  Matrix ma;
  std::vector<int> windows;  // default report rows

  /// Throws std::invalid_argument (or DimensionError) when inconsistent,
  /// including theta_true outside belief0.
  void validate() const;
};

/// Built-in setups: "sim1", "sim2", "sim3". Throws std::invalid_argument on
/// an unknown name.
ScenarioSpec scenario(const std::string& name);

std::vector<std::string> scenario_names();

/// Continuous longitudinal aircraft model used by sim3.
struct ContinuousModel {
  Matrix a;
  Matrix b;
};
ContinuousModel aircraft_continuous();

/// The discretized aircraft matrices as used by sim3 (printed to four decimals).
Dynamics aircraft_discrete_printed();

}  // namespace ellctl
