#pragma once

#include <string>

#include "ellctl/scenarios.hpp"

namespace ellctl {

/// Scenario document (JSON, matrices as nested row-major arrays):
///
///   name, a0, a_perturbations[], b0, b_perturbations[], c, disturbance_shape,
///   theta_true, x0, belief0 {center, shape}, horizon, ma, windows,
///   bounds {u_min, u_max}   (null entries mean unbounded),
///   reference {kind: triangle|steps|aircraft, ...parameters}
///
/// Throws std::invalid_argument with the offending key on malformed input.
ScenarioSpec scenario_from_json(const std::string& text);
ScenarioSpec load_scenario(const std::string& path);

std::string scenario_to_json(const ScenarioSpec& spec);

}  // namespace ellctl
