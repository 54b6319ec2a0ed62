#pragma once

#include "ellctl/ellipsoid.hpp"
#include "ellctl/robust_controller.hpp"
#include "ellctl/system_model.hpp"

namespace ellctl {

/// tr(phi P phi^T) = u^T pw u + pvw_x . u + constant, phi = [V x | W u].
struct InfoQuadratic {
  Matrix pw;      // m x m
  Vector pvw_x;   // m
  double constant = 0.0;  // tr(phi_x P_xx phi_x^T)
};

InfoQuadratic build_info_quadratic(const AffineUncertainModel& model, const Ellipsoid& belief,
                                   const Vector& x);

double info_objective(const InfoQuadratic& info, const Vector& u);

/// E(trace(P) Ma, u_r).
Ellipsoid trust_region(const Vector& u_r, double trace_p, const Matrix& ma);

/// Maximizer of the information quadratic over omega intersected with the box.
/// A zero-shape omega returns its center.
Vector solve_active(const InfoQuadratic& info, const Ellipsoid& omega, const ControlBounds& bounds);

namespace detail {

/// All KKT points of max w^T A w + b^T w on the unit sphere ||w|| = 1.
std::vector<Vector> sphere_kkt_points(const Matrix& a, const Vector& b);

}  // namespace detail

}  // namespace ellctl
