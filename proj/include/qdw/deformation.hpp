#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qdw/puzzle.hpp"
#include "qdw/quadmap.hpp"

namespace qdw {

// Construction of the interpolating polynomial deformation of z^2 + lambda
// that pins +-beta and the orbits of p, p+, p- while adjusting the derivative
// at p- so the 6-step multiplier modulus at p- equals the square of the
// 3-step multiplier modulus at p+.
struct DeformationParts {
  QuadraticMap map;       // the deformed polynomial
  double omega = 0.0;     // deformation amplitude
  CantorData cantor;      // refined periodic data of the base map
  double beta = 0.0;
  std::vector<double> orbit_p, orbit_p_plus, orbit_p_minus;
  double dp_at_p_minus = 0.0;  // derivative of the interpolation product at p-
};

QuadraticMap build_deformation(double lambda);
DeformationParts build_deformation_parts(double lambda);

// Evaluation through the factored interpolation product (no coefficient
// expansion); reference path for testing the expanded coefficients.
double eval_deformation_factored(const DeformationParts& parts, double x);

struct DeformationReport {
  double lambda = 0.0;
  double omega = 0.0;
  std::vector<std::pair<std::string, double>> interpolation_residuals;
  std::vector<std::pair<std::string, double>> derivative_residuals;
  double multiplier_identity_residual = 0.0;  // | |Dfh^6(p-)| - |Df^3(p+)|^2 | / |Df^3(p+)|^2
  double lyapunov_gap = 0.0;                  // chi(p) - chi(p+)
  double equality_residual = 0.0;             // |chi_hat(p-) - chi_hat(p+)|
  double max_interpolation_residual = 0.0;
  double max_derivative_residual = 0.0;
};

DeformationReport verify_interpolation_identities(const DeformationParts& parts);

struct QuadLikeReport {
  bool pass = false;
  double radius = 0.0;
  bool critical_points_ok = false;  // 0 is the only critical point inside the preimage
  bool winding_ok = false;          // preimage of the circle winds twice
  bool containment_ok = false;      // preimage contour stays inside the disk
  double max_preimage_abs = 0.0;
  double winding_turns = 0.0;       // turns of the preimage contour around 0
  int interior_critical_points = 0;
  std::string failed_clause;
};

// Checks that the map restricted to the preimage of B(0, radius) looks like a
// proper degree-2 map: the only interior critical point is 0, the preimage of
// the boundary circle closes up after winding twice, and it stays inside the
// disk.
QuadLikeReport quadratic_like_check(const QuadraticMap& deformed, double radius = 80.0);

}  // namespace qdw
