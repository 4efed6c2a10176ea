#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace qdw {

using cplx = std::complex<double>;

enum class MapKind { standard, deformed };

// A quadratic map z^2 + c, or an explicitly stored polynomial deformation
// of it (critical point 0, quadratic coefficient 1).  Deformed maps evaluate
// by Horner's scheme on the stored coefficients; derivatives are the exact
// algebraic derivative of the stored polynomial.
struct QuadraticMap {
  MapKind kind = MapKind::standard;
  cplx c{0.0, 0.0};          // parameter of the standard map, or lambda
  std::vector<cplx> coeffs;  // deformed kind only; coeffs[k] multiplies w^k

  static QuadraticMap standard_map(cplx c);
  static QuadraticMap deformed_map(cplx lambda, std::vector<cplx> coefficients);

  cplx eval(cplx z) const;
  cplx deriv(cplx z) const;
  double eval_real(double x) const;
  double deriv_real(double x) const;
  int degree() const;
  bool is_standard() const { return kind == MapKind::standard; }
};

struct OrbitTrace {
  std::vector<cplx> points;
  // prefix[k] = sum_{i<k} log|Df(points[i])| = log|Df^k(points[0])|
  std::vector<double> log_abs_derivative_prefix;
  std::optional<int> escaped_at;
  double escape_radius = 0.0;
};

// Iterates the map from z0, recording the orbit and the cumulative
// log-derivative.  Halts at escape (|z| > escape_radius) or at max_steps.
// Throws std::runtime_error naming the step on non-finite values.
OrbitTrace iterate_orbit(const QuadraticMap& map, cplx z0, int max_steps,
                         double escape_radius);

struct FixedPointPair {
  cplx alpha, beta;
  cplx alpha_multiplier, beta_multiplier;
};

// The two fixed points; beta is the one that continues (1+sqrt(1-4c))/2.
// For deformed maps both are refined by Newton from the standard-map values.
FixedPointPair fixed_points(const QuadraticMap& map);

// Newton refinement of a periodic orbit of the given period from a seed.
// Returns the full orbit.  Throws on divergence or if the refined point has
// a smaller minimal period.
std::vector<cplx> refine_periodic_orbit(const QuadraticMap& map, cplx seed,
                                        int period);

// (1/period) * sum log|Df| over the orbit, accumulated in log domain.
// Throws if the orbit is not periodic within tolerance or if the derivative
// vanishes on it.
double lyapunov_exponent(const QuadraticMap& map,
                         const std::vector<cplx>& periodic_orbit, int period);

}  // namespace qdw
