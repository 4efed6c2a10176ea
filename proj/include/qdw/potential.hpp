#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qdw/quadmap.hpp"

namespace qdw {

struct GreenValue {
  double value = 0.0;        // natural-log units, >= 0
  double error_bound = 0.0;  // rigorous tail bound on |value - G|
  int iterations_used = 0;
};

// Escape-rate potential G(z) = lim 2^{-n} log|f^n(z)| for the standard map.
// Returns 0 (with iterations_used = budget) when the orbit stays bounded
// within the iteration budget; that outcome is a lower-bound certificate,
// not a membership proof.
GreenValue green_potential(const QuadraticMap& map, cplx z, double tolerance);

// Value of the escape-coordinate conjugacy at z (|result| = exp(G(z)),
// result/z -> 1 at infinity).  Requires G(z) > G(0); throws domain_error
// otherwise.  Computed by branch-tracked iterated square roots.
cplx boettcher(const QuadraticMap& map, cplx z);

// Internal evaluation used by the ray tracer: log of the escape coordinate
// and its logarithmic derivative at z.
struct ConjugacyEval {
  cplx log_phi;   // G(z) + i*2*pi*(external angle branch)
  cplx dlog_phi;  // d/dz log phi
  int iterations = 0;
  bool ok = false;
  // the imaginary part is defined modulo this lattice (2*pi when the direct
  // product applies, 2*pi/2^m after m escape iterations)
  double angle_lattice = 0.0;
};
ConjugacyEval boettcher_log(const QuadraticMap& map, cplx z);

// Exact rational angle in R/Z, stored as a reduced fraction.
struct Angle {
  std::int64_t num = 0;
  std::int64_t den = 1;
  static Angle of(std::int64_t num, std::int64_t den);
  static Angle parse(const std::string& text);  // "7/24" or "0.5"
  Angle doubled() const;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Angle& o) const { return num == o.num && den == o.den; }
  std::string str() const;
};

struct RayPolyline {
  Angle angle;
  std::vector<cplx> vertices;
  std::vector<double> potential_levels;  // strictly decreasing
  std::optional<cplx> landing_point;
  bool landing_certified = false;
  std::string note;  // diagnostic when tracing stopped early
};

// Traces the external ray of the given angle from potential 2 down to v_min,
// eight sub-steps per dyadic potential level, each vertex Newton-corrected to
// the (angle, potential) target.  On Newton failure the partial polyline is
// returned with landing_certified = false and a diagnostic note.
RayPolyline trace_external_ray(const QuadraticMap& map, Angle angle,
                               double v_min, int max_steps = 100000);

}  // namespace qdw
