#include "qdw/quadmap.hpp"

#include <cmath>
#include <stdexcept>

namespace qdw {

QuadraticMap QuadraticMap::standard_map(cplx c) {
  QuadraticMap m;
  m.kind = MapKind::standard;
  m.c = c;
  return m;
}

QuadraticMap QuadraticMap::deformed_map(cplx lambda, std::vector<cplx> coefficients) {
  QuadraticMap m;
  m.kind = MapKind::deformed;
  m.c = lambda;
  m.coeffs = std::move(coefficients);
  if (m.coeffs.size() < 3) throw std::invalid_argument("deformed map needs degree >= 2");
  return m;
}

cplx QuadraticMap::eval(cplx z) const {
  if (kind == MapKind::standard) return z * z + c;
  cplx acc = coeffs.back();
  for (std::size_t i = coeffs.size() - 1; i-- > 0;) acc = acc * z + coeffs[i];
  return acc;
}

cplx QuadraticMap::deriv(cplx z) const {
  if (kind == MapKind::standard) return 2.0 * z;
  cplx acc = static_cast<double>(coeffs.size() - 1) * coeffs.back();
  for (std::size_t i = coeffs.size() - 1; i-- > 1;)
    acc = acc * z + static_cast<double>(i) * coeffs[i];
  return acc;
}

double QuadraticMap::eval_real(double x) const {
  if (kind == MapKind::standard) return x * x + c.real();
  double acc = coeffs.back().real();
  for (std::size_t i = coeffs.size() - 1; i-- > 0;) acc = acc * x + coeffs[i].real();
  return acc;
}

double QuadraticMap::deriv_real(double x) const {
  if (kind == MapKind::standard) return 2.0 * x;
  double acc = static_cast<double>(coeffs.size() - 1) * coeffs.back().real();
  for (std::size_t i = coeffs.size() - 1; i-- > 1;)
    acc = acc * x + static_cast<double>(i) * coeffs[i].real();
  return acc;
}

int QuadraticMap::degree() const {
  if (kind == MapKind::standard) return 2;
  return static_cast<int>(coeffs.size()) - 1;
}

OrbitTrace iterate_orbit(const QuadraticMap& map, cplx z0, int max_steps,
                         double escape_radius) {
  if (max_steps < 1) throw std::invalid_argument("iterate_orbit: max_steps >= 1");
  if (escape_radius <= 0) throw std::invalid_argument("iterate_orbit: escape_radius > 0");
  OrbitTrace tr;
  tr.escape_radius = escape_radius;
  tr.points.reserve(max_steps + 1);
  tr.log_abs_derivative_prefix.reserve(max_steps + 1);
  cplx z = z0;
  double logd = 0.0;
  tr.points.push_back(z);
  tr.log_abs_derivative_prefix.push_back(0.0);
  if (std::abs(z) > escape_radius) {
    tr.escaped_at = 0;
    return tr;
  }
  for (int k = 0; k < max_steps; ++k) {
    logd += std::log(std::abs(map.deriv(z)));
    z = map.eval(z);
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw std::runtime_error("iterate_orbit: non-finite value at step " +
                               std::to_string(k + 1));
    tr.points.push_back(z);
    tr.log_abs_derivative_prefix.push_back(logd);
    if (std::abs(z) > escape_radius) {
      tr.escaped_at = k + 1;
      break;
    }
  }
  return tr;
}

namespace {

cplx newton_fixed_point(const QuadraticMap& map, cplx seed) {
  cplx z = seed;
  for (int it = 0; it < 100; ++it) {
    cplx r = map.eval(z) - z;
    cplx d = map.deriv(z) - 1.0;
    if (std::abs(d) < 1e-300) break;
    cplx step = r / d;
    z -= step;
    if (std::abs(step) < 1e-15 * (1.0 + std::abs(z))) break;
  }
  if (std::abs(map.eval(z) - z) > 1e-10)
    throw std::runtime_error("fixed_points: Newton did not converge, last iterate (" +
                             std::to_string(z.real()) + "," + std::to_string(z.imag()) + ")");
  return z;
}

}  // namespace

FixedPointPair fixed_points(const QuadraticMap& map) {
  cplx c = map.c;
  if (std::abs(c - cplx(0.25, 0.0)) < 1e-14)
    throw std::domain_error("fixed_points: fixed points collide at c = 1/4");
  cplx s = std::sqrt(1.0 - 4.0 * c);
  cplx beta = 0.5 * (1.0 + s);
  cplx alpha = 0.5 * (1.0 - s);
  FixedPointPair fp;
  if (map.is_standard()) {
    fp.alpha = alpha;
    fp.beta = beta;
  } else {
    fp.alpha = newton_fixed_point(map, alpha);
    fp.beta = newton_fixed_point(map, beta);
  }
  fp.alpha_multiplier = map.deriv(fp.alpha);
  fp.beta_multiplier = map.deriv(fp.beta);
  return fp;
}

std::vector<cplx> refine_periodic_orbit(const QuadraticMap& map, cplx seed,
                                        int period) {
  if (period < 1) throw std::invalid_argument("refine_periodic_orbit: period >= 1");
  cplx z = seed;
  bool converged = false;
  for (int it = 0; it < 200; ++it) {
    // value and derivative of f^period at z
    cplx w = z, dw = 1.0;
    for (int j = 0; j < period; ++j) {
      dw *= map.deriv(w);
      w = map.eval(w);
    }
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag()))
      throw std::runtime_error("refine_periodic_orbit: orbit diverged");
    cplx r = w - z;
    if (std::abs(r) < 1e-13) {
      converged = true;
      if (std::abs(r) < 1e-15 || it > 4) break;
    }
    cplx d = dw - 1.0;
    if (std::abs(d) < 1e-300)
      throw std::runtime_error("refine_periodic_orbit: singular Newton step");
    z -= r / d;
  }
  {
    cplx w = z;
    for (int j = 0; j < period; ++j) w = map.eval(w);
    if (!converged || std::abs(w - z) > 1e-12)
      throw std::runtime_error("refine_periodic_orbit: no convergence from seed");
  }
  // minimal-period check on proper divisors
  for (int d = 1; d < period; ++d) {
    if (period % d != 0) continue;
    cplx w = z;
    for (int j = 0; j < d; ++j) w = map.eval(w);
    if (std::abs(w - z) < 1e-9)
      throw std::runtime_error("refine_periodic_orbit: converged to period " +
                               std::to_string(d) + " point, wanted " +
                               std::to_string(period));
  }
  std::vector<cplx> orbit;
  orbit.reserve(period);
  cplx w = z;
  for (int j = 0; j < period; ++j) {
    orbit.push_back(w);
    w = map.eval(w);
  }
  return orbit;
}

double lyapunov_exponent(const QuadraticMap& map,
                         const std::vector<cplx>& periodic_orbit, int period) {
  if (period < 1 || periodic_orbit.empty())
    throw std::invalid_argument("lyapunov_exponent: bad arguments");
  // periodicity check: consecutive points map onto each other, orbit closes
  const double tol = 1e-9;
  for (std::size_t i = 0; i < periodic_orbit.size(); ++i) {
    cplx next = periodic_orbit[(i + 1) % periodic_orbit.size()];
    if (std::abs(map.eval(periodic_orbit[i]) - next) > tol)
      throw std::runtime_error("lyapunov_exponent: orbit is not periodic within tolerance");
  }
  double acc = 0.0;
  int count = 0;
  for (cplx z : periodic_orbit) {
    double ad = std::abs(map.deriv(z));
    if (ad < 1e-300)
      throw std::runtime_error("lyapunov_exponent: derivative vanishes on the orbit");
    acc += std::log(ad);
    ++count;
    if (count == period) break;
  }
  return acc / period;
}

}  // namespace qdw
