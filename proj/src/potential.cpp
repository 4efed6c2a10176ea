#include "qdw/potential.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace qdw {

namespace {

constexpr double kPi = std::numbers::pi;

double escape_radius_for(const QuadraticMap& map) {
  return std::max(4.0, std::abs(map.c) + 2.0);
}

void require_standard(const QuadraticMap& map, const char* who) {
  if (!map.is_standard())
    throw std::domain_error(std::string(who) + ": only the standard family has a global escape potential");
}

}  // namespace

GreenValue green_potential(const QuadraticMap& map, cplx z, double tolerance) {
  require_standard(map, "green_potential");
  if (tolerance <= 0) throw std::invalid_argument("green_potential: tolerance > 0");
  const double R0 = escape_radius_for(map);
  const cplx c = map.c;
  const int budget = 2048;

  GreenValue g;
  cplx w = z;
  int n = 0;
  while (n < budget && std::abs(w) <= R0) {
    w = w * w + c;
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag()))
      throw std::runtime_error("green_potential: non-finite value at step " + std::to_string(n + 1));
    ++n;
  }
  if (std::abs(w) <= R0) {
    // no escape within budget: certified only as G <= 2^{-budget} log(R0+...)
    g.value = 0.0;
    g.error_bound = std::ldexp(std::log(R0 + std::abs(c) + 1.0), -std::min(budget, 1020));
    g.iterations_used = budget;
    return g;
  }

  // G(z) = 2^{-n} log|w| + sum_{j>=n} 2^{-(j+1)} log|1 + c/w_j^2|.
  // Past the escape radius |c/w^2| <= 1/8 and |w| grows at least
  // quadratically, so increments shrink by a factor > 10 per term.
  double acc = std::ldexp(std::log(std::abs(w)), -n);
  int j = n;
  double last_bound = std::log(R0 + 1.0);
  while (j < budget) {
    double aw2 = std::norm(w);
    if (aw2 > 1e200) {
      last_bound = 0.0;
      break;
    }
    double ratio_mag = std::abs(c) / aw2;
    double corr = std::ldexp(std::log(std::abs(1.0 + c / (w * w))), -(j + 1));
    acc += corr;
    last_bound = std::ldexp(-std::log1p(-ratio_mag), -(j + 1));
    w = w * w + c;
    ++j;
    if (last_bound < 0.5 * tolerance) break;
  }
  g.value = acc;
  g.error_bound = std::min(last_bound, tolerance);
  g.iterations_used = j;
  return g;
}

namespace {

// Principal-branch product log phi(w) = log w + sum 2^{-(j+1)} Log(1 + c/w_j^2)
// together with its z-derivative.  Valid when every factor keeps |c/w^2|
// below the guard; returns ok = false otherwise.
struct ProductEval {
  cplx log_phi, dlog_phi;
  int terms = 0;
  bool ok = false;
};

ProductEval conjugacy_product(const QuadraticMap& map, cplx w0, double guard) {
  ProductEval ev;
  const cplx c = map.c;
  if (std::abs(w0) < 1e-300) return ev;
  cplx w = w0;
  cplx dw = 1.0;  // Df^j(w0)
  cplx logphi = std::log(w0);
  cplx dlog = 1.0 / w0;
  for (int j = 0; j < 2048; ++j) {
    double aw = std::abs(w);
    if (aw > 1e100) break;
    cplx u = c / (w * w);
    if (std::abs(u) > guard) return ev;  // unsafe for the principal branch
    double scale = std::ldexp(1.0, -(j + 1));
    logphi += scale * std::log(1.0 + u);
    dlog += scale * (-2.0 * c / (w * w * w)) * dw / (1.0 + u);
    ev.terms = j + 1;
    if (std::abs(u) * scale < 1e-18 && aw > escape_radius_for(map)) break;
    dw *= 2.0 * w;
    w = w * w + c;
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) return ev;
  }
  ev.ok = std::isfinite(logphi.real()) && std::isfinite(logphi.imag()) &&
          std::isfinite(dlog.real()) && std::isfinite(dlog.imag());
  ev.log_phi = logphi;
  ev.dlog_phi = dlog;
  return ev;
}

}  // namespace

ConjugacyEval boettcher_log(const QuadraticMap& map, cplx z) {
  require_standard(map, "boettcher");
  ConjugacyEval ev;
  // direct product first; near the Julia set fall back to iterating into the
  // escape zone, which leaves the angle defined modulo 2*pi/2^m
  ProductEval direct = conjugacy_product(map, z, 0.5);
  if (direct.ok) {
    ev.log_phi = direct.log_phi;
    ev.dlog_phi = direct.dlog_phi;
    ev.iterations = direct.terms;
    ev.ok = true;
    ev.angle_lattice = 2.0 * kPi;
    return ev;
  }
  const cplx c = map.c;
  const double R0 = escape_radius_for(map);
  cplx w = z;
  cplx dw = 1.0;
  int m = 0;
  while (m < 2048 && std::abs(w) <= R0) {
    dw *= 2.0 * w;
    w = w * w + c;
    ++m;
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) return ev;
  }
  if (std::abs(w) <= R0) return ev;  // no escape: outside the domain
  ProductEval tail = conjugacy_product(map, w, 0.5);
  if (!tail.ok) return ev;
  double scale = std::ldexp(1.0, -m);
  ev.log_phi = scale * tail.log_phi;
  ev.dlog_phi = scale * tail.dlog_phi * dw;
  ev.iterations = m + tail.terms;
  ev.angle_lattice = 2.0 * kPi * scale;
  ev.ok = true;
  return ev;
}

cplx boettcher(const QuadraticMap& map, cplx z) {
  GreenValue gz = green_potential(map, z, 1e-12);
  GreenValue g0 = green_potential(map, cplx(0.0, 0.0), 1e-12);
  const double margin = 1e-9;
  if (gz.value <= g0.value + margin)
    throw std::domain_error("boettcher: z is not in the escape-coordinate domain (G(z) <= G(0))");
  ConjugacyEval ev = boettcher_log(map, z);
  if (!ev.ok) throw std::runtime_error("boettcher: branch-tracked product failed at z");
  if (ev.angle_lattice < 2.0 * kPi * (1.0 - 1e-12)) {
    // angle known only modulo the lattice; anchor the branch at arg z
    double base = ev.log_phi.imag();
    double want = std::arg(z);
    double k = std::round((want - base) / ev.angle_lattice);
    ev.log_phi = cplx(ev.log_phi.real(), base + k * ev.angle_lattice);
  }
  return std::exp(ev.log_phi);
}

Angle Angle::of(std::int64_t num, std::int64_t den) {
  if (den <= 0) throw std::invalid_argument("Angle: positive denominator required");
  if (den > (std::int64_t(1) << 31)) throw std::invalid_argument("Angle: denominator too large");
  num %= den;
  if (num < 0) num += den;
  std::int64_t g = std::gcd(num, den);
  if (g == 0) g = 1;
  Angle a;
  a.num = num / g;
  a.den = den / g;
  return a;
}

Angle Angle::parse(const std::string& text) {
  auto slash = text.find('/');
  if (slash != std::string::npos) {
    std::int64_t n = std::stoll(text.substr(0, slash));
    std::int64_t d = std::stoll(text.substr(slash + 1));
    return Angle::of(n, d);
  }
  double v = std::stod(text);
  // decimal input: snap to denominator 2^20 grid
  const std::int64_t d = 1 << 20;
  return Angle::of(static_cast<std::int64_t>(std::llround(v * d)), d);
}

Angle Angle::doubled() const { return Angle::of(2 * num, den); }

std::string Angle::str() const {
  return std::to_string(num) + "/" + std::to_string(den);
}

RayPolyline trace_external_ray(const QuadraticMap& map, Angle angle,
                               double v_min, int max_steps) {
  require_standard(map, "trace_external_ray");
  if (v_min <= 0) throw std::invalid_argument("trace_external_ray: v_min > 0");
  RayPolyline ray;
  ray.angle = angle;
  const double theta = angle.value();
  const double target_im = 2.0 * kPi * theta;

  auto newton_to = [&](cplx guess, double v, cplx* out) -> bool {
    cplx zc = guess;
    for (int it = 0; it < 60; ++it) {
      ConjugacyEval ev = boettcher_log(map, zc);
      if (!ev.ok) return false;
      double dre = ev.log_phi.real() - v;
      double dim = ev.log_phi.imag() - target_im;
      dim = std::remainder(dim, ev.angle_lattice);
      cplx delta(dre, dim);
      if (std::abs(delta) < 1e-12 * std::max(1.0, v)) {
        *out = zc;
        return true;
      }
      if (std::abs(ev.dlog_phi) < 1e-300) return false;
      cplx step = delta / ev.dlog_phi;
      // a step below double resolution means the vertex is as accurate as
      // representable; accept it
      if (std::abs(step) < 4e-16 * (std::abs(zc) + 1e-12)) {
        *out = zc;
        return true;
      }
      // clamp wild steps to keep Newton in its basin near the Julia set
      double ms = 0.5 * std::max(1e-3, std::abs(zc));
      if (std::abs(step) > ms) step *= ms / std::abs(step);
      zc -= step;
      if (!std::isfinite(zc.real()) || !std::isfinite(zc.imag())) return false;
    }
    return false;
  };

  const std::size_t tail = 16;
  auto tail_diameter = [&]() {
    double diam = 0.0;
    std::size_t start = ray.vertices.size() - tail;
    for (std::size_t i = start; i < ray.vertices.size(); ++i)
      for (std::size_t j = i + 1; j < ray.vertices.size(); ++j)
        diam = std::max(diam, std::abs(ray.vertices[i] - ray.vertices[j]));
    return diam;
  };

  // descend v_k = 2 * 2^{-k/8}
  const double v_start = 2.0;
  int k = 0;
  bool newton_failed = false;
  cplx z = std::exp(cplx(v_start, target_im));  // phi ~ identity far out
  while (static_cast<int>(ray.vertices.size()) < max_steps) {
    double v = v_start * std::pow(2.0, -k / 8.0);
    if (v < v_min * (1.0 - 1e-12)) break;
    // the previous vertex is within the Newton basin of the next level:
    // the potential moves by a factor 2^{1/8} per sub-step only
    cplx guess = (k == 0) ? z : ray.vertices[k - 1];
    cplx zk;
    if (!newton_to(guess, v, &zk)) {
      ray.note = "newton divergence at potential " + std::to_string(v);
      newton_failed = true;
      break;
    }
    ray.vertices.push_back(zk);
    ray.potential_levels.push_back(v);
    ++k;
    // stop early once the tail has visibly landed
    if (ray.vertices.size() >= tail && tail_diameter() < 1e-8) break;
  }

  if (ray.vertices.size() >= tail && tail_diameter() < 1e-8) {
    ray.landing_certified = true;
    ray.landing_point = ray.vertices.back();
    if (newton_failed) ray.note += " (after certified landing tail)";
  } else if (!newton_failed) {
    ray.note = "tail diameter above landing tolerance at v_min";
  }
  if (!ray.landing_point && !ray.vertices.empty())
    ray.landing_point = ray.vertices.back();
  return ray;
}

}  // namespace qdw
