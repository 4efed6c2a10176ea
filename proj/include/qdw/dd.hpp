#pragma once

#include <cmath>

namespace qdw {

// Double-double value built on error-free transforms; enough headroom for
// expanding products of a couple dozen linear factors without losing the
// 1e-12 residual targets near lambda = -2.
struct dd {
  double hi = 0.0, lo = 0.0;
  dd() = default;
  dd(double x) : hi(x), lo(0.0) {}
  dd(double h, double l) : hi(h), lo(l) {}
  double to_double() const { return hi + lo; }
};

inline dd two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

inline dd two_prod(double a, double b) {
  double p = a * b;
  double err = std::fma(a, b, -p);
  return {p, err};
}

inline dd operator+(dd a, dd b) {
  dd s = two_sum(a.hi, b.hi);
  double lo = s.lo + a.lo + b.lo;
  dd r = two_sum(s.hi, lo);
  return r;
}

inline dd operator-(dd a) { return {-a.hi, -a.lo}; }
inline dd operator-(dd a, dd b) { return a + (-b); }

inline dd operator*(dd a, dd b) {
  dd p = two_prod(a.hi, b.hi);
  double lo = p.lo + a.hi * b.lo + a.lo * b.hi;
  dd r = two_sum(p.hi, lo);
  return r;
}

inline dd operator/(dd a, dd b) {
  double q1 = a.hi / b.hi;
  dd r = a - dd(q1) * b;
  double q2 = r.hi / b.hi;
  dd s = two_sum(q1, q2);
  return s;
}

}  // namespace qdw
