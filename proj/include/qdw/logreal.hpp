#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <string>
#include <utility>

namespace qdw {

enum class Rounding { down, up, nearest };

inline mpfr_rnd_t mpfr_dir(Rounding r) {
  switch (r) {
    case Rounding::down: return MPFR_RNDD;
    case Rounding::up: return MPFR_RNDU;
    default: return MPFR_RNDN;
  }
}

inline Rounding opposite(Rounding r) {
  if (r == Rounding::down) return Rounding::up;
  if (r == Rounding::up) return Rounding::down;
  return Rounding::nearest;
}

// RAII wrapper for a plain mpfr real; used for exponent arithmetic.
class Real {
 public:
  explicit Real(mpfr_prec_t prec = 256) { mpfr_init2(x_, prec); mpfr_set_zero(x_, 1); }
  Real(const Real& o) { mpfr_init2(x_, mpfr_get_prec(o.x_)); mpfr_set(x_, o.x_, MPFR_RNDN); }
  Real(Real&& o) noexcept { mpfr_init2(x_, mpfr_get_prec(o.x_)); mpfr_swap(x_, o.x_); }
  Real& operator=(Real o) { mpfr_swap(x_, o.x_); return *this; }
  ~Real() { mpfr_clear(x_); }

  static Real of(double v, mpfr_prec_t prec) {
    Real r(prec);
    mpfr_set_d(r.x_, v, MPFR_RNDN);  // doubles embed exactly
    return r;
  }
  static Real of_mpz(const mpz_class& n, Rounding rnd, mpfr_prec_t prec) {
    Real r(prec);
    mpfr_set_z(r.x_, n.get_mpz_t(), mpfr_dir(rnd));
    return r;
  }

  mpfr_ptr get() { return x_; }
  mpfr_srcptr get() const { return x_; }
  mpfr_prec_t prec() const { return mpfr_get_prec(x_); }
  double to_double() const { return mpfr_get_d(x_, MPFR_RNDN); }
  bool is_inf() const { return mpfr_inf_p(x_); }
  int sgn() const { return mpfr_sgn(x_); }
  int cmp(const Real& o) const { return mpfr_cmp(x_, o.x_); }
  int cmp_d(double v) const { return mpfr_cmp_d(x_, v); }

  friend Real radd(const Real& a, const Real& b, Rounding r) {
    Real out(std::max(a.prec(), b.prec()));
    mpfr_add(out.x_, a.x_, b.x_, mpfr_dir(r));
    return out;
  }
  friend Real rsub(const Real& a, const Real& b, Rounding r) {
    Real out(std::max(a.prec(), b.prec()));
    mpfr_sub(out.x_, a.x_, b.x_, mpfr_dir(r));
    return out;
  }
  friend Real rmul(const Real& a, const Real& b, Rounding r) {
    Real out(std::max(a.prec(), b.prec()));
    mpfr_mul(out.x_, a.x_, b.x_, mpfr_dir(r));
    return out;
  }
  friend Real rdiv(const Real& a, const Real& b, Rounding r) {
    Real out(std::max(a.prec(), b.prec()));
    mpfr_div(out.x_, a.x_, b.x_, mpfr_dir(r));
    return out;
  }
  friend Real rneg(const Real& a) {
    Real out(a.prec());
    mpfr_neg(out.x_, a.x_, MPFR_RNDN);  // exact
    return out;
  }

 private:
  mpfr_t x_;
};

// A nonnegative extended-precision real stored as its base-2 logarithm
// (-inf encodes zero).  Every operation takes the rounding direction of the
// result in value space; combining lower-rounded operands with down and
// upper-rounded operands with up yields sound enclosures.
class LogReal {
 public:
  explicit LogReal(mpfr_prec_t prec = 256) : log2_(prec) {
    mpfr_set_inf(log2_.get(), -1);  // value 0
  }

  static LogReal zero(mpfr_prec_t prec) { return LogReal(prec); }
  static LogReal one(mpfr_prec_t prec) {
    LogReal v(prec);
    mpfr_set_zero(v.log2_.get(), 1);
    return v;
  }
  // value 2^e
  static LogReal pow2(const Real& e, mpfr_prec_t prec) {
    LogReal v(prec);
    mpfr_set(v.log2_.get(), e.get(), MPFR_RNDN);
    return v;
  }
  static LogReal pow2(const Real& e, Rounding rnd, mpfr_prec_t prec) {
    LogReal v(prec);
    mpfr_set(v.log2_.get(), e.get(), mpfr_dir(rnd));
    return v;
  }
  static LogReal of_double(double x, Rounding rnd, mpfr_prec_t prec);
  static LogReal of_mpz(const mpz_class& n, Rounding rnd, mpfr_prec_t prec);

  bool is_zero() const { return mpfr_inf_p(log2_.get()) && mpfr_sgn(log2_.get()) < 0; }
  const Real& log2() const { return log2_; }
  Real& log2() { return log2_; }
  double log2_d() const { return log2_.to_double(); }
  mpfr_prec_t prec() const { return log2_.prec(); }
  int cmp(const LogReal& o) const { return mpfr_cmp(log2_.get(), o.log2_.get()); }
  std::string str(int digits = 20) const;
  // plain value as a double (0 or inf on under/overflow)
  double value_d() const;

 private:
  Real log2_;
};

// log2(1 - 2^{-e}) for e > 0 (the dedicated complement primitive) and
// log2(1 + 2^{-e}); both directed in the result and valid for any magnitude
// of e, degrading gracefully at the representation floor.
Real log2_one_minus_pow2(const Real& e, Rounding rnd);
Real log2_one_plus_pow2(const Real& e, Rounding rnd);

LogReal vadd(const LogReal& a, const LogReal& b, Rounding rnd);
// a - b; requires a >= b (throws otherwise); result 0 when indistinguishable
LogReal vsub(const LogReal& a, const LogReal& b, Rounding rnd);
LogReal vmul(const LogReal& a, const LogReal& b, Rounding rnd);
LogReal vdiv(const LogReal& a, const LogReal& b, Rounding rnd);
// a * 2^e
LogReal mul_pow2(const LogReal& a, const Real& e, Rounding rnd);
// a^k for integer k >= 0
LogReal vpow_ui(const LogReal& a, unsigned long k, Rounding rnd);
// the value of a as a plain real (exponent use); requires |log2 a| moderate
Real to_real(const LogReal& a, Rounding rnd);

// value enclosure [lo, hi]
struct Enc {
  LogReal lo, hi;
  explicit Enc(mpfr_prec_t prec = 256) : lo(prec), hi(prec) {}
  Enc(LogReal l, LogReal h) : lo(std::move(l)), hi(std::move(h)) {}
  static Enc exact(LogReal v) { return Enc(v, v); }
  bool contains(const LogReal& v) const { return lo.cmp(v) <= 0 && v.cmp(hi) <= 0; }
  double log2_width() const;
};

Enc eadd(const Enc& a, const Enc& b);
Enc esub(const Enc& a, const Enc& b);  // clamps the lower end at 0
Enc emul(const Enc& a, const Enc& b);
Enc ediv(const Enc& a, const Enc& b);
Enc emul_pow2(const Enc& a, const Real& e_lo, const Real& e_hi);

}  // namespace qdw
