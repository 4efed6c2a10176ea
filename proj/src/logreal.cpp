#include "qdw/logreal.hpp"

#include <cmath>
#include <stdexcept>

namespace qdw {

LogReal LogReal::of_double(double x, Rounding rnd, mpfr_prec_t prec) {
  if (x < 0.0) throw std::domain_error("LogReal: negative value");
  LogReal v(prec);
  if (x == 0.0) return v;
  Real t = Real::of(x, prec);
  mpfr_log2(v.log2_.get(), t.get(), mpfr_dir(rnd));
  return v;
}

LogReal LogReal::of_mpz(const mpz_class& n, Rounding rnd, mpfr_prec_t prec) {
  if (n < 0) throw std::domain_error("LogReal: negative value");
  LogReal v(prec);
  if (n == 0) return v;
  // log2 of an integer: exact conversion first at enough precision
  mpfr_t t;
  mpfr_init2(t, std::max<mpfr_prec_t>(prec, mpz_sizeinbase(n.get_mpz_t(), 2) + 2));
  mpfr_set_z(t, n.get_mpz_t(), MPFR_RNDN);  // exact at that precision
  mpfr_log2(v.log2_.get(), t, mpfr_dir(rnd));
  mpfr_clear(t);
  return v;
}

std::string LogReal::str(int digits) const {
  if (is_zero()) return "0 (log2 = -inf)";
  char* s = nullptr;
  mpfr_asprintf(&s, "%.*Rg", digits, log2_.get());
  std::string out = std::string("2^") + s;
  mpfr_free_str(s);
  return out;
}

double LogReal::value_d() const {
  if (is_zero()) return 0.0;
  double l2 = log2_d();
  if (l2 < -1074.0) return 0.0;
  if (l2 > 1024.0) return std::numeric_limits<double>::infinity();
  return std::exp2(l2);
}

namespace {

// w = 1 - exp(-e * ln 2) computed so the final log2 is directed in `rnd`;
// the result is increasing in e
void one_minus_core(mpfr_t out, const Real& e, Rounding rnd) {
  mpfr_prec_t prec = e.prec();
  mpfr_t ln2, u, w;
  mpfr_init2(ln2, prec + 8);
  mpfr_init2(u, prec + 8);
  mpfr_init2(w, prec + 8);
  // u = e*ln2, rounded down for a lower result, up for an upper
  mpfr_const_log2(ln2, mpfr_dir(rnd));
  mpfr_mul(u, e.get(), ln2, mpfr_dir(rnd));
  mpfr_neg(u, u, MPFR_RNDN);  // exact
  // w = -(expm1(-u')) = 1 - e^{-e ln2}; increasing in e, so the direction
  // carries through
  mpfr_expm1(w, u, mpfr_dir(opposite(rnd)));
  mpfr_neg(w, w, MPFR_RNDN);
  if (mpfr_sgn(w) <= 0) {
    mpfr_set_inf(out, -1);  // e rounded to 0: value complement is 0
  } else {
    mpfr_log2(out, w, mpfr_dir(rnd));
  }
  mpfr_clears(ln2, u, w, static_cast<mpfr_ptr>(nullptr));
}

void one_plus_core(mpfr_t out, const Real& e, Rounding rnd) {
  // log2(1 + 2^{-e}); decreasing in e, caller orients e accordingly
  mpfr_prec_t prec = e.prec();
  mpfr_t ln2, u, w;
  mpfr_init2(ln2, prec + 8);
  mpfr_init2(u, prec + 8);
  mpfr_init2(w, prec + 8);
  mpfr_const_log2(ln2, mpfr_dir(opposite(rnd)));
  mpfr_mul(u, e.get(), ln2, mpfr_dir(opposite(rnd)));
  mpfr_neg(u, u, MPFR_RNDN);
  mpfr_exp(w, u, mpfr_dir(rnd));  // 2^{-e}, directed with the result
  mpfr_add_ui(w, w, 1, mpfr_dir(rnd));
  mpfr_log2(out, w, mpfr_dir(rnd));
  mpfr_clears(ln2, u, w, static_cast<mpfr_ptr>(nullptr));
}

}  // namespace

Real log2_one_minus_pow2(const Real& e, Rounding rnd) {
  if (e.sgn() <= 0) throw std::domain_error("log2_one_minus_pow2: e > 0 required");
  Real out(e.prec());
  one_minus_core(out.get(), e, rnd);
  return out;
}

Real log2_one_plus_pow2(const Real& e, Rounding rnd) {
  Real out(e.prec());
  one_plus_core(out.get(), e, rnd);
  return out;
}

LogReal vadd(const LogReal& a, const LogReal& b, Rounding rnd) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const LogReal& x = a.cmp(b) >= 0 ? a : b;
  const LogReal& y = a.cmp(b) >= 0 ? b : a;
  mpfr_prec_t prec = std::max(x.prec(), y.prec());
  // result = x + log2(1 + 2^{-d}), d = x - y >= 0; decreasing in d
  Real d = rsub(x.log2(), y.log2(), rnd == Rounding::down ? Rounding::up
                                   : rnd == Rounding::up ? Rounding::down
                                                         : Rounding::nearest);
  if (d.sgn() < 0) mpfr_set_zero(d.get(), 1);
  Real corr = log2_one_plus_pow2(d, rnd);
  LogReal out(prec);
  mpfr_add(out.log2().get(), x.log2().get(), corr.get(), mpfr_dir(rnd));
  return out;
}

LogReal vsub(const LogReal& a, const LogReal& b, Rounding rnd) {
  if (b.is_zero()) return a;
  int cmp = a.cmp(b);
  if (cmp < 0) throw std::domain_error("vsub: negative value-space difference");
  mpfr_prec_t prec = std::max(a.prec(), b.prec());
  if (cmp == 0) return LogReal::zero(prec);
  // result = x + log2(1 - 2^{-d}), d = x - y > 0; increasing in d
  Real d = rsub(a.log2(), b.log2(), rnd);
  if (d.sgn() <= 0) return LogReal::zero(prec);  // only on a down-rounding
  Real corr = log2_one_minus_pow2(d, rnd);
  LogReal out(prec);
  if (mpfr_inf_p(corr.get())) return LogReal::zero(prec);
  mpfr_add(out.log2().get(), a.log2().get(), corr.get(), mpfr_dir(rnd));
  return out;
}

LogReal vmul(const LogReal& a, const LogReal& b, Rounding rnd) {
  mpfr_prec_t prec = std::max(a.prec(), b.prec());
  if (a.is_zero() || b.is_zero()) return LogReal::zero(prec);
  LogReal out(prec);
  mpfr_add(out.log2().get(), a.log2().get(), b.log2().get(), mpfr_dir(rnd));
  return out;
}

LogReal vdiv(const LogReal& a, const LogReal& b, Rounding rnd) {
  mpfr_prec_t prec = std::max(a.prec(), b.prec());
  if (b.is_zero()) throw std::domain_error("vdiv: division by zero value");
  if (a.is_zero()) return LogReal::zero(prec);
  LogReal out(prec);
  mpfr_sub(out.log2().get(), a.log2().get(), b.log2().get(), mpfr_dir(rnd));
  return out;
}

LogReal mul_pow2(const LogReal& a, const Real& e, Rounding rnd) {
  if (a.is_zero()) return a;
  LogReal out(std::max(a.prec(), e.prec()));
  mpfr_add(out.log2().get(), a.log2().get(), e.get(), mpfr_dir(rnd));
  return out;
}

LogReal vpow_ui(const LogReal& a, unsigned long k, Rounding rnd) {
  mpfr_prec_t prec = a.prec();
  if (k == 0) return LogReal::one(prec);
  if (a.is_zero()) return LogReal::zero(prec);
  LogReal out(prec);
  mpfr_mul_ui(out.log2().get(), a.log2().get(), k, mpfr_dir(rnd));
  return out;
}

Real to_real(const LogReal& a, Rounding rnd) {
  Real out(a.prec());
  if (a.is_zero()) {
    mpfr_set_zero(out.get(), 1);
    return out;
  }
  mpfr_exp2(out.get(), a.log2().get(), mpfr_dir(rnd));
  return out;
}

double Enc::log2_width() const {
  if (hi.is_zero()) return 0.0;
  if (lo.is_zero()) return std::numeric_limits<double>::infinity();
  Real d = rsub(hi.log2(), lo.log2(), Rounding::up);
  return d.to_double();
}

Enc eadd(const Enc& a, const Enc& b) {
  return Enc(vadd(a.lo, b.lo, Rounding::down), vadd(a.hi, b.hi, Rounding::up));
}

Enc esub(const Enc& a, const Enc& b) {
  LogReal lo = a.lo.cmp(b.hi) <= 0 ? LogReal::zero(a.lo.prec())
                                   : vsub(a.lo, b.hi, Rounding::down);
  LogReal hi = vsub(a.hi, b.lo, Rounding::up);
  return Enc(std::move(lo), std::move(hi));
}

Enc emul(const Enc& a, const Enc& b) {
  return Enc(vmul(a.lo, b.lo, Rounding::down), vmul(a.hi, b.hi, Rounding::up));
}

Enc ediv(const Enc& a, const Enc& b) {
  return Enc(vdiv(a.lo, b.hi, Rounding::down), vdiv(a.hi, b.lo, Rounding::up));
}

Enc emul_pow2(const Enc& a, const Real& e_lo, const Real& e_hi) {
  return Enc(mul_pow2(a.lo, e_lo, Rounding::down), mul_pow2(a.hi, e_hi, Rounding::up));
}

}  // namespace qdw
