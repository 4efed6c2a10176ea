#pragma once

#include <string>
#include <vector>

#include "qdw/logreal.hpp"

namespace qdw {

// Index partition driven by the tower endpoints a_s = 2^{q s^3}:
// short blocks I_s = [a_s, b_s) of linear length and long blocks
// J_s = [b_s, a_{s+1}) of tower length, with the associated counters.
struct PartitionScheme {
  double xi = 1.0;
  long Xi = 3;  // ceil(2 xi) + 1 in lemma mode
  long q = 200;
  bool lemma_mode = true;
  mpfr_prec_t precision_bits = 256;

  // lemma-verification scheme: Xi = ceil(2 xi) + 1, q = 50 (Xi + 1)
  static PartitionScheme lemma(double xi, mpfr_prec_t prec = 256);
  // like lemma(), but q is bumped so q + Xi is even (itinerary schemes)
  static PartitionScheme scheduled(double xi, mpfr_prec_t prec = 256);
  // free choice of Xi and q (oracle mode; blocks may need clamping)
  static PartitionScheme custom(double xi, long Xi, long q, mpfr_prec_t prec = 256);
};

struct BlockEndpoints {
  mpz_class a, b;      // a_s and b_s, exact
  mpz_class I_len;     // q(2s+1) + Xi
  mpz_class J_len;     // a_{s+1} - b_s (may be <= 0 for degenerate schemes)
};
BlockEndpoints partition_endpoints(const PartitionScheme& ps, long s);

struct Counters {
  mpz_class N;  // zero-symbol count before k
  long B = 0;   // block count at k
  long s = 0;
  bool in_I = false;
};
Counters block_counters(const PartitionScheme& ps, const mpz_class& k);

// 1/|J_s| as a value enclosure; real s uses the real-exponent formulas
Enc lambda_of_s(const PartitionScheme& ps, double s);

struct BlockSums {
  long s = 0;
  Enc I_plus, I_minus, J_plus, J_minus;
  Enc tildeI_plus, tildeJ_plus;  // k-weighted
  Enc hatJ_plus, hatJ_minus;     // offset-weighted upper part of J_s
  BlockSums(mpfr_prec_t prec)
      : I_plus(prec), I_minus(prec), J_plus(prec), J_minus(prec),
        tildeI_plus(prec), tildeJ_plus(prec), hatJ_plus(prec), hatJ_minus(prec) {}
};
// closed-form block sums for integer s; lambda as a value enclosure
BlockSums block_sums(const PartitionScheme& ps, long s, double tau, const Enc& lambda);

struct SeriesTotals {
  Enc pi_plus, pi_minus, tilde_pi_plus;
  bool tail_certified = false;
  LogReal tail_bound;  // certified upper bound on everything past s_max
  long s_max = 0;
  SeriesTotals(mpfr_prec_t prec)
      : pi_plus(prec), pi_minus(prec), tilde_pi_plus(prec), tail_bound(prec) {}
};
SeriesTotals series_totals(const PartitionScheme& ps, double tau, const Enc& lambda,
                           long s_max);

struct LemmaCheck {
  std::string name;
  double tau = 0.0;
  double s = 0.0;
  bool pass = false;
  double margin_log2 = 0.0;  // log2(RHS/LHS) for <= claims, positive = pass
  std::string detail;
};
// machine verification of the partition lemmas: the endpoint comparisons
// (exact big-integer), the two-sided series bounds at lambda(tau-1) and
// lambda(tau), and the weighted-series domination chain
std::vector<LemmaCheck> verify_appendix_lemmas(const PartitionScheme& ps,
                                               const std::vector<double>& tau_grid,
                                               const std::vector<double>& s_grid);

struct OracleSums {
  LogReal plus, minus;
  bool complete = true;  // k range covered at least one full block
  OracleSums(mpfr_prec_t prec) : plus(prec), minus(prec) {}
};
// term-by-term summation of 2^{-lambda k - tau N(k) +- xi tau B(k)} over
// k in [k_from, k_to], via block_counters at each k
OracleSums brute_force_oracle(const PartitionScheme& ps, double tau, double lambda,
                              const mpz_class& k_from, const mpz_class& k_to,
                              Rounding rnd);

}  // namespace qdw
