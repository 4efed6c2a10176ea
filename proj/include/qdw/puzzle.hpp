#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qdw/quadmap.hpp"

namespace qdw {

struct RealTrace {
  double left = 0.0, right = 0.0;
  double width() const { return right - left; }
  double mid() const { return 0.5 * (left + right); }
  bool contains(double x) const { return left < x && x < right; }
  // distance from x to the nearest endpoint; negative outside
  double interior_margin(double x) const {
    return std::min(x - left, right - x);
  }
};

// Cantor-set data of the third-iterate return system on the central piece:
// the two monotone preimage intervals Y (negative side, carrying the landing
// point of the 7/24 ray on its boundary) and Y~, the interior fixed points p
// (in Y) and p+ (in Y~) of g = f^3, the 2-periodic point p- of g in Y~, their
// multipliers, and the derived ratio theta and exponent xi.
struct CantorData {
  double c = 0.0;
  RealTrace Y, Y_tilde;
  double p = 0.0, p_plus = 0.0, p_minus = 0.0;
  double mult_p = 0.0;           // |Dg(p)|
  double mult_p_plus = 0.0;      // |Dg(p+)|
  double mult_p_minus_sq = 0.0;  // |Dg^2(p-)|
  double theta = 0.0;            // sqrt(mult_p / mult_p_plus)
  double xi = 0.0;               // log(delta2) / (2 log theta); inf when theta <= 1
  double delta2 = 2.0;
  bool ray_disambiguated = true;  // false when the multiplier fallback was used
  double gamma = 0.0;             // landing point of the 7/24 ray when traced
};

// Real trace (alpha, -alpha) of the central puzzle piece.  c in [-2, -3/4).
RealTrace central_trace(double c);

enum class ComponentLabeling { by_ray, by_multiplier, by_sign };

CantorData cantor_data(double c, double delta2 = 2.0,
                       ComponentLabeling labeling = ComponentLabeling::by_ray);

struct ItineraryPrefix {
  std::vector<int> symbols;  // 0 = point in Y, 1 = point in Y~
  int n = 0;
  int certified_steps = 0;
};

// Symbols of the critical-value orbit sampled every third iterate from
// time n.  Steps closer than the membership tolerance to a trace boundary
// (default 1e-9) are uncertified, as is everything after the first such step.
ItineraryPrefix critical_itinerary(double c, int n, int k_max,
                                   const CantorData& cd,
                                   double membership_tol = 1e-9);
ItineraryPrefix critical_itinerary(double c, int n, int k_max);

struct KnReport {
  bool ordering_ok = false;
  int ordering_checked = 0;    // number of chain inequalities verified
  int ordering_failure_index = -1;
  bool confinement_ok = false;
  int confined_steps = 0;      // k with the orbit point certified in Y u Y~
  bool pass = false;
};

// Checks the strict positive-decreasing chain of the critical-value orbit
// exactly in floating point, then certifies finite-depth confinement of the
// every-third-iterate orbit to Y u Y~ as a proxy for the invariant-set clause.
KnReport kn_membership(double c, int n, int k_max);
KnReport kn_membership(double c, int n, int k_max, const CantorData& cd);

struct ParameterBracket {
  int n = 0;
  double lo = 0.0, hi = 0.0;
  std::vector<int> target_prefix;
};

// Finds a parameter whose critical itinerary starts with target_prefix
// (continued by zeros while narrowing), by scan-then-bisect on the first
// uncertified-or-mismatched symbol.  Bracket width at termination < 1e-13.
double find_parameter(int n, const std::vector<int>& target_prefix, int depth,
                      ParameterBracket* bracket_out = nullptr);

}  // namespace qdw
