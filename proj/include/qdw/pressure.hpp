#pragma once

#include <string>
#include <vector>

#include "qdw/puzzle.hpp"
#include "qdw/quadmap.hpp"

namespace qdw {

// One monotone inverse branch of the first-return or first-landing map to
// the central-return interval V: the interval it occupies, the time it takes
// to reach V, its depth level in the central-piece tower, and natural-log
// bounds for |DF| = |Df^m| on it.
struct Branch {
  std::string word;  // inverse-branch signs, step by step from V backwards
  int return_time = 0;
  RealTrace trace;
  int level = 0;
  double log_deriv_min = 0.0;
  double log_deriv_max = 0.0;
};

enum class InventoryKind { first_return, first_landing };

struct BranchInventory {
  InventoryKind kind = InventoryKind::first_return;
  double c = 0.0;
  int n = 0;
  RealTrace V_trace;
  std::vector<Branch> branches;
  int time_cap = 0;
  int complete_up_to = 0;  // all branches with return_time <= this are present
  int flagged_pullbacks = 0;
  std::vector<double> central_radius;  // trace radius of the level pieces
  double distortion_margin = 1.5;
};

// Real trace of the return target V = the (n+1)-fold central pullback along
// the critical-value branch.
RealTrace return_target_trace(double c, int n);

BranchInventory enumerate_return_branches(double c, int n, int time_cap,
                                          double distortion_margin = 1.5);
BranchInventory enumerate_landing_branches(double c, int n, int time_cap,
                                           double distortion_margin = 1.5);

// log of the empirical landing-derivative margin constant: the minimum over
// landing branches of log_deriv_min - (chi_crit/2 + upsilon) * m.
double peierls_margin(const BranchInventory& landing, double chi_crit,
                      double upsilon);

enum class DerivBound { inf_deriv, sup_deriv, mid_deriv };

// log of sum over branches of exp(-m p) * bound(|DF|)^{-t}; the inf_deriv /
// sup_deriv variants enclose the distortion-free value from both sides.
double log_partition_function(const BranchInventory& ret, double t, double p,
                              DerivBound use);

struct PressureBracket {
  double t = 0.0;
  double p_low = 0.0, p_high = 0.0;
  double consistency = 0.0;  // midpoint partition-function log at the bracket mid
  double enclosure_low = 0.0, enclosure_high = 0.0;
};

// Bisection in p on the sign of the midpoint partition-function log; the
// enclosure variants at the returned midpoint are reported alongside.
PressureBracket bowen_pressure(const BranchInventory& ret, double t,
                               double tolerance = 1e-8);

// (1/j_max) log sum over the depth-j_max preimage tree of the base point of
// |Df^j|^{-t}.  The base point is the repelling fixed point beta when the
// critical orbit passes through the default base, otherwise the critical
// point itself.
double preimage_pressure(const QuadraticMap& map, double t, int j_max,
                         bool complex_tree = true);

struct SeriesEstimate {
  double log_value = 0.0;  // natural log
  double log_tail_bound = 0.0;
  bool tail_certified = false;
  int terms_used = 0;
};

// Natural-log value of the postcritical series
// sum_k exp(-(n+3k) p) |Df^{n+3k}(f(0))|^{-t/2}, k = 0..k_max, with a
// geometric tail estimate from the observed decay of the last terms.
SeriesEstimate postcritical_series(const QuadraticMap& map, int n, double t,
                                   double p, int k_max);

struct GibbsMassReport {
  double t = 0.0, p = 0.0, radius = 0.0;
  double mass_p_orbit = 0.0;
  double mass_p_plus_orbit = 0.0;
  double mass_p_minus_orbit = 0.0;
  double mass_plus_minus_union = 0.0;  // near the p+ orbit or the p- orbit
  double mass_elsewhere = 0.0;
  long spread_points = 0;
};

// Branch weights exp(-p m) |DF|^{-t} (midpoint derivative), normalized and
// spread uniformly over the forward images of the branch midpoints; reports
// the mass within the given radius of the three marked orbits.
GibbsMassReport gibbs_mass_report(const BranchInventory& ret,
                                  const CantorData& cd, double t, double p,
                                  double radius);

}  // namespace qdw
