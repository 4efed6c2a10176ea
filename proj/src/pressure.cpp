#include "qdw/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qdw/potential.hpp"

namespace qdw {

namespace {

void require_standard(const QuadraticMap& map, const char* who) {
  if (!map.is_standard())
    throw std::domain_error(std::string(who) + ": the inducing scheme is built on the standard family");
}

// real crossing of the level-1 equipotential on the positive axis
double equipotential_crossing(double c) {
  QuadraticMap m = QuadraticMap::standard_map(cplx(c, 0.0));
  double beta = fixed_points(m).beta.real();
  double lo = beta + 1e-9, hi = beta + 10.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double g = green_potential(m, cplx(mid, 0.0), 1e-12).value;
    (g < 1.0 ? lo : hi) = mid;
    if (hi - lo < 1e-13) break;
  }
  return 0.5 * (lo + hi);
}

struct PieceTower {
  double c = 0.0;
  double alpha = 0.0, beta = 0.0;
  double eq1 = 0.0;                  // equipotential-1 crossing
  std::vector<double> crit_orbit;    // v[j] = f^j(0)
};

PieceTower make_tower(double c, int orbit_len) {
  PieceTower tw;
  tw.c = c;
  FixedPointPair fp = fixed_points(QuadraticMap::standard_map(cplx(c, 0.0)));
  tw.alpha = fp.alpha.real();
  tw.beta = fp.beta.real();
  tw.eq1 = equipotential_crossing(c);
  tw.crit_orbit.resize(orbit_len + 1);
  tw.crit_orbit[0] = 0.0;
  for (int j = 1; j <= orbit_len; ++j)
    tw.crit_orbit[j] = tw.crit_orbit[j - 1] * tw.crit_orbit[j - 1] + c;
  return tw;
}

// trace of the depth-d puzzle piece of the critical point, obtained by
// pulling the depth-0 piece back along the critical orbit
RealTrace central_piece_trace(const PieceTower& tw, int depth) {
  if (depth == 0)
    return {tw.alpha, tw.eq1};  // the piece of 0 at depth 0 is the beta-side one
  // start from the depth-0 piece of v_depth and pull back through
  // v_{depth-1}, ..., v_1, 0
  double vj = tw.crit_orbit[depth];
  RealTrace q;
  q = vj > tw.alpha ? RealTrace{tw.alpha, tw.eq1} : RealTrace{-tw.eq1, tw.alpha};
  for (int j = depth - 1; j >= 0; --j) {
    double target = tw.crit_orbit[j];
    double lmc = q.left - tw.c;
    double rmc = q.right - tw.c;
    if (rmc <= 0.0)
      throw std::runtime_error("central_piece_trace: empty pullback");
    RealTrace next;
    if (lmc <= 0.0) {
      double s = std::sqrt(rmc);
      next = {-s, s};
    } else if (target >= 0.0) {
      next = {std::sqrt(lmc), std::sqrt(rmc)};
    } else {
      next = {-std::sqrt(rmc), -std::sqrt(lmc)};
    }
    if (!(next.left <= target && target <= next.right))
      throw std::runtime_error("central_piece_trace: pullback lost the orbit point");
    q = next;
  }
  return q;
}

double log_abs_deriv_iter(double c, double x, int m) {
  double acc = 0.0;
  for (int j = 0; j < m; ++j) {
    acc += std::log(std::abs(2.0 * x));
    x = x * x + c;
  }
  return acc;
}

BranchInventory enumerate_branches(double c, int n, int time_cap,
                                   double distortion_margin, InventoryKind kind) {
  if (time_cap < 0 || time_cap > 40)
    throw std::invalid_argument("enumerate_branches: time_cap in [0, 40]");
  if (distortion_margin <= 1.0)
    throw std::invalid_argument("enumerate_branches: distortion margin > 1");

  BranchInventory inv;
  inv.kind = kind;
  inv.c = c;
  inv.n = n;
  inv.time_cap = time_cap;
  inv.complete_up_to = time_cap;
  inv.distortion_margin = distortion_margin;
  inv.V_trace = return_target_trace(c, n);
  const double v = inv.V_trace.right;

  // central-piece radii for level assignment
  PieceTower tw = make_tower(c, time_cap + n + 4);
  for (int k = 0; 3 * k + n + 2 <= time_cap + n + 3; ++k) {
    RealTrace piece = central_piece_trace(tw, n + 3 * k + 2);
    inv.central_radius.push_back(piece.right);
    if (piece.right < 1e-14) break;
  }

  struct Node {
    double lo, hi;
    std::string word;
  };
  std::vector<Node> active = {{-v, v, ""}};
  const double amb_tol = 1e-12;

  for (int m = 1; m <= time_cap; ++m) {
    std::vector<Node> next;
    next.reserve(active.size() * 2);
    for (const Node& nd : active) {
      double umc = nd.lo - c;
      double wmc = nd.hi - c;
      if (wmc <= amb_tol) continue;  // below the critical value: no real preimages
      if (umc <= amb_tol) {
        // the critical value is inside (or touching) this interval; for
        // certified parameters this never happens before the cap
        ++inv.flagged_pullbacks;
        inv.complete_up_to = std::min(inv.complete_up_to, m - 1);
        continue;
      }
      double su = std::sqrt(umc), sw = std::sqrt(wmc);
      Node children[2] = {{su, sw, nd.word + '+'}, {-sw, -su, nd.word + '-'}};
      for (Node& child : children) {
        double mid = 0.5 * (child.lo + child.hi);
        bool inside = std::abs(mid) < v;
        // sanity: puzzle nesting means containment or disjointness
        bool contained = child.lo >= -v - amb_tol && child.hi <= v + amb_tol;
        bool disjoint = child.hi <= -v + amb_tol || child.lo >= v - amb_tol;
        if (inside && !contained) {
          ++inv.flagged_pullbacks;
          inv.complete_up_to = std::min(inv.complete_up_to, m - 1);
          continue;
        }
        if (!inside && !disjoint) {
          ++inv.flagged_pullbacks;
          inv.complete_up_to = std::min(inv.complete_up_to, m - 1);
          continue;
        }
        bool record = inside ? (kind == InventoryKind::first_return)
                             : (kind == InventoryKind::first_landing);
        if (record) {
          Branch br;
          br.word = child.word;
          br.return_time = m;
          br.trace = {child.lo, child.hi};
          double samples[3] = {child.lo, mid, child.hi};
          double dmin = 1e300, dmax = -1e300;
          for (double x : samples) {
            double ld = log_abs_deriv_iter(c, x, m);
            dmin = std::min(dmin, ld);
            dmax = std::max(dmax, ld);
          }
          br.log_deriv_min = dmin - std::log(distortion_margin);
          br.log_deriv_max = dmax + std::log(distortion_margin);
          br.level = -1;
          for (std::size_t k = 0; k < inv.central_radius.size(); ++k) {
            if (std::abs(mid) < inv.central_radius[k] &&
                child.lo >= -inv.central_radius[k] && child.hi <= inv.central_radius[k])
              br.level = static_cast<int>(k);
            else
              break;
          }
          inv.branches.push_back(std::move(br));
        }
        if (!inside) next.push_back(std::move(child));
      }
    }
    active = std::move(next);
  }
  return inv;
}

}  // namespace

RealTrace return_target_trace(double c, int n) {
  if (n < 1) throw std::invalid_argument("return_target_trace: n >= 1");
  FixedPointPair fp = fixed_points(QuadraticMap::standard_map(cplx(c, 0.0)));
  double alpha = fp.alpha.real();
  // t_k: right end of the depth-k piece chain toward beta; the piece of
  // -beta at depth n has right end -t_n, and V is its central pullback
  double t = alpha;
  for (int k = 0; k < n; ++k) {
    double tmc = t - c;
    if (tmc <= 0.0) throw std::runtime_error("return_target_trace: chain left the real line");
    t = std::sqrt(tmc);
  }
  double a_n = -t;
  if (a_n - c <= 0.0)
    throw std::domain_error(
        "return_target_trace: the critical value is outside the depth-n piece of -beta "
        "(parameter incompatible with this n)");
  double v = std::sqrt(a_n - c);
  return {-v, v};
}

BranchInventory enumerate_return_branches(double c, int n, int time_cap,
                                          double distortion_margin) {
  return enumerate_branches(c, n, time_cap, distortion_margin, InventoryKind::first_return);
}

BranchInventory enumerate_landing_branches(double c, int n, int time_cap,
                                           double distortion_margin) {
  return enumerate_branches(c, n, time_cap, distortion_margin, InventoryKind::first_landing);
}

double peierls_margin(const BranchInventory& landing, double chi_crit, double upsilon) {
  if (landing.kind != InventoryKind::first_landing)
    throw std::invalid_argument("peierls_margin: needs a first-landing inventory");
  if (landing.complete_up_to < landing.n + 3)
    throw std::invalid_argument("peierls_margin: inventory incomplete below n+3");
  double margin = 1e300;
  for (const Branch& br : landing.branches)
    margin = std::min(margin,
                      br.log_deriv_min - (chi_crit / 2.0 + upsilon) * br.return_time);
  if (landing.branches.empty())
    throw std::runtime_error("peierls_margin: empty inventory");
  return margin;
}

namespace {

double branch_log_deriv(const Branch& br, DerivBound use) {
  switch (use) {
    case DerivBound::inf_deriv: return br.log_deriv_min;
    case DerivBound::sup_deriv: return br.log_deriv_max;
    default: return 0.5 * (br.log_deriv_min + br.log_deriv_max);
  }
}

}  // namespace

double log_partition_function(const BranchInventory& ret, double t, double p,
                              DerivBound use) {
  if (ret.branches.empty())
    throw std::invalid_argument("log_partition_function: empty inventory");
  double mx = -1e300;
  for (const Branch& br : ret.branches)
    mx = std::max(mx, -br.return_time * p - t * branch_log_deriv(br, use));
  double s = 0.0;
  for (const Branch& br : ret.branches)
    s += std::exp(-br.return_time * p - t * branch_log_deriv(br, use) - mx);
  return mx + std::log(s);
}

PressureBracket bowen_pressure(const BranchInventory& ret, double t, double tolerance) {
  if (ret.kind != InventoryKind::first_return)
    throw std::invalid_argument("bowen_pressure: needs a first-return inventory");
  for (const Branch& br : ret.branches)
    if (br.log_deriv_min <= 0.0)
      throw std::domain_error("bowen_pressure: the return map is not certified uniformly expanding");
  auto S = [&](double p) { return log_partition_function(ret, t, p, DerivBound::mid_deriv); };

  double p_hi = 0.0;
  int guard = 0;
  while (S(p_hi) > 0.0 && ++guard < 200) p_hi += 0.5;
  double p_lo = p_hi - 0.5;
  guard = 0;
  while (S(p_lo) < 0.0 && ++guard < 400) {
    p_hi = p_lo;
    p_lo -= 0.5;
  }
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (p_lo + p_hi);
    double s = S(mid);
    (s > 0.0 ? p_lo : p_hi) = mid;
    if (p_hi - p_lo < tolerance && std::abs(S(0.5 * (p_lo + p_hi))) < tolerance) break;
  }
  PressureBracket pb;
  pb.t = t;
  pb.p_low = p_lo;
  pb.p_high = p_hi;
  double mid = 0.5 * (p_lo + p_hi);
  pb.consistency = S(mid);
  pb.enclosure_low = log_partition_function(ret, t, mid, DerivBound::sup_deriv);
  pb.enclosure_high = log_partition_function(ret, t, mid, DerivBound::inf_deriv);
  return pb;
}

namespace {

struct TreeSum {
  // streaming log-sum-exp
  double mx = -1e300;
  double s = 0.0;
  void add(double x) {
    if (x <= mx) {
      s += std::exp(x - mx);
    } else {
      s = s * std::exp(mx - x) + 1.0;
      mx = x;
    }
  }
  double log_total() const { return mx + std::log(s); }
};

void preimage_dfs(const QuadraticMap& map, cplx y, double logd, int depth,
                  int j_max, double t, bool complex_tree, TreeSum* acc) {
  if (depth == j_max) {
    acc->add(-t * logd);
    return;
  }
  cplx c = map.c;
  if (map.is_standard()) {
    cplx d = y - c;
    if (!complex_tree) {
      double dr = d.real();
      if (std::abs(d.imag()) > 1e-12) return;
      if (dr < 0.0) return;  // no real preimages below the critical value
      double s = std::sqrt(dr);
      for (double child : {s, -s}) {
        double ad = std::abs(2.0 * child);
        if (ad < 1e-12 && t != 0.0)
          throw std::runtime_error("preimage_pressure: critical preimage at depth " +
                                   std::to_string(depth + 1));
        double step = (t == 0.0) ? 0.0 : std::log(ad);
        preimage_dfs(map, cplx(child, 0.0), logd + step, depth + 1, j_max, t,
                     complex_tree, acc);
      }
      return;
    }
    cplx s = std::sqrt(d);
    for (cplx child : {s, -s}) {
      double ad = std::abs(2.0 * child);
      if (ad < 1e-12 && t != 0.0)
        throw std::runtime_error("preimage_pressure: critical preimage at depth " +
                                 std::to_string(depth + 1));
      double step = (t == 0.0) ? 0.0 : std::log(ad);
      preimage_dfs(map, child, logd + step, depth + 1, j_max, t, complex_tree, acc);
    }
    return;
  }
  // deformed map: Newton from the quadratic-like seeds
  cplx seed0 = std::sqrt(y - c);
  cplx roots[2];
  for (int b = 0; b < 2; ++b) {
    cplx z = b == 0 ? seed0 : -seed0;
    bool ok = false;
    for (int it = 0; it < 60; ++it) {
      cplx r = map.eval(z) - y;
      cplx dz = map.deriv(z);
      if (std::abs(dz) < 1e-300) break;
      z -= r / dz;
      if (std::abs(r) < 1e-12 * (1.0 + std::abs(y))) {
        ok = true;
        break;
      }
    }
    if (!ok)
      throw std::runtime_error("preimage_pressure: Newton failed at depth " +
                               std::to_string(depth + 1));
    roots[b] = z;
  }
  if (std::abs(roots[0] - roots[1]) < 1e-10 && t != 0.0)
    throw std::runtime_error("preimage_pressure: preimages collapsed at depth " +
                             std::to_string(depth + 1));
  for (cplx child : roots) {
    if (!complex_tree && std::abs(child.imag()) > 1e-10) continue;
    double ad = std::abs(map.deriv(child));
    if (ad < 1e-12 && t != 0.0)
      throw std::runtime_error("preimage_pressure: critical preimage at depth " +
                               std::to_string(depth + 1));
    double step = (t == 0.0) ? 0.0 : std::log(ad);
    preimage_dfs(map, child, logd + step, depth + 1, j_max, t, complex_tree, acc);
  }
}

}  // namespace

double preimage_pressure(const QuadraticMap& map, double t, int j_max,
                         bool complex_tree) {
  if (j_max < 1 || j_max > 24)
    throw std::invalid_argument("preimage_pressure: j_max in [1, 24]");
  // base point: the critical point unless its own orbit revisits it (the
  // superattracting case), then the repelling fixed point beta
  cplx base(0.0, 0.0);
  {
    cplx z = base;
    bool degenerate = false;
    for (int j = 0; j < j_max; ++j) {
      z = map.eval(z);
      if (std::abs(z) < 1e-9) {
        degenerate = true;
        break;
      }
      if (std::abs(z) > 1e8) break;
    }
    if (degenerate) base = fixed_points(map).beta;
  }
  TreeSum acc;
  preimage_dfs(map, base, 0.0, 0, j_max, t, complex_tree, &acc);
  return acc.log_total() / j_max;
}

SeriesEstimate postcritical_series(const QuadraticMap& map, int n, double t,
                                   double p, int k_max) {
  require_standard(map, "postcritical_series");
  double c = map.c.real();
  CantorData cd = cantor_data(c);
  // precondition: the sampled critical orbit is confined to the two traces
  KnReport kn = kn_membership(c, n, k_max, cd);
  if (!kn.confinement_ok)
    throw std::domain_error("postcritical_series: critical orbit not certified in Y u Y~ to depth " +
                            std::to_string(k_max));

  SeriesEstimate est;
  std::vector<double> terms;
  double x = c;  // f(0)
  double logd = 0.0;
  int m = 0;
  for (int k = 0; k <= k_max; ++k) {
    int target = n + 3 * k;
    while (m < target) {
      logd += std::log(std::abs(2.0 * x));
      x = x * x + c;
      ++m;
    }
    terms.push_back(-target * p - 0.5 * t * logd);
  }
  double mx = *std::max_element(terms.begin(), terms.end());
  double s = 0.0;
  for (double term : terms) s += std::exp(term - mx);
  est.log_value = mx + std::log(s);
  est.terms_used = static_cast<int>(terms.size());

  if (terms.size() >= 6) {
    double worst_ratio = 0.0;
    for (std::size_t i = terms.size() - 5; i < terms.size(); ++i)
      worst_ratio = std::max(worst_ratio, std::exp(terms[i] - terms[i - 1]));
    if (worst_ratio < 0.9) {
      est.tail_certified = true;
      est.log_tail_bound =
          terms.back() + std::log(worst_ratio / (1.0 - worst_ratio));
    }
  }
  if (!est.tail_certified) est.log_tail_bound = std::numeric_limits<double>::infinity();
  return est;
}

GibbsMassReport gibbs_mass_report(const BranchInventory& ret, const CantorData& cd,
                                  double t, double p, double radius) {
  if (ret.kind != InventoryKind::first_return)
    throw std::invalid_argument("gibbs_mass_report: needs a first-return inventory");
  GibbsMassReport rep;
  rep.t = t;
  rep.p = p;
  rep.radius = radius;

  const double c = ret.c;
  auto orbit_of = [&](double x, int period) {
    std::vector<double> o(period);
    for (int j = 0; j < period; ++j) {
      o[j] = x;
      x = x * x + c;
    }
    return o;
  };
  std::vector<double> op = orbit_of(cd.p, 3);
  std::vector<double> opp = orbit_of(cd.p_plus, 3);
  std::vector<double> opm = orbit_of(cd.p_minus, 6);

  double mx = -1e300;
  for (const Branch& br : ret.branches) {
    double lw = -p * br.return_time - t * 0.5 * (br.log_deriv_min + br.log_deriv_max);
    mx = std::max(mx, lw + std::log(static_cast<double>(br.return_time)));
  }
  double z = 0.0;
  for (const Branch& br : ret.branches) {
    double lw = -p * br.return_time - t * 0.5 * (br.log_deriv_min + br.log_deriv_max);
    z += std::exp(lw + std::log(static_cast<double>(br.return_time)) - mx);
  }
  if (!(z > 0.0) || !std::isfinite(mx))
    throw std::runtime_error("gibbs_mass_report: normalization underflow; increase precision");
  double logz = mx + std::log(z);

  auto near = [&](double x, const std::vector<double>& orbit) {
    for (double q : orbit)
      if (std::abs(x - q) <= radius) return true;
    return false;
  };

  double mass_union = 0.0;
  for (const Branch& br : ret.branches) {
    double lw = -p * br.return_time - t * 0.5 * (br.log_deriv_min + br.log_deriv_max);
    double w = std::exp(lw - logz);  // weight of each spread point
    double x = br.trace.mid();
    for (int j = 0; j < br.return_time; ++j) {
      bool a = near(x, op), b = near(x, opp), d = near(x, opm);
      if (a) rep.mass_p_orbit += w;
      if (b) rep.mass_p_plus_orbit += w;
      if (d) rep.mass_p_minus_orbit += w;
      if (b || d) mass_union += w;
      if (!a && !b && !d) rep.mass_elsewhere += w;
      ++rep.spread_points;
      x = x * x + c;
    }
  }
  rep.mass_plus_minus_union = mass_union;
  return rep;
}

}  // namespace qdw
