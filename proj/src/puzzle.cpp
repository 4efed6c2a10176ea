#include "qdw/puzzle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qdw/potential.hpp"

namespace qdw {

namespace {

double f3(double c, double x) {
  double y = x * x + c;
  y = y * y + c;
  return y * y + c;
}

double df3(double c, double x) {
  double y1 = x * x + c;
  double y2 = y1 * y1 + c;
  return 8.0 * x * y1 * y2;
}

double f6(double c, double x) { return f3(c, f3(c, x)); }
double df6(double c, double x) { return df3(c, x) * df3(c, f3(c, x)); }

// solve h(x) = target on [lo, hi] where h is continuous and h(lo), h(hi)
// straddle target; bisection then Newton polish
template <class F, class DF>
double solve_on(F h, DF dh, double lo, double hi, double target) {
  double flo = h(lo) - target;
  double fhi = h(hi) - target;
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0))
    throw std::runtime_error("puzzle: no sign change on bracketing interval");
  double a = lo, b = hi;
  for (int it = 0; it < 200; ++it) {
    double m = 0.5 * (a + b);
    double fm = h(m) - target;
    if (fm == 0.0) { a = b = m; break; }
    if ((fm > 0) == (flo > 0)) { a = m; flo = fm; }
    else b = m;
    if (b - a < 1e-15 * (1.0 + std::abs(a))) break;
  }
  double x = 0.5 * (a + b);
  for (int it = 0; it < 8; ++it) {
    double d = dh(x);
    if (std::abs(d) < 1e-300) break;
    double step = (h(x) - target) / d;
    double xn = x - step;
    if (xn < lo || xn > hi) break;
    x = xn;
    if (std::abs(step) < 1e-16 * (1.0 + std::abs(x))) break;
  }
  return x;
}

// the two monotone sub-intervals of the central trace mapped onto it by f^3
std::vector<RealTrace> third_iterate_components(double c, const RealTrace& central) {
  const double a = central.left, b = central.right;
  // critical points of f^3 on the real line: 0, the preimages of 0, and the
  // second preimages of 0
  std::vector<double> cuts = {a, b};
  auto push = [&](double x) {
    if (x > a && x < b) cuts.push_back(x);
  };
  push(0.0);
  if (-c >= 0.0) {
    double r = std::sqrt(-c);
    push(r);
    push(-r);
    for (double s : {r, -r}) {
      double u = s - c;
      if (u >= 0.0) {
        double t = std::sqrt(u);
        push(t);
        push(-t);
      }
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double x, double y) { return std::abs(x - y) < 1e-14; }),
             cuts.end());

  std::vector<RealTrace> found;
  auto h = [&](double x) { return f3(c, x); };
  auto dh = [&](double x) { return df3(c, x); };
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double u = cuts[i], v = cuts[i + 1];
    double fu = f3(c, u), fv = f3(c, v);
    double lo = std::min(fu, fv), hi = std::max(fu, fv);
    // need the monotone image to cover the full central trace
    if (lo > a + 1e-13 || hi < b - 1e-13) continue;
    double xa = solve_on(h, dh, u, v, a);
    double xb = solve_on(h, dh, u, v, b);
    RealTrace t;
    t.left = std::min(xa, xb);
    t.right = std::max(xa, xb);
    if (t.width() > 1e-13) found.push_back(t);
  }
  return found;
}

}  // namespace

RealTrace central_trace(double c) {
  if (!(c >= -2.0 && c < -0.75))
    throw std::domain_error("central_trace: c must lie in [-2, -3/4)");
  FixedPointPair fp = fixed_points(QuadraticMap::standard_map(cplx(c, 0.0)));
  double alpha = fp.alpha.real();
  RealTrace t;
  t.left = alpha;
  t.right = -alpha;
  return t;
}

CantorData cantor_data(double c, double delta2, ComponentLabeling labeling) {
  if (delta2 <= 1.0) throw std::invalid_argument("cantor_data: delta2 > 1 required");
  RealTrace central = central_trace(c);
  std::vector<RealTrace> comps = third_iterate_components(c, central);
  if (comps.size() != 2)
    throw std::domain_error("cantor_data: expected 2 third-iterate components, found " +
                            std::to_string(comps.size()));
  std::sort(comps.begin(), comps.end(),
            [](const RealTrace& x, const RealTrace& y) { return x.left < y.left; });

  CantorData cd;
  cd.c = c;
  cd.delta2 = delta2;

  // refine the interior g-fixed point of a component
  auto fixed_in = [&](const RealTrace& t) {
    return solve_on([&](double x) { return f3(c, x) - x; },
                    [&](double x) { return df3(c, x) - 1.0; }, t.left, t.right, 0.0);
  };
  double fix_lo = fixed_in(comps[0]);
  double fix_hi = fixed_in(comps[1]);
  double mult_lo = std::abs(df3(c, fix_lo));
  double mult_hi = std::abs(df3(c, fix_hi));

  int y_index = 0;  // component carrying Y
  cd.ray_disambiguated = false;
  if (labeling == ComponentLabeling::by_ray) {
    RayPolyline ray = trace_external_ray(QuadraticMap::standard_map(cplx(c, 0.0)),
                                         Angle::of(7, 24), 1e-9);
    if (ray.landing_certified && ray.landing_point) {
      double g = ray.landing_point->real();
      cd.gamma = g;
      double d0 = std::min(std::abs(g - comps[0].left), std::abs(g - comps[0].right));
      double d1 = std::min(std::abs(g - comps[1].left), std::abs(g - comps[1].right));
      if (std::min(d0, d1) < 0.05 * central.width()) {
        y_index = d0 <= d1 ? 0 : 1;
        cd.ray_disambiguated = true;
      }
    }
  }
  if (!cd.ray_disambiguated) {
    if (labeling == ComponentLabeling::by_sign) {
      // near -2 the component carrying the 7/24 landing point is the
      // negative-side one; cheap variant used inside parameter scans
      y_index = comps[0].mid() < 0.0 ? 0 : 1;
    } else {
      // fallback: Y holds the fixed point with the larger multiplier
      y_index = mult_lo >= mult_hi ? 0 : 1;
    }
  }

  cd.Y = comps[y_index];
  cd.Y_tilde = comps[1 - y_index];
  cd.p = y_index == 0 ? fix_lo : fix_hi;
  cd.p_plus = y_index == 0 ? fix_hi : fix_lo;
  cd.mult_p = std::abs(df3(c, cd.p));
  cd.mult_p_plus = std::abs(df3(c, cd.p_plus));

  // the 2-periodic point of g in Y~: restrict to the subinterval that g maps
  // into Y, then solve g^2(x) = x there
  {
    const RealTrace& T = cd.Y_tilde;
    auto g = [&](double x) { return f3(c, x); };
    auto dg = [&](double x) { return df3(c, x); };
    double eYl = solve_on(g, dg, T.left, T.right, cd.Y.left);
    double eYr = solve_on(g, dg, T.left, T.right, cd.Y.right);
    double slo = std::min(eYl, eYr), shi = std::max(eYl, eYr);
    cd.p_minus = solve_on([&](double x) { return f6(c, x) - x; },
                          [&](double x) { return df6(c, x) - 1.0; }, slo, shi, 0.0);
    cd.mult_p_minus_sq = std::abs(df6(c, cd.p_minus));
  }

  cd.theta = std::sqrt(cd.mult_p / cd.mult_p_plus);
  cd.xi = cd.theta > 1.0 ? std::log(delta2) / (2.0 * std::log(cd.theta))
                         : std::numeric_limits<double>::infinity();
  return cd;
}

namespace {

// orbit of the critical value: v[k] = f^k(0), v[1] = c
std::vector<double> critical_value_orbit(double c, int length) {
  std::vector<double> v(length + 1);
  v[0] = 0.0;
  for (int k = 1; k <= length; ++k) v[k] = v[k - 1] * v[k - 1] + c;
  return v;
}

}  // namespace

KnReport kn_membership(double c, int n, int k_max, const CantorData& cd) {
  if (n < 3) throw std::invalid_argument("kn_membership: n >= 3");
  KnReport rep;
  std::vector<double> v = critical_value_orbit(c, n + 1 + 3 * k_max);
  // chain f(c) > f^2(c) > ... > f^{n-1}(c) > 0, i.e. v[2] > ... > v[n] > 0
  rep.ordering_ok = true;
  for (int k = 2; k <= n; ++k) {
    double prev = (k == 2) ? v[2] : v[k - 1];
    bool ok = (k == 2) ? (v[2] > 0.0) : (prev > v[k] && v[k] >= 0.0);
    (void)ok;
    ++rep.ordering_checked;
    if (k >= 3 && !(v[k - 1] > v[k])) {
      rep.ordering_ok = false;
      rep.ordering_failure_index = k;
      break;
    }
  }
  if (rep.ordering_ok && !(v[n] > 0.0)) {
    rep.ordering_ok = false;
    rep.ordering_failure_index = n;
  }
  rep.confinement_ok = true;
  for (int k = 0; k < k_max; ++k) {
    double x = v[n + 1 + 3 * k];
    if (cd.Y.contains(x) || cd.Y_tilde.contains(x)) {
      ++rep.confined_steps;
    } else {
      rep.confinement_ok = false;
      break;
    }
  }
  rep.pass = rep.ordering_ok && rep.confinement_ok;
  return rep;
}

KnReport kn_membership(double c, int n, int k_max) {
  return kn_membership(c, n, k_max, cantor_data(c));
}

ItineraryPrefix critical_itinerary(double c, int n, int k_max,
                                   const CantorData& cd, double membership_tol) {
  KnReport kn = kn_membership(c, n, 0, cd);
  if (!kn.ordering_ok)
    throw std::domain_error("critical_itinerary: ordering chain fails at index " +
                            std::to_string(kn.ordering_failure_index));
  ItineraryPrefix it;
  it.n = n;
  std::vector<double> v = critical_value_orbit(c, n + 1 + 3 * k_max);
  bool certified = true;
  for (int k = 0; k < k_max; ++k) {
    double x = v[n + 1 + 3 * k];
    int sym;
    double margin;
    if (cd.Y.contains(x)) {
      sym = 0;
      margin = cd.Y.interior_margin(x);
    } else if (cd.Y_tilde.contains(x)) {
      sym = 1;
      margin = cd.Y_tilde.interior_margin(x);
    } else {
      break;  // orbit left the two traces; no symbol at all
    }
    it.symbols.push_back(sym);
    if (certified && margin >= membership_tol) ++it.certified_steps;
    else certified = false;
  }
  return it;
}

ItineraryPrefix critical_itinerary(double c, int n, int k_max) {
  return critical_itinerary(c, n, k_max, cantor_data(c), 1e-9);
}

namespace {

// match length of the critical itinerary against a target, -1 when the
// ordering chain fails; used as the scan comparator
int match_score(double c, int n, const std::vector<int>& target,
                const CantorData& cd_hint, bool* chain_ok) {
  std::vector<double> v = critical_value_orbit(c, n + 1 + 3 * static_cast<int>(target.size()));
  for (int k = 3; k <= n; ++k)
    if (!(v[k - 1] > v[k])) { *chain_ok = false; return -1; }
  if (!(v[n] > 0.0)) { *chain_ok = false; return -1; }
  *chain_ok = true;
  const double tol = 1e-9;
  int m = 0;
  for (std::size_t k = 0; k < target.size(); ++k) {
    double x = v[n + 1 + 3 * k];
    int sym;
    if (cd_hint.Y.contains(x) && cd_hint.Y.interior_margin(x) >= tol) sym = 0;
    else if (cd_hint.Y_tilde.contains(x) && cd_hint.Y_tilde.interior_margin(x) >= tol) sym = 1;
    else break;
    if (sym != target[k]) break;
    ++m;
  }
  return m;
}

}  // namespace

namespace {

int score_at(double c, int n, const std::vector<int>& target) {
  CantorData cd;
  try {
    cd = cantor_data(c, 2.0, ComponentLabeling::by_sign);
  } catch (const std::exception&) {
    return -1;
  }
  bool chain_ok = false;
  return match_score(c, n, target, cd, &chain_ok);
}

struct ScanRun {
  double lo, hi;
};

// contiguous parameter runs where at least `want` leading symbols of the
// target are certified and matching
std::vector<ScanRun> scan_runs(int n, const std::vector<int>& ext, int want,
                               double lo, double hi, int grid) {
  std::vector<ScanRun> runs;
  double step = (hi - lo) / grid;
  bool in_run = false;
  double start = lo;
  for (int i = 0; i <= grid; ++i) {
    double c = lo + step * i;
    bool match = score_at(c, n, ext) >= want;
    if (match && !in_run) {
      start = std::max(lo, c - step);
      in_run = true;
    } else if (!match && in_run) {
      runs.push_back({start, c});
      in_run = false;
    }
  }
  if (in_run) runs.push_back({start, hi});
  return runs;
}

}  // namespace

double find_parameter(int n, const std::vector<int>& target_prefix, int depth,
                      ParameterBracket* bracket_out) {
  if (n < 6) throw std::invalid_argument("find_parameter: n >= 6");
  if (depth != static_cast<int>(target_prefix.size()) || depth > 40)
    throw std::invalid_argument("find_parameter: depth must equal prefix length, <= 40");

  // target continued by zeros: deeper certified symbols pin nested parameter
  // windows, so the search converges to the parameter whose itinerary starts
  // with the prefix and continues with zeros
  const int ext_cap = std::min(depth + 12, 40);
  std::vector<int> ext = target_prefix;
  ext.resize(ext_cap, 0);

  const int grid = 4096;

  // stage-0 runs from a log-spaced scan: the descent from the fixed-point
  // region takes about log4(1/eps) steps, so the relevant window sits near
  // -2 + 4^{-(n-1)}
  std::vector<std::pair<int, ScanRun>> stack;  // (symbols matched, window)
  {
    double eps_lo = std::pow(4.0, -(n + 3));
    double eps_hi = std::min(0.2, std::pow(4.0, -(n - 5)));
    double llo = std::log(eps_lo), lhi = std::log(eps_hi);
    bool in_run = false;
    double start = 0.0;
    std::vector<ScanRun> runs;
    double prev_c = -2.0 + eps_lo;
    for (int i = 0; i <= grid; ++i) {
      double c = -2.0 + std::exp(llo + (lhi - llo) * i / grid);
      bool match = score_at(c, n, ext) >= 1;
      if (match && !in_run) {
        start = prev_c;
        in_run = true;
      } else if (!match && in_run) {
        runs.push_back({start, c});
        in_run = false;
      }
      prev_c = c;
    }
    if (in_run) runs.push_back({start, -2.0 + eps_hi});
    if (runs.empty())
      throw std::runtime_error(
          "find_parameter: no prefix match on the initial scan over (-2+" +
          std::to_string(eps_lo) + ", -2+" + std::to_string(eps_hi) + ")");
    for (auto it = runs.rbegin(); it != runs.rend(); ++it) stack.push_back({1, *it});
  }

  // depth-first refinement with backtracking: a window certified to s
  // symbols may contain several (or no) continuations of the target
  double best_c = 0.0;
  bool found = false;
  int scans = 0;
  while (!stack.empty() && !found) {
    auto [s, win] = stack.back();
    stack.pop_back();
    double width = win.hi - win.lo;
    double floor_width = 8e-16 * std::abs(win.lo);
    if ((width < 1e-13 && s >= depth) || s >= ext_cap) {
      best_c = 0.5 * (win.lo + win.hi);
      found = true;
      break;
    }
    if (++scans > 600)
      throw std::runtime_error("find_parameter: scan budget exhausted");
    std::vector<ScanRun> deeper = scan_runs(n, ext, s + 1, win.lo, win.hi, grid);
    if (deeper.empty()) {
      if (s >= depth && width < std::max(1e-13, 4.0 * floor_width)) {
        // double-resolution floor: accept the deepest certified window
        best_c = 0.5 * (win.lo + win.hi);
        found = true;
        break;
      }
      continue;  // backtrack
    }
    // re-queue the deeper runs (leftmost explored first)
    for (auto it = deeper.rbegin(); it != deeper.rend(); ++it)
      stack.push_back({s + 1, *it});
  }
  if (!found)
    throw std::runtime_error("find_parameter: no parameter realizes the prefix at depth " +
                             std::to_string(depth));

  // final verification with the primary (ray-based) component labeling
  CantorData cd = cantor_data(best_c);
  KnReport kn = kn_membership(best_c, n, depth, cd);
  ItineraryPrefix it = critical_itinerary(best_c, n, depth, cd, 1e-9);
  bool match = kn.pass && static_cast<int>(it.symbols.size()) >= depth;
  for (int k = 0; match && k < depth; ++k)
    if (it.symbols[k] != target_prefix[k]) match = false;
  if (!match)
    throw std::runtime_error("find_parameter: candidate failed final verification");

  if (bracket_out) {
    // the bracket is the window of the requested prefix itself: endpoints
    // straddle it (first match failures on either side of the found point)
    auto matches_prefix = [&](double c) {
      return score_at(c, n, target_prefix) >= depth;
    };
    double span = std::max(1e-15, 1e-15 * std::abs(best_c));
    double L = best_c, R = best_c;
    while (matches_prefix(R + span) && span < 1.0) span *= 2.0;
    {
      double a = R, b = R + span;
      for (int i = 0; i < 80 && b - a > 1e-16; ++i) {
        double m = 0.5 * (a + b);
        (matches_prefix(m) ? a : b) = m;
      }
      R = b;  // just outside
    }
    span = std::max(1e-15, 1e-15 * std::abs(best_c));
    while (matches_prefix(L - span) && span < 1.0) span *= 2.0;
    {
      double a = L - span, b = L;
      for (int i = 0; i < 80 && b - a > 1e-16; ++i) {
        double m = 0.5 * (a + b);
        (matches_prefix(m) ? b : a) = m;
      }
      L = a;  // just outside
    }
    bracket_out->n = n;
    bracket_out->lo = L;
    bracket_out->hi = R;
    bracket_out->target_prefix = target_prefix;
  }
  return best_c;
}

}  // namespace qdw
