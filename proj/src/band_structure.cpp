#include "piezoband/band_structure.hpp"

#include <algorithm>
#include <array>
#include <span>
#include <string>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "piezoband/errors.hpp"
#include "piezoband/material_file.hpp"
#include "piezoband/quasistatic.hpp"

namespace piezoband {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kUnresolvedDeviation = 1e-11;
constexpr double kClosedGapRel = 1e-12;

bool is_pass(const DispersionSample& s) { return s.status == SpectralStatus::pass; }
bool is_pole(const DispersionSample& s) { return s.status == SpectralStatus::pole; }

std::vector<DispersionSample> evaluate(const ShuntedCell& cell, const std::vector<double>& omegas,
                                       const ScanOptions& opt) {
  std::vector<DispersionSample> out(omegas.size());
  evaluate_half_trace(cell, omegas, out, opt.pole_rel_tol, opt.exec);
  return out;
}

void merge_sorted(std::vector<DispersionSample>& into, std::vector<DispersionSample> extra) {
  auto by_omega = [](const DispersionSample& a, const DispersionSample& b) {
    return a.omega < b.omega;
  };
  std::sort(extra.begin(), extra.end(), by_omega);
  std::vector<DispersionSample> merged;
  merged.reserve(into.size() + extra.size());
  std::merge(into.begin(), into.end(), extra.begin(), extra.end(), std::back_inserter(merged),
             by_omega);
  merged.erase(std::unique(merged.begin(), merged.end(),
                           [](const DispersionSample& a, const DispersionSample& b) {
                             return a.omega == b.omega;
                           }),
               merged.end());
  into = std::move(merged);
}

bool needs_refinement(const DispersionSample& a, const DispersionSample& b) {
  if (a.status != b.status) return true;
  if (std::signbit(a.denom) != std::signbit(b.denom)) return true;
  if (is_pole(a) || is_pole(b)) return true;
  if (std::signbit(a.half_trace) != std::signbit(b.half_trace)) return true;
  return std::abs(b.half_trace - a.half_trace) > 0.5;
}

// Pass-side end of the |half_trace| = 1 crossing between a pass and a stop point.
double band_edge(const ShuntedCell& cell, double pass_omega, double stop_omega, double tol) {
  auto g = [&](double w) {
    const auto s = half_trace(cell, w, tol);
    return is_pole(s) ? 1.0 : std::abs(s.half_trace) - 1.0;
  };
  return bisect_to_convergence(g, pass_omega, stop_omega, g(pass_omega));
}

double golden_extremum(const ShuntedCell& cell, double a, double b, bool maximize, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto f = [&](double w) {
    const double v = half_trace(cell, w, tol).half_trace;
    return maximize ? -v : v;
  };
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && (b - a) > 4.0 * std::numeric_limits<double>::epsilon() * b; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

// Lagrange derivative at x of the polynomial through (xs[i], ys[i]).
double lagrange_derivative(std::span<const double> xs, std::span<const double> ys, double x) {
  const std::size_t n = xs.size();
  double result = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double dl = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      if (m == j) continue;
      double term = 1.0 / (xs[j] - xs[m]);
      for (std::size_t l = 0; l < n; ++l) {
        if (l == j || l == m) continue;
        term *= (x - xs[l]) / (xs[j] - xs[l]);
      }
      dl += term;
    }
    result += ys[j] * dl;
  }
  return result;
}

}  // namespace

Spectrum scan_spectrum(const ShuntedCell& cell, double omega_max, const ScanOptions& opt) {
  validate(cell);
  if (!std::isfinite(omega_max) || omega_max <= 0.0)
    throw InputError("omega_max must be positive and finite", "--omega-max");

  const std::size_t n = std::max<std::size_t>(opt.base_points, 2);
  const double step = omega_max / static_cast<double>(n - 1);
  const double tol = opt.pole_rel_tol;

  std::vector<double> grid;
  grid.reserve(n + static_cast<std::size_t>(std::max(opt.geometric_levels, 0)));
  grid.push_back(0.0);
  for (int j = opt.geometric_levels; j >= 1; --j) grid.push_back(std::ldexp(step, -j));
  for (std::size_t i = 1; i < n; ++i)
    grid.push_back(i + 1 == n ? omega_max : step * static_cast<double>(i));

  Spectrum sp;
  sp.omega_max = omega_max;
  sp.samples = evaluate(cell, grid, opt);

  // Local refinement around status changes, poles and fast variation.
  const std::size_t refine = std::max<std::size_t>(opt.refine_factor, 1);
  std::vector<double> extra;
  for (std::size_t i = 1; i + 1 < sp.samples.size(); ++i) {
    const auto& a = sp.samples[i];
    const auto& b = sp.samples[i + 1];
    if (!needs_refinement(a, b)) continue;
    for (std::size_t r = 1; r < refine; ++r)
      extra.push_back(a.omega + (b.omega - a.omega) * static_cast<double>(r) /
                                    static_cast<double>(refine));
  }
  merge_sorted(sp.samples, evaluate(cell, extra, opt));

  // Shunt poles: sign changes of S/C - M3. The flagged neighbourhood of each
  // pole is bounded by explicit samples so that no later bracket crosses it.
  if (!cell.open_circuit() && cell.piezo.e != 0.0) {
    const double thr = tol * cell.piezo.d / cell.piezo.eps;
    auto denom = [&](double w) { return shunt_coefficients(cell, w).denom; };
    auto excess = [&](double w) { return std::abs(denom(w)) - thr; };
    std::vector<double> boundary;
    std::vector<double> pole_points;
    for (std::size_t i = 0; i + 1 < sp.samples.size(); ++i) {
      const auto& a = sp.samples[i];
      const auto& b = sp.samples[i + 1];
      if (std::signbit(a.denom) == std::signbit(b.denom)) continue;
      const double wp = bisect_to_convergence(denom, a.omega, b.omega, a.denom);
      sp.poles.push_back(wp);
      pole_points.push_back(wp);
      if (excess(a.omega) >= 0.0)
        boundary.push_back(bisect_to_convergence(excess, a.omega, wp, excess(a.omega)));
      if (excess(b.omega) >= 0.0)
        boundary.push_back(bisect_to_convergence(excess, b.omega, wp, excess(b.omega)));
    }
    auto located = evaluate(cell, pole_points, opt);
    for (auto& s : located) {
      s.status = SpectralStatus::pole;
      s.half_trace = kNaN;
    }
    merge_sorted(sp.samples, evaluate(cell, boundary, opt));
    merge_sorted(sp.samples, std::move(located));
  }

  // Below the base grid spacing half_trace - 1 eventually drops under the
  // rounding level and the pass/stop status of a sample is noise.
  std::erase_if(sp.samples, [&](const DispersionSample& d) {
    return d.omega > 0.0 && d.omega < step && !is_pole(d) &&
           std::abs(d.half_trace - 1.0) <= kUnresolvedDeviation;
  });

  // Walk the samples and assemble passbands. The status at omega = 0 is the
  // status of the limit from the right, i.e. of the smallest positive sample.
  const auto& s = sp.samples;
  bool is_open = s.size() > 1 && is_pass(s[1]);
  double open_at = 0.0;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const auto& a = s[i];
    const auto& b = s[i + 1];
    if (is_pole(a) || is_pole(b) || std::signbit(a.denom) != std::signbit(b.denom)) {
      if (is_open && is_pass(a)) sp.passbands.push_back({open_at, a.omega});
      is_open = false;
      continue;
    }
    const bool pa = is_pass(a);
    const bool pb = is_pass(b);
    if (pa && pb) {
      if (!is_open) {
        is_open = true;
        open_at = a.omega;
      }
    } else if (pa && !pb) {
      const double edge = band_edge(cell, a.omega, b.omega, tol);
      sp.passbands.push_back({is_open ? open_at : a.omega, edge});
      is_open = false;
    } else if (!pa && pb) {
      is_open = true;
      open_at = band_edge(cell, b.omega, a.omega, tol);
    } else if (std::signbit(a.half_trace) != std::signbit(b.half_trace)) {
      // |half_trace| > 1 at both ends with opposite signs: a passband narrower
      // than the grid spacing lies in between.
      auto f = [&](double w) { return half_trace(cell, w, tol).half_trace; };
      const double mid = bisect_to_convergence(f, a.omega, b.omega, a.half_trace);
      const double lo = band_edge(cell, mid, a.omega, tol);
      const double hi = band_edge(cell, mid, b.omega, tol);
      if (hi > lo) sp.passbands.push_back({lo, hi});
    }
  }
  if (is_open) sp.passbands.push_back({open_at, omega_max});
  std::erase_if(sp.passbands, [](const FrequencyInterval& p) { return !(p.hi > p.lo); });

  // Gaps that close to within rounding (touching bands, e.g. a homogeneous
  // cell at K T = pi) are not stopbands.
  std::vector<FrequencyInterval> merged;
  for (const auto& pb : sp.passbands) {
    if (!merged.empty() && pb.lo - merged.back().hi <= kClosedGapRel * pb.lo &&
        !std::any_of(sp.poles.begin(), sp.poles.end(),
                     [&](double w) { return w >= merged.back().hi && w <= pb.lo; })) {
      merged.back().hi = pb.hi;
    } else {
      merged.push_back(pb);
    }
  }
  sp.passbands = std::move(merged);

  double cursor = 0.0;
  for (const auto& pb : sp.passbands) {
    if (pb.lo > cursor) sp.stopbands.push_back({cursor, pb.lo, true, cursor == 0.0});
    cursor = std::max(cursor, pb.hi);
  }
  if (cursor < omega_max) sp.stopbands.push_back({cursor, omega_max, true, cursor == 0.0});
  return sp;
}

std::vector<StopbandInterval> stopbands(const ShuntedCell& cell, double omega_max,
                                        const ScanOptions& options) {
  return scan_spectrum(cell, omega_max, options).stopbands;
}

std::vector<MonotoneSegment> monotone_segments(const ShuntedCell& cell, const Spectrum& spectrum,
                                               double tol) {
  constexpr double small = 64.0 * std::numeric_limits<double>::epsilon();
  std::vector<MonotoneSegment> segments;
  auto ht = [&](double w) { return half_trace(cell, w, tol).half_trace; };

  for (const auto& pb : spectrum.passbands) {
    std::vector<double> w{pb.lo};
    std::vector<double> v{ht(pb.lo)};
    for (const auto& s : spectrum.samples) {
      if (s.omega > pb.lo && s.omega < pb.hi && !std::isnan(s.half_trace)) {
        w.push_back(s.omega);
        v.push_back(s.half_trace);
      }
    }
    w.push_back(pb.hi);
    v.push_back(ht(pb.hi));

    std::vector<double> cuts{pb.lo};
    int dir = 0;
    for (std::size_t i = 1; i < w.size(); ++i) {
      const double d = v[i] - v[i - 1];
      if (std::abs(d) <= small) continue;
      const int sgn = d > 0.0 ? 1 : -1;
      if (dir != 0 && sgn != dir) {
        const double a = w[i >= 2 ? i - 2 : 0];
        const double x = golden_extremum(cell, a, w[i], dir > 0, tol);
        if (x > cuts.back() && x < pb.hi) cuts.push_back(x);
      }
      dir = sgn;
    }
    cuts.push_back(pb.hi);

    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double lo = cuts[i];
      const double hi = cuts[i + 1];
      if (!(hi > lo)) continue;
      segments.push_back({lo, hi, i == 0 ? v.front() : ht(lo), i + 2 == cuts.size() ? v.back() : ht(hi)});
    }
  }
  return segments;
}

std::vector<Branch> trace_branches(const ShuntedCell& cell, const Spectrum& spectrum,
                                   std::size_t k_points, const ScanOptions& options) {
  if (k_points < 2) throw InputError("k_points must be at least 2", "--k-points");
  const double T = cell.period();
  const double zone = std::numbers::pi / T;

  std::vector<double> ks(k_points);
  std::vector<double> targets(k_points);
  for (std::size_t i = 0; i < k_points; ++i) {
    const double frac = static_cast<double>(i) / static_cast<double>(k_points - 1);
    ks[i] = zone * frac;
    targets[i] = std::cos(std::numbers::pi * frac);
  }

  std::vector<Branch> branches;
  std::vector<double> roots(k_points);
  for (const auto& seg : monotone_segments(cell, spectrum, options.pole_rel_tol)) {
    solve_roots(cell, seg, targets, roots, options.pole_rel_tol, options.exec);
    Branch br;
    br.period = T;
    for (std::size_t i = 0; i < k_points; ++i)
      if (!std::isnan(roots[i])) br.samples.push_back({ks[i], roots[i]});
    if (br.samples.empty()) continue;
    br.index = static_cast<int>(branches.size()) + 1;
    branches.push_back(std::move(br));
  }
  return branches;
}

std::vector<Branch> trace_branches(const ShuntedCell& cell, std::size_t k_points, double omega_max,
                                   const ScanOptions& options) {
  if (k_points < 2) throw InputError("k_points must be at least 2", "--k-points");
  return trace_branches(cell, scan_spectrum(cell, omega_max, options), k_points, options);
}

double group_velocity(const Branch& branch, double k) {
  const auto& s = branch.samples;
  if (s.size() < 5)
    throw NumericalError("group velocity needs at least 5 branch samples (branch " +
                         std::to_string(branch.index) + " has " + std::to_string(s.size()) + ")");
  const double span = s.back().k - s.front().k;
  if (k < s.front().k - 1e-12 * span || k > s.back().k + 1e-12 * span)
    throw std::invalid_argument("k outside the sampled range of the branch");

  const auto it = std::lower_bound(s.begin(), s.end(), k,
                                   [](const BranchSample& b, double x) { return b.k < x; });
  std::size_t nearest = static_cast<std::size_t>(it - s.begin());
  if (nearest == s.size() ||
      (nearest > 0 && std::abs(s[nearest - 1].k - k) <= std::abs(s[nearest].k - k)))
    nearest = nearest == 0 ? 0 : nearest - 1;
  const std::size_t start = std::min(nearest >= 2 ? nearest - 2 : 0, s.size() - 5);

  std::array<double, 5> xs{}, ys{};
  for (std::size_t j = 0; j < 5; ++j) {
    xs[j] = s[start + j].k;
    ys[j] = s[start + j].omega;
  }
  return lagrange_derivative(xs, ys, k);
}

double relative_spread(const Branch& branch) {
  if (branch.samples.empty()) return kNaN;
  double lo = HUGE_VAL, hi = -HUGE_VAL, sum = 0.0;
  for (const auto& s : branch.samples) {
    lo = std::min(lo, s.omega);
    hi = std::max(hi, s.omega);
    sum += s.omega;
  }
  return (hi - lo) / (sum / static_cast<double>(branch.samples.size()));
}

bool spans_zone(const Branch& branch, std::size_t k_points) {
  return branch.samples.size() == k_points;
}

std::vector<Branch> detect_flat_bands(const ShuntedCell& cell, double omega_max,
                                      double flatness_tol, std::size_t k_points,
                                      const ScanOptions& options) {
  if (!(flatness_tol > 0.0)) throw InputError("flatness tolerance must be positive", "--flatness-tol");
  std::vector<Branch> flat;
  for (auto& br : trace_branches(cell, k_points, omega_max, options))
    if (spans_zone(br, k_points) && relative_spread(br) < flatness_tol) flat.push_back(std::move(br));
  return flat;
}

std::optional<double> first_branch_end_slope(const ShuntedCell& cell, std::size_t k_points,
                                             double omega_max, const ScanOptions& options) {
  const auto branches = trace_branches(cell, k_points, omega_max, options);
  if (branches.empty() || !spans_zone(branches.front(), k_points)) return std::nullopt;
  const auto& s = branches.front().samples;
  return (s.back().omega - s.front().omega) / (s.back().k - s.front().k);
}

namespace {

void require_inside_negative_interval(const ShuntedCell& cell, double c, const char* which) {
  const auto sc = special_capacitances(cell);
  if (!(c > sc.zero && c < sc.pole))
    throw std::invalid_argument(std::string("precondition violated: ") + which + " = " +
                                format_double(c) + " F/m^2 is not inside the negative-stiffness "
                                "interval (C0/S, Cinf/S)");
}

}  // namespace

double find_flat_capacitance(const ShuntedCell& cell, double c_lo, double c_hi,
                             const FlatSearchOptions& opt) {
  if (cell.piezo.e == 0.0) throw std::invalid_argument("flat-band search needs e != 0");
  require_inside_negative_interval(cell, c_lo, "c_lo");
  require_inside_negative_interval(cell, c_hi, "c_hi");
  const double omega_max = opt.omega_max > 0.0 ? opt.omega_max : default_omega_max(cell);

  auto slope = [&](double c) {
    const auto v = first_branch_end_slope(with_c_over_s(cell, c), opt.k_points, omega_max, opt.scan);
    if (!v) throw NumericalError("first branch does not span the Brillouin zone at C/S = " + format_double(c));
    return *v;
  };
  double s_lo = slope(c_lo);
  const double s_hi = slope(c_hi);
  if (s_lo == 0.0) return c_lo;
  if (s_hi == 0.0) return c_hi;
  if (std::signbit(s_lo) == std::signbit(s_hi))
    throw BracketError("first-branch end slope has the same sign at both bracket ends");

  const double target = opt.flatness_tol * opt.target_fraction;
  double best_c = 0.5 * (c_lo + c_hi);
  double best_spread = HUGE_VAL;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (c_lo + c_hi);
    if (mid == c_lo || mid == c_hi) break;
    const auto branches = trace_branches(with_c_over_s(cell, mid), opt.k_points, omega_max, opt.scan);
    if (branches.empty() || !spans_zone(branches.front(), opt.k_points))
      throw NumericalError("first branch does not span the Brillouin zone at C/S = " + format_double(mid));
    const auto& s = branches.front().samples;
    const double spread = relative_spread(branches.front());
    if (spread < best_spread) {
      best_spread = spread;
      best_c = mid;
    }
    if (spread < target) return mid;
    const double sm = s.back().omega - s.front().omega;
    if (sm == 0.0) return mid;
    if (std::signbit(sm) == std::signbit(s_lo)) {
      c_lo = mid;
      s_lo = sm;
    } else {
      c_hi = mid;
    }
  }
  if (best_spread < opt.flatness_tol) return best_c;
  throw NumericalError("flat-band bisection did not reach the flatness tolerance");
}

std::optional<FrequencyInterval> bracket_flat_capacitance(const ShuntedCell& cell,
                                                          std::size_t samples,
                                                          const FlatSearchOptions& opt) {
  if (cell.piezo.e == 0.0) return std::nullopt;
  const auto sc = special_capacitances(cell);
  const double omega_max = opt.omega_max > 0.0 ? opt.omega_max : default_omega_max(cell);

  std::optional<double> prev_slope;
  double prev_c = 0.0;
  for (std::size_t j = 1; j <= samples; ++j) {
    const double c = sc.pole + (sc.zero - sc.pole) * static_cast<double>(j) /
                                   static_cast<double>(samples + 1);
    const auto v = first_branch_end_slope(with_c_over_s(cell, c), opt.k_points, omega_max, opt.scan);
    if (v && prev_slope && std::signbit(*v) != std::signbit(*prev_slope))
      return FrequencyInterval{std::min(c, prev_c), std::max(c, prev_c)};
    prev_slope = v;
    prev_c = c;
  }
  return std::nullopt;
}

double origin_slope(const ShuntedCell& cell, double omega_max, const ScanOptions& options) {
  if (omega_max <= 0.0) omega_max = default_omega_max(cell);
  const auto spectrum = scan_spectrum(cell, omega_max, options);
  if (spectrum.passbands.empty() || spectrum.passbands.front().lo != 0.0)
    throw NumericalError("no passband at the origin: the first branch is detached from omega = 0");
  const auto segments = monotone_segments(cell, spectrum, options.pole_rel_tol);
  const auto& seg = segments.front();
  const double T = cell.period();
  const double tol = options.pole_rel_tol;

  // omega / K on the first branch for K T = theta.
  auto ratio = [&](double theta) {
    const double s = std::sin(0.5 * theta);
    const double shift = 2.0 * s * s;
    auto f = [&](double w) { return (half_trace(cell, w, tol).half_trace - 1.0) + shift; };
    const double w = bisect_to_convergence(f, seg.lo, seg.hi, shift);
    return w * T / theta;
  };

  const double reach = std::acos(std::clamp(seg.ht_hi, -1.0, 1.0));
  double theta = std::min(0.1, 0.5 * reach);
  double r_prev = ratio(theta);
  double extrap_prev = kNaN;
  double extrap = kNaN;
  for (int j = 0; j < 30; ++j) {
    theta *= 0.5;
    const double r = ratio(theta);
    extrap = (4.0 * r - r_prev) / 3.0;
    if (!std::isnan(extrap_prev) && std::abs(extrap - extrap_prev) <= 1e-7 * std::abs(extrap))
      break;
    extrap_prev = extrap;
    r_prev = r;
    if (theta < 1e-6) break;
  }
  return extrap;
}

double half_trace_curvature_at_origin(const ShuntedCell& cell) {
  const auto dc = derive_constants(cell);
  const double transit = cell.elastic.d * dc.slowness1 + cell.piezo.d * dc.slowness2;

  const auto at_zero = half_trace(cell, 0.0);
  if (at_zero.status == SpectralStatus::pole) throw PoleError(0.0);

  auto deviation = [&](double w) {
    const auto s = half_trace(cell, w);
    return s.status == SpectralStatus::pole ? kNaN : s.half_trace - 1.0;
  };
  auto pole_free_below = [&](double w) {
    for (int j = 1; j <= 16; ++j) {
      const auto s = half_trace(cell, w * j / 16.0);
      if (s.status == SpectralStatus::pole) return false;
      if (std::signbit(s.denom) != std::signbit(at_zero.denom)) return false;
    }
    return true;
  };

  double h = 1e-2 / transit;
  for (int it = 0; it < 200; ++it) {
    if (pole_free_below(h)) {
      const double d = deviation(h);
      if (!std::isnan(d) && std::abs(d) <= 1e-3) break;
    }
    h *= 0.5;
  }

  auto second = [&](double step) { return 2.0 * deviation(step) / (step * step); };
  const double d0 = second(h);
  const double d1 = second(0.5 * h);
  const double d2 = second(0.25 * h);
  const double r0 = (4.0 * d1 - d0) / 3.0;
  const double r1 = (4.0 * d2 - d1) / 3.0;
  return (16.0 * r1 - r0) / 15.0;
}

double default_omega_max(const ShuntedCell& cell) {
  const auto open = with_c_over_s(cell, 0.0);
  const auto em = effective_model(open);
  const double T = cell.period();
  const double bragg = std::numbers::pi * em.v_eff.value_or(0.0) / T;
  if (!(bragg > 0.0)) throw NumericalError("open-circuit effective speed is not positive");
  for (double limit = 2.0 * bragg; limit <= 64.0 * bragg; limit *= 2.0) {
    for (const auto& sb : stopbands(open, limit)) {
      if (sb.omega_lo > 0.0 && sb.omega_hi < limit) return 2.0 * (sb.omega_lo + sb.omega_hi);
    }
  }
  return 4.0 * bragg;
}

}  // namespace piezoband
