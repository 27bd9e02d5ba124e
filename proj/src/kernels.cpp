#include "piezoband/kernels.hpp"

#include <algorithm>
#include <limits>

#if defined(PIEZOBAND_HAVE_OPENMP)
#include <omp.h>
#endif

namespace piezoband {

int max_threads() {
#if defined(PIEZOBAND_HAVE_OPENMP)
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void evaluate_half_trace(const ShuntedCell& cell, std::span<const double> omegas,
                         std::span<DispersionSample> out, double pole_rel_tol, Exec exec) {
  const std::size_t n = std::min(omegas.size(), out.size());
  for_each_index(n, exec, [&](std::size_t i) { out[i] = half_trace(cell, omegas[i], pole_rel_tol); });
}

void solve_roots(const ShuntedCell& cell, const MonotoneSegment& seg,
                 std::span<const double> targets, std::span<double> roots, double pole_rel_tol,
                 Exec exec, double edge_tol) {
  const double lo_val = std::min(seg.ht_lo, seg.ht_hi);
  const double hi_val = std::max(seg.ht_lo, seg.ht_hi);
  const std::size_t n = std::min(targets.size(), roots.size());

  // A segment end is only located to the nearest double and the half-trace
  // carries rounding noise that grows near shunt poles. A target is
  // attributed to an end when it lies within twice the half-trace spread over
  // the 8 doubles next to that end.
  auto end_noise = [&](double at, double toward, double value) {
    double lo = value, hi = value;
    double x = at;
    for (int i = 0; i < 8; ++i) {
      x = std::nextafter(x, toward);
      const double v = half_trace(cell, x, pole_rel_tol).half_trace;
      if (std::isnan(v)) break;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    return 2.0 * (hi - lo);
  };
  const double tol_lo = std::max(edge_tol, end_noise(seg.lo, seg.hi, seg.ht_lo));
  const double tol_hi = std::max(edge_tol, end_noise(seg.hi, seg.lo, seg.ht_hi));
  const double tol_any = std::max(tol_lo, tol_hi);

  for_each_index(n, exec, [&](std::size_t i) {
    const double t = targets[i];
    double root = std::numeric_limits<double>::quiet_NaN();
    if (t >= lo_val - tol_any && t <= hi_val + tol_any) {
      const double f_lo = seg.ht_lo - t;
      const double f_hi = seg.ht_hi - t;
      if (std::abs(f_lo) <= tol_lo && std::abs(f_lo) <= std::abs(f_hi)) {
        root = seg.lo;
      } else if (std::abs(f_hi) <= tol_hi) {
        root = seg.hi;
      } else if (t < lo_val || t > hi_val) {
        root = std::numeric_limits<double>::quiet_NaN();
      } else {
        auto f = [&](double w) { return half_trace(cell, w, pole_rel_tol).half_trace - t; };
        const double a = bisect_to_convergence(f, seg.lo, seg.hi, f_lo);
        // Pick whichever of the final bracket ends has the smaller residual.
        const double b = std::nextafter(a, seg.hi);
        root = std::abs(f(a)) <= std::abs(f(b)) ? a : b;
      }
    }
    roots[i] = root;
  });
}

}  // namespace piezoband
