#pragma once

// Data-parallel kernels of the band solver. Every kernel has a serial path
// (the reference used by the tests) and an OpenMP path. Both paths run the
// same per-element code and write to disjoint slots, so their results are
// bitwise identical.

#include <cmath>
#include <cstddef>
#include <span>

#include "piezoband/dispersion.hpp"

namespace piezoband {

enum class Exec { serial, parallel };

/// Threads the parallel path will use (1 without OpenMP).
int max_threads();

/// Runs body(i) for i in [0, n). `body` must not throw.
template <class Body>
void for_each_index(std::size_t n, Exec exec, Body&& body) {
  const auto count = static_cast<std::ptrdiff_t>(n);
  if (exec == Exec::parallel) {
#if defined(PIEZOBAND_HAVE_OPENMP)
#pragma omp parallel for schedule(static)
#endif
    for (std::ptrdiff_t i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
  } else {
    for (std::ptrdiff_t i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
  }
}

/// Bisection on a sign change of f between a and b (f(a) and f(b) of opposite
/// sign, or f(a) == 0). Runs until the midpoint is no longer representable
/// between the end points. Returns the end point on the `a` side.
template <class F>
double bisect_to_convergence(F&& f, double a, double b, double fa) {
  for (int it = 0; it < 256; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid == a || mid == b) break;
    const double fm = f(mid);
    if (std::isnan(fm)) break;
    if ((fm <= 0.0) == (fa <= 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return a;
}

/// half_trace at every omega.
void evaluate_half_trace(const ShuntedCell& cell, std::span<const double> omegas,
                         std::span<DispersionSample> out, double pole_rel_tol, Exec exec);

/// A pole-free frequency interval on which the half-trace is monotone.
struct MonotoneSegment {
  double lo = 0.0, hi = 0.0;
  double ht_lo = 0.0, ht_hi = 0.0;
};

/// For each target t, the omega in the segment with half_trace(omega) == t,
/// or NaN when t lies outside the segment's range. Values within `edge_tol`
/// of an end-point half-trace, widened to the local rounding noise of the
/// half-trace at that end, resolve to that end point.
void solve_roots(const ShuntedCell& cell, const MonotoneSegment& segment,
                 std::span<const double> targets, std::span<double> roots, double pole_rel_tol,
                 Exec exec, double edge_tol = 1e-12);

}  // namespace piezoband
