#pragma once

namespace floquet {

/// Bisection on a bracket where f(lo) and f(hi) lie on opposite sides of
/// zero (a zero value counts as the non-positive side). Stops once the
/// bracket is no wider than `tol` and returns its midpoint.
template <class F>
double bisect(F&& f, double lo, double hi, double f_lo, double tol, int max_iter = 200) {
  const bool lo_positive = f_lo > 0.0;
  for (int it = 0; it < max_iter && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket at floating-point resolution
    if ((f(mid) > 0.0) == lo_positive) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace floquet
