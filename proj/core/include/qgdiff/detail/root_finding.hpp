#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "qgdiff/error.hpp"

namespace qgdiff {

namespace detail {

// Brent's method on a sign-changing bracket with flo < 0 < fhi.
template <class G>
double brent(G&& g, double lo, double hi, double flo, double fhi, double ftol, double xtol) {
  double a = lo, b = hi, fa = flo, fb = fhi;
  if (std::abs(fa) < std::abs(fb)) {
    std::swap(a, b);
    std::swap(fa, fb);
  }
  double c = a, fc = fa, d = b - a;
  bool bisected = true;
  for (int it = 0; it < 200; ++it) {
    if (std::abs(fb) <= ftol) return b;
    if (std::abs(b - a) <= xtol * (1.0 + std::abs(b))) return b;
    double s;
    if (fa != fc && fb != fc) {
      s = a * fb * fc / ((fa - fb) * (fa - fc)) + b * fa * fc / ((fb - fa) * (fb - fc)) +
          c * fa * fb / ((fc - fa) * (fc - fb));
    } else {
      s = b - fb * (b - a) / (fb - fa);
    }
    const double q = (3.0 * a + b) / 4.0;
    const double delta = xtol * (1.0 + std::abs(b));
    const bool outside = !((s > std::min(q, b) && s < std::max(q, b)));
    if (outside || (bisected && std::abs(s - b) >= 0.5 * std::abs(b - c)) ||
        (!bisected && std::abs(s - b) >= 0.5 * std::abs(c - d)) || (bisected && std::abs(b - c) < delta) ||
        (!bisected && std::abs(c - d) < delta)) {
      s = 0.5 * (a + b);
      bisected = true;
    } else {
      bisected = false;
    }
    const double fs = g(s);
    d = c;
    c = b;
    fc = fb;
    if ((fa < 0.0) != (fs < 0.0)) {
      b = s;
      fb = fs;
    } else {
      a = s;
      fa = fs;
    }
    if (std::abs(fa) < std::abs(fb)) {
      std::swap(a, b);
      std::swap(fa, fb);
    }
  }
  return b;
}

}  // namespace detail

template <class F>
double solve_increasing(F&& f, double target, double lo, double hi, double ftol, double xtol,
                        int max_doublings) {
  double flo = f(lo) - target;
  double fhi = f(hi) - target;
  if (std::abs(flo) <= ftol) return lo;
  if (std::abs(fhi) <= ftol) return hi;
  int doublings = 0;
  while (flo > 0.0 || fhi < 0.0) {
    if (doublings++ >= max_doublings) {
      throw Error(Errc::BracketNotFound,
                  "no sign change after " + std::to_string(max_doublings) + " bracket doublings");
    }
    const double width = hi - lo;
    if (flo > 0.0) {
      hi = lo;
      fhi = flo;
      lo -= 2.0 * width;
      flo = f(lo) - target;
      if (std::abs(flo) <= ftol) return lo;
    } else {
      lo = hi;
      flo = fhi;
      hi += 2.0 * width;
      fhi = f(hi) - target;
      if (std::abs(fhi) <= ftol) return hi;
    }
  }
  return detail::brent([&](double x) { return f(x) - target; }, lo, hi, flo, fhi, ftol, xtol);
}

}  // namespace qgdiff

namespace qgdiff {

/// Root of the increasing function f - target starting from a guess x0. The
/// first trial step is a Newton step with `slope_hint` when that is positive,
/// otherwise |dx| towards the root; further steps extrapolate by secants until
/// the root is bracketed, then Brent's method.
/// On return *slope_out holds the last secant slope.
template <class F>
double find_root_increasing(F&& f, double target, double x0, double dx, double slope_hint, double ftol,
                            double xtol, int max_expansions, double* slope_out = nullptr) {
  double xp = 0.0, fp = 0.0, xl = 0.0, fl = 0.0;
  int calls = 0;
  auto eval = [&](double x) {
    const double v = f(x) - target;
    xp = xl;
    fp = fl;
    xl = x;
    fl = v;
    ++calls;
    if (slope_out && calls >= 2 && xl != xp && (fl - fp) / (xl - xp) > 0.0) *slope_out = (fl - fp) / (xl - xp);
    return v;
  };
  double f0 = eval(x0);
  if (std::abs(f0) <= ftol) return x0;
  double step = slope_hint > 0.0 ? -1.2 * f0 / slope_hint : (f0 < 0.0 ? std::abs(dx) : -std::abs(dx));
  if (step == 0.0 || !std::isfinite(step)) step = f0 < 0.0 ? std::abs(dx) : -std::abs(dx);
  double x1 = x0 + step;
  double f1 = eval(x1);
  int expansions = 0;
  while ((f0 < 0.0) == (f1 < 0.0)) {
    if (std::abs(f1) <= ftol) return x1;
    if (expansions++ >= max_expansions) {
      throw Error(Errc::BracketNotFound,
                  "no sign change after " + std::to_string(max_expansions) + " bracket expansions");
    }
    const double prev = x1 - x0;
    double next = 2.0 * prev;
    const double df = f1 - f0;
    if (df != 0.0 && (df > 0.0) == (prev > 0.0)) {
      const double secant = -1.5 * f1 * prev / df;
      if (std::isfinite(secant) && (secant > 0.0) == (prev > 0.0)) {
        next = std::clamp(std::abs(secant), 0.5 * std::abs(prev), 4.0 * std::abs(prev));
        next = prev > 0.0 ? next : -next;
      }
    }
    x0 = x1;
    f0 = f1;
    x1 = x0 + next;
    f1 = eval(x1);
  }
  double lo = x0, hi = x1, flo = f0, fhi = f1;
  if (lo > hi) {
    std::swap(lo, hi);
    std::swap(flo, fhi);
  }
  if (std::abs(fhi) <= ftol) return hi;
  return detail::brent(eval, lo, hi, flo, fhi, ftol, xtol);
}

}  // namespace qgdiff
