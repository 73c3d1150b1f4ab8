#include "qgdiff/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qgdiff/error.hpp"

namespace qgdiff {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double signum(double x) { return (x > 0.0) - (x < 0.0); }

// Slopes of the linear extensions to the left of the first and right of the last breakpoint.
double left_slope(const Nonlinearity::Table& t) {
  const auto& p = t.points;
  return (p[1].second - p[0].second) / (p[1].first - p[0].first);
}
double right_slope(const Nonlinearity::Table& t) {
  const auto& p = t.points;
  const std::size_t n = p.size();
  return (p[n - 1].second - p[n - 2].second) / (p[n - 1].first - p[n - 2].first);
}

// Index i of the segment [r_i, r_{i+1}] containing r, clamped to the end segments.
std::size_t segment(const std::vector<std::pair<double, double>>& pts, double r) {
  auto it = std::upper_bound(pts.begin(), pts.end(), r,
                             [](double v, const auto& pt) { return v < pt.first; });
  std::size_t i = static_cast<std::size_t>(std::distance(pts.begin(), it));
  if (i == 0) return 0;
  return std::min(i - 1, pts.size() - 2);
}

double table_eval(const Nonlinearity::Table& t, double r) {
  const auto& p = t.points;
  const std::size_t i = segment(p, r);
  const double slope = (p[i + 1].second - p[i].second) / (p[i + 1].first - p[i].first);
  return p[i].second + slope * (r - p[i].first);
}

double table_primitive(const Nonlinearity::Table& t, double r) {
  // integral of a piecewise linear function from 0 to r, split at breakpoints
  const double lo = std::min(0.0, r);
  const double hi = std::max(0.0, r);
  std::vector<double> cuts{lo};
  for (const auto& pt : t.points) {
    if (pt.first > lo && pt.first < hi) cuts.push_back(pt.first);
  }
  cuts.push_back(hi);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k];
    const double b = cuts[k + 1];
    total += 0.5 * (b - a) * (table_eval(t, a) + table_eval(t, b));
  }
  return r >= 0.0 ? total : -total;
}

}  // namespace

Nonlinearity Nonlinearity::power(double m) {
  if (!(m > 0.0) || !std::isfinite(m)) {
    throw Error(Errc::InvalidNonlinearity, "power nonlinearity requires m > 0");
  }
  if (m == 1.0) return Nonlinearity(Power{1.0});
  return Nonlinearity(Power{m});
}

Nonlinearity Nonlinearity::table(std::vector<std::pair<double, double>> points) {
  if (points.size() < 2) {
    throw Error(Errc::InvalidNonlinearity, "table nonlinearity needs at least two points");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i].first) || !std::isfinite(points[i].second)) {
      throw Error(Errc::InvalidNonlinearity, "table entries must be finite");
    }
    if (i > 0 && !(points[i].first > points[i - 1].first && points[i].second > points[i - 1].second)) {
      throw Error(Errc::InvalidNonlinearity, "table must be strictly increasing in both coordinates");
    }
  }
  Table t{std::move(points)};
  const double g0 = table_eval(t, 0.0);
  if (std::abs(g0) > 1e-14) {
    throw Error(Errc::InvalidNonlinearity, "table must satisfy gamma(0) = 0");
  }
  if (!(left_slope(t) > 0.0) || !(right_slope(t) > 0.0)) {
    throw Error(Errc::InvalidNonlinearity, "table end slopes must be positive");
  }
  return Nonlinearity(std::move(t));
}

double Nonlinearity::eval(double r) const {
  return std::visit(overloaded{
                        [&](const Identity&) { return r; },
                        [&](const Power& pw) {
                          if (pw.m == 1.0) return r;
                          return signum(r) * std::pow(std::abs(r), pw.m);
                        },
                        [&](const Table& t) { return table_eval(t, r); },
                    },
                    spec_);
}

double Nonlinearity::inverse(double s) const {
  return std::visit(overloaded{
                        [&](const Identity&) { return s; },
                        [&](const Power& pw) {
                          if (pw.m == 1.0) return s;
                          return signum(s) * std::pow(std::abs(s), 1.0 / pw.m);
                        },
                        [&](const Table& t) {
                          // monotone bisection on the piecewise linear map
                          double lo = -1.0, hi = 1.0;
                          while (table_eval(t, lo) > s) lo *= 2.0;
                          while (table_eval(t, hi) < s) hi *= 2.0;
                          for (int it = 0; it < 200 && hi - lo > 1e-12 * (1.0 + std::abs(lo)); ++it) {
                            const double mid = 0.5 * (lo + hi);
                            if (table_eval(t, mid) < s) lo = mid;
                            else hi = mid;
                          }
                          // finish exactly on the segment containing the bracket
                          const double mid = 0.5 * (lo + hi);
                          const std::size_t i = segment(t.points, mid);
                          const auto& p = t.points;
                          const double slope = (p[i + 1].second - p[i].second) / (p[i + 1].first - p[i].first);
                          return p[i].first + (s - p[i].second) / slope;
                        },
                    },
                    spec_);
}

double Nonlinearity::derivative(double r) const {
  return std::visit(overloaded{
                        [&](const Identity&) { return 1.0; },
                        [&](const Power& pw) {
                          if (pw.m == 1.0) return 1.0;
                          if (r == 0.0) {
                            return pw.m > 1.0 ? 0.0 : std::numeric_limits<double>::infinity();
                          }
                          return pw.m * std::pow(std::abs(r), pw.m - 1.0);
                        },
                        [&](const Table& t) {
                          const auto& p = t.points;
                          const std::size_t i = segment(p, r);
                          auto slope_at = [&](std::size_t k) {
                            return (p[k + 1].second - p[k].second) / (p[k + 1].first - p[k].first);
                          };
                          const double s = slope_at(i);
                          if (r == p[i].first && i > 0) return 0.5 * (s + slope_at(i - 1));
                          if (r == p[i + 1].first && i + 2 < p.size()) return 0.5 * (s + slope_at(i + 1));
                          return s;
                        },
                    },
                    spec_);
}

double Nonlinearity::eval_smoothed(double r, double eps) const {
  if (const auto* pw = std::get_if<Power>(&spec_); pw && pw->m != 1.0 && eps > 0.0) {
    return std::pow(r * r + eps * eps, 0.5 * (pw->m - 1.0)) * r;
  }
  return eval(r);
}

double Nonlinearity::derivative_smoothed(double r, double eps) const {
  if (const auto* pw = std::get_if<Power>(&spec_); pw && pw->m != 1.0 && eps > 0.0) {
    const double q = r * r + eps * eps;
    return std::pow(q, 0.5 * (pw->m - 3.0)) * (pw->m * r * r + eps * eps);
  }
  return derivative(r);
}

double Nonlinearity::primitive(double r) const {
  return std::visit(overloaded{
                        [&](const Identity&) { return 0.5 * r * r; },
                        [&](const Power& pw) { return std::pow(std::abs(r), pw.m + 1.0) / (pw.m + 1.0); },
                        [&](const Table& t) { return table_primitive(t, r); },
                    },
                    spec_);
}

double Nonlinearity::conjugate(double s) const {
  return std::visit(overloaded{
                        [&](const Identity&) { return 0.5 * s * s; },
                        [&](const Power& pw) {
                          return pw.m / (pw.m + 1.0) * std::pow(std::abs(s), (pw.m + 1.0) / pw.m);
                        },
                        [&](const Table&) {
                          const double r = inverse(s);
                          return s * r - primitive(r);
                        },
                    },
                    spec_);
}

bool Nonlinearity::is_identity() const {
  if (std::holds_alternative<Identity>(spec_)) return true;
  if (const auto* pw = std::get_if<Power>(&spec_)) return pw->m == 1.0;
  return false;
}

double Nonlinearity::power_exponent() const {
  if (const auto* pw = std::get_if<Power>(&spec_)) return pw->m;
  return 1.0;
}

std::string Nonlinearity::describe() const {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const Identity&) { os << "identity"; },
                 [&](const Power& pw) { os << "power(m=" << pw.m << ")"; },
                 [&](const Table& t) { os << "table(" << t.points.size() << " points)"; },
             },
             spec_);
  return os.str();
}

bool operator==(const Nonlinearity& a, const Nonlinearity& b) {
  if (a.is_identity() && b.is_identity()) return true;
  if (a.spec_.index() != b.spec_.index()) return false;
  if (const auto* pa = std::get_if<Nonlinearity::Power>(&a.spec_)) {
    return pa->m == std::get<Nonlinearity::Power>(b.spec_).m;
  }
  if (const auto* ta = std::get_if<Nonlinearity::Table>(&a.spec_)) {
    return ta->points == std::get<Nonlinearity::Table>(b.spec_).points;
  }
  return true;
}

double FluxLaw::rho(double s) const {
  if (p == 2.0) return s;
  if (eps == 0.0) {
    if (s == 0.0) return 0.0;
    return std::pow(std::abs(s), p - 2.0) * s;
  }
  return std::pow(s * s + eps * eps, 0.5 * (p - 2.0)) * s;
}

double FluxLaw::rho_prime(double s) const {
  if (p == 2.0) return 1.0;
  const double q = s * s + eps * eps;
  if (q == 0.0) return p > 2.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::pow(q, 0.5 * (p - 4.0)) * ((p - 1.0) * s * s + eps * eps);
}

double FluxLaw::secant(double s) const {
  if (p == 2.0) return 1.0;
  const double q = s * s + eps * eps;
  if (q == 0.0) return p > 2.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::pow(q, 0.5 * (p - 2.0));
}

}  // namespace qgdiff
