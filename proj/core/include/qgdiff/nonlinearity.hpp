#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace qgdiff {

/// Edge nonlinearity gamma: continuous, strictly increasing, onto R, gamma(0) = 0.
class Nonlinearity {
 public:
  struct Identity {};
  /// gamma(r) = |r|^(m-1) r, m > 0.
  struct Power {
    double m = 1.0;
  };
  /// Piecewise linear through (r_i, s_i), extended linearly with the end slopes.
  struct Table {
    std::vector<std::pair<double, double>> points;
  };

  Nonlinearity() = default;
  static Nonlinearity identity() { return Nonlinearity(Identity{}); }
  static Nonlinearity power(double m);
  static Nonlinearity table(std::vector<std::pair<double, double>> points);

  double operator()(double r) const { return eval(r); }
  double eval(double r) const;
  double inverse(double s) const;
  /// Derivative; at kinks of a table the mean of the one-sided slopes.
  double derivative(double r) const;

  /// Smoothed gamma used during continuation. Power laws become
  /// (r^2+eps^2)^((m-1)/2) r; identity and tables are unchanged. eps = 0 is exact.
  double eval_smoothed(double r, double eps) const;
  double derivative_smoothed(double r, double eps) const;

  /// Primitive j(r) = int_0^r gamma.
  double primitive(double r) const;
  /// Legendre transform j*(s) = s gamma^{-1}(s) - j(gamma^{-1}(s)).
  double conjugate(double s) const;

  bool is_identity() const;
  bool is_power() const { return std::holds_alternative<Power>(spec_); }
  double power_exponent() const;
  const std::variant<Identity, Power, Table>& spec() const { return spec_; }

  std::string describe() const;

  friend bool operator==(const Nonlinearity& a, const Nonlinearity& b);

 private:
  explicit Nonlinearity(std::variant<Identity, Power, Table> spec) : spec_(std::move(spec)) {}
  std::variant<Identity, Power, Table> spec_;
};

/// Flux law rho(s) = (s^2 + eps^2)^((p-2)/2) s; eps = 0 gives |s|^(p-2) s.
struct FluxLaw {
  double p = 2.0;
  double eps = 0.0;

  double rho(double s) const;
  double rho_prime(double s) const;
  /// rho(s) / s, the frozen coefficient of a Picard (Kacanov) step.
  double secant(double s) const;
};

inline double rho(const FluxLaw& law, double s) { return law.rho(s); }
inline double rho_prime(const FluxLaw& law, double s) { return law.rho_prime(s); }

}  // namespace qgdiff
