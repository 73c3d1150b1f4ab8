#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "qgdiff/edge_solver.hpp"
#include "qgdiff/error.hpp"

using namespace qgdiff;

namespace {

EdgeBVP bvp(std::size_t cells, double length, double p, Nonlinearity gamma, const std::function<double(double)>& g,
            double a = 0.0, double b = 0.0) {
  EdgeBVP out;
  out.length = length;
  out.p = p;
  out.gamma = std::move(gamma);
  out.a = a;
  out.b = b;
  for (std::size_t j = 0; j <= cells; ++j) out.g.push_back(g(length * static_cast<double>(j) / static_cast<double>(cells)));
  return out;
}

EdgeBVP manufactured(std::size_t cells) {
  const double pi = std::numbers::pi;
  return bvp(cells, 1.0, 2.0, Nonlinearity::identity(), [pi](double x) { return (1 + pi * pi) * std::cos(pi * x); });
}

double manufactured_error(std::size_t cells) {
  const EdgeSolution s = solve_edge_bvp(manufactured(cells));
  double err = 0.0;
  for (std::size_t j = 0; j <= cells; ++j) {
    err = std::max(err, std::abs(s.u[j] - std::cos(std::numbers::pi * static_cast<double>(j) / static_cast<double>(cells))));
  }
  return err;
}

}  // namespace

TEST_CASE("zero data gives the zero solution") {
  const EdgeSolution s = solve_edge_bvp(bvp(16, 1.0, 3.0, Nonlinearity::power(2.0), [](double) { return 0.0; }));
  for (double x : s.u) CHECK(x == 0.0);
  for (double x : s.v) CHECK(x == 0.0);
}

TEST_CASE("residual of the trivial problem vanishes") {
  const EdgeBVP b = bvp(10, 1.0, 2.0, Nonlinearity::identity(), [](double) { return 0.0; });
  for (double r : assemble_edge_residual(b, std::vector<double>(11, 0.0))) CHECK(r == 0.0);
  CHECK_THROWS_AS(assemble_edge_residual(b, std::vector<double>(5, 0.0)), Error);
}

TEST_CASE("residual rows telescope to the mass balance") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(-1, 1);
  for (double p : {1.5, 2.0, 3.0}) {
    EdgeBVP b = bvp(20, 1.3, p, Nonlinearity::power(2.0), [](double x) { return std::sin(3 * x); }, 0.3, -0.7);
    b.alpha = 2.0;
    std::vector<double> u(21);
    for (double& x : u) x = U(rng);
    const auto r = assemble_edge_residual(b, u);
    double sum = 0.0, mass = 0.0, load = 0.0;
    const double h = b.h();
    for (std::size_t j = 0; j <= 20; ++j) {
      const double m = (j == 0 || j == 20) ? h / 2 : h;
      sum += r[j];
      mass += m * b.gamma(u[j]);
      load += m * b.g[j];
    }
    CHECK(sum == doctest::Approx(b.alpha * mass - load - b.a - b.b).epsilon(1e-12));
  }
}

TEST_CASE("manufactured cosine converges at second order") {
  const double e32 = manufactured_error(32), e64 = manufactured_error(64), e128 = manufactured_error(128);
  CHECK(std::log2(e32 / e64) >= 1.9);
  CHECK(std::log2(e64 / e128) >= 1.9);
  CHECK(e128 <= 5e-4);
  const auto [left, right] = endpoint_map(manufactured(128));
  CHECK(left == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(right == doctest::Approx(-1.0).epsilon(1e-3));
}

TEST_CASE("manufactured cosine with p = 3 converges at least at first order") {
  // u = cos(pi x): rho(u') = -pi^2 sin^2(pi x), so g = u + 2 pi^3 sin(pi x) cos(pi x), zero end fluxes.
  const double pi = std::numbers::pi;
  std::vector<double> err;
  for (std::size_t n : {32u, 64u, 128u}) {
    const EdgeSolution s = solve_edge_bvp(bvp(n, 1.0, 3.0, Nonlinearity::identity(), [pi](double x) {
      return std::cos(pi * x) + 2 * pi * pi * pi * std::sin(pi * x) * std::cos(pi * x);
    }));
    double e = 0.0;
    for (std::size_t j = 0; j <= n; ++j) e = std::max(e, std::abs(s.u[j] - std::cos(pi * static_cast<double>(j) / n)));
    err.push_back(e);
  }
  CHECK(std::log2(err[0] / err[1]) >= 1.0);
  CHECK(std::log2(err[1] / err[2]) >= 1.0);
}

TEST_CASE("p = 3 linear profile is reproduced exactly") {
  for (std::size_t cells : {2u, 7u, 64u, 200u}) {
    const EdgeBVP b = bvp(cells, 1.0, 3.0, Nonlinearity::identity(), [](double x) { return x; }, -1.0, 1.0);
    const EdgeSolution s = solve_edge_bvp(b);
    for (std::size_t j = 0; j <= cells; ++j) CHECK(std::abs(s.u[j] - b.length * j / static_cast<double>(cells)) <= 1e-8);
    CHECK(edge_mass_gap(b, s) <= 1e-12);
  }
}

TEST_CASE("mass balance and residual contract across exponents and nonlinearities") {
  SolverConfig cfg;
  for (double p : {1.5, 2.0, 3.0, 4.0}) {
    for (const auto& gamma : {Nonlinearity::identity(), Nonlinearity::power(0.5), Nonlinearity::power(2.0)}) {
      const EdgeBVP b = bvp(48, 0.8, p, gamma, [](double x) { return 2 * std::sin(5 * x) + 0.3; }, 0.4, -0.9);
      const EdgeSolution s = solve_edge_bvp(b, cfg);
      CHECK(s.residual_sup <= cfg.tol * s.residual_scale);
      CHECK(edge_mass_gap(b, s) <= 10 * cfg.tol * s.residual_scale);
      for (std::size_t j = 0; j < s.u.size(); ++j) CHECK(s.v[j] == gamma(s.u[j]));
    }
  }
}

TEST_CASE("flux profile integrates the reaction") {
  const EdgeBVP b = bvp(64, 1.0, 3.0, Nonlinearity::power(2.0), [](double x) { return std::cos(4 * x); }, 0.2, 0.1);
  const EdgeSolution s = solve_edge_bvp(b);
  const double h = b.h();
  // cell k holds rho(u') on (x_k, x_{k+1}); interior rows give z_k - z_{k-1} = h (gamma(u_k) - g_k)
  for (std::size_t k = 1; k < s.z.size(); ++k) {
    CHECK(s.z[k] - s.z[k - 1] == doctest::Approx(h * (s.v[k] - b.g[k])).epsilon(1e-6).scale(1e-9));
  }
}

TEST_CASE("edge comparison") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> U(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const double p = 1.5 + 2.5 * U(rng);
    const double shift = U(rng);
    EdgeBVP hi = bvp(32, 1.0, p, Nonlinearity::power(2.0), [&](double x) { return std::sin(7 * x) + shift; }, 0.5, 0.2);
    EdgeBVP lo = hi;
    for (double& g : lo.g) g -= U(rng);
    lo.a -= U(rng);
    lo.b -= U(rng);
    const EdgeSolution s1 = solve_edge_bvp(hi), s2 = solve_edge_bvp(lo);
    for (std::size_t j = 0; j < s1.u.size(); ++j) CHECK(s1.u[j] >= s2.u[j] - 1e-8);
  }
}

TEST_CASE("endpoint values grow with the boundary fluxes") {
  for (double p : {1.5, 2.0, 4.0}) {
    EdgeBVP b = bvp(32, 1.0, p, Nonlinearity::power(0.5), [](double x) { return x - 0.3; });
    double prev_right = -1e300, prev_left = -1e300;
    for (int k = -10; k <= 10; ++k) {
      EdgeBVP bb = b, ba = b;
      bb.b = 0.5 * k;
      ba.a = 0.5 * k;
      const double right = endpoint_map(bb).second, left = endpoint_map(ba).first;
      CHECK(right >= prev_right - 1e-10);
      CHECK(left >= prev_left - 1e-10);
      prev_right = right;
      prev_left = left;
    }
    EdgeBVP b1 = b;
    b1.b = 1.0;
    CHECK(endpoint_map(b1).second > endpoint_map(b).second);
    EdgeBVP a1 = b;
    a1.a = 1.0;
    CHECK(endpoint_map(a1).first > endpoint_map(b).first);
  }
}

TEST_CASE("flux shooting") {
  const EdgeBVP b = bvp(32, 1.0, 2.0, Nonlinearity::identity(), [](double) { return 0.0; });
  SolverConfig cfg;
  CHECK(std::abs(flux_shoot(b, Side::Right, 0.0, cfg)) <= 1e-8);
  const double up = flux_shoot(b, Side::Right, 1.0, cfg);
  CHECK(up > 0.0);
  EdgeBVP check = b;
  check.b = up;
  CHECK(std::abs(endpoint_map(check, cfg).second - 1.0) <= 1e-8);
  const double down = flux_shoot(b, Side::Right, -1.0, cfg);
  CHECK(down == doctest::Approx(-up).epsilon(1e-8).scale(1.0));
  const double left = flux_shoot(b, Side::Left, 2.0, cfg);
  EdgeBVP cl = b;
  cl.a = left;
  CHECK(std::abs(endpoint_map(cl, cfg).first - 2.0) <= 1e-8);
}

TEST_CASE("Jacobian matches finite differences") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1, 1);
  for (double p : {1.5, 2.0, 3.0}) {
    for (const auto& gamma : {Nonlinearity::identity(), Nonlinearity::power(0.5), Nonlinearity::power(3.0)}) {
      const EdgeBVP b = bvp(12, 1.0, p, gamma, [](double x) { return x; }, 0.1, 0.2);
      std::vector<double> u(13);
      for (double& x : u) x = U(rng);
      const double eps = 1e-2;
      const Tridiagonal J = assemble_edge_jacobian(b, u, eps);
      for (std::size_t k = 0; k < u.size(); ++k) {
        const double h = 1e-6;
        auto up = u, dn = u;
        up[k] += h;
        dn[k] -= h;
        const auto rp = assemble_edge_residual(b, up, eps), rm = assemble_edge_residual(b, dn, eps);
        for (std::size_t j = (k == 0 ? 0 : k - 1); j <= std::min(k + 1, u.size() - 1); ++j) {
          const double fd = (rp[j] - rm[j]) / (2 * h);
          const double an = j == k ? J.diag[j] : (j < k ? J.upper[j] : J.lower[j]);
          CHECK(std::abs(fd - an) <= 1e-5 * (std::abs(an) + 1e-3));
        }
      }
    }
  }
}

TEST_CASE("tridiagonal solve") {
  Tridiagonal m{{0, -1, -1, -1}, {2, 2, 2, 2}, {-1, -1, -1, 0}};
  std::vector<double> rhs{1, 0, 0, 1};
  REQUIRE(solve_tridiagonal(m, rhs));
  for (double x : rhs) CHECK(x == doctest::Approx(1.0));
}
