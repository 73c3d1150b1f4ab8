#include "newton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qgdiff/error.hpp"

namespace qgdiff::detail {
namespace {

double norm2(const std::vector<double>& r) {
  double s = 0.0;
  for (double x : r) s += x * x;
  return std::sqrt(s);
}

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

enum class Outcome { Converged, Stalled, Exhausted };

class Driver {
 public:
  Driver(DiscreteSystem& sys, const SolverConfig& cfg) : sys_(sys), cfg_(cfg) {
    r_.resize(sys.size());
    d_.resize(sys.size());
    trial_.resize(sys.size());
    r_trial_.resize(sys.size());
  }

  // Relative sup residual of the exact model; tracks the best iterate seen.
  double exact_residual(const std::vector<double>& u) {
    std::vector<double> r(sys_.size());
    const double scale = sys_.residual(u, 0.0, r);
    const double rel = all_finite(r) ? sup_norm(r) / scale : std::numeric_limits<double>::infinity();
    if (rel < best_rel_) {
      best_rel_ = rel;
      best_ = u;
      best_scale_ = scale;
    }
    return rel;
  }

  Outcome newton(std::vector<double>& u, double eps, double target, int max_iter) {
    const double eps_jac = std::max(eps, cfg_.jacobian_floor);
    double scale = sys_.residual(u, eps, r_);
    if (!all_finite(r_)) return Outcome::Stalled;
    double nr = norm2(r_);
    for (int it = 0; it < max_iter; ++it) {
      if (sup_norm(r_) <= target * scale) return Outcome::Converged;
      if (!sys_.step(u, eps_jac, StepKind::Newton, r_, d_) || !all_finite(d_)) return Outcome::Stalled;
      ++stats_.newton_iterations;
      double lambda = 1.0;
      bool accepted = false;
      for (int bt = 0; bt <= cfg_.max_backtracks; ++bt) {
        for (std::size_t i = 0; i < u.size(); ++i) trial_[i] = u[i] + lambda * d_[i];
        const double trial_scale = sys_.residual(trial_, eps, r_trial_);
        const double nt = all_finite(r_trial_) ? norm2(r_trial_) : std::numeric_limits<double>::infinity();
        if (nt <= (1.0 - cfg_.armijo * lambda) * nr) {
          u.swap(trial_);
          r_.swap(r_trial_);
          nr = nt;
          scale = trial_scale;
          accepted = true;
          break;
        }
        lambda *= 0.5;
      }
      if (!accepted) return sup_norm(r_) <= target * scale ? Outcome::Converged : Outcome::Stalled;
      stats_.history.push_back(sup_norm(r_) / scale);
    }
    return sup_norm(r_) <= target * scale ? Outcome::Converged : Outcome::Exhausted;
  }

  // Frozen-coefficient fixed point iteration; keeps the best iterate of the run.
  void picard(std::vector<double>& u, double eps) {
    const double eps_jac = std::max(eps, cfg_.jacobian_floor);
    std::vector<double> best = u;
    sys_.residual(u, eps, r_);
    double best_norm = norm2(r_);
    for (int it = 0; it < cfg_.picard_iterations; ++it) {
      if (!sys_.step(u, eps_jac, StepKind::Picard, r_, d_) || !all_finite(d_)) break;
      for (std::size_t i = 0; i < u.size(); ++i) u[i] += d_[i];
      sys_.residual(u, eps, r_);
      if (!all_finite(r_)) break;
      const double nr = norm2(r_);
      if (nr < best_norm) {
        best_norm = nr;
        best = u;
      }
    }
    u = best;
  }

  // Newton, then Picard and one more Newton round if it stalls.
  Outcome stage(std::vector<double>& u, double eps, double target) {
    Outcome out = newton(u, eps, target, cfg_.max_newton);
    if (out == Outcome::Converged) return out;
    picard(u, eps);
    return newton(u, eps, target, cfg_.max_newton);
  }

  NewtonStats run(std::vector<double>& u) {
    const double final_target = 1e-3 * cfg_.tol;
    const std::vector<double> start = u;
    exact_residual(u);

    if (cfg_.try_direct) {
      std::vector<double> w = u;
      // A stall below tol is the round-off floor on fine grids, not a failure.
      newton(w, 0.0, final_target, cfg_.max_newton);
      if (exact_residual(w) <= cfg_.tol) return finish(u, w);
    }

    std::vector<double> w = start;
    for (double eps = cfg_.eps_start; eps >= cfg_.eps_end * 0.999; eps *= cfg_.eps_factor) {
      ++stats_.continuation_steps;
      std::vector<double> saved = w;
      if (stage(w, eps, 1e-8) == Outcome::Stalled && !all_finite(w)) w = saved;
    }
    stage(w, 0.0, final_target);
    if (exact_residual(w) <= cfg_.tol) return finish(u, w);

    // Last resort: restart the exact stage from the best iterate seen.
    if (!best_.empty()) {
      w = best_;
      stage(w, 0.0, final_target);
      if (exact_residual(w) <= cfg_.tol) return finish(u, w);
    }
    u = best_.empty() ? start : best_;
    throw SolverError(Errc::NewtonDiverged,
                      "Newton iteration failed to reach the tolerance (best relative residual " +
                          std::to_string(best_rel_) + ")",
                      u, stats_.history);
  }

 private:
  NewtonStats finish(std::vector<double>& u, std::vector<double>& w) {
    u.swap(w);
    std::vector<double> r(sys_.size());
    stats_.scale = sys_.residual(u, 0.0, r);
    stats_.residual_sup = sup_norm(r);
    return stats_;
  }

  DiscreteSystem& sys_;
  const SolverConfig& cfg_;
  NewtonStats stats_;
  std::vector<double> r_, d_, trial_, r_trial_;
  std::vector<double> best_;
  double best_rel_ = std::numeric_limits<double>::infinity();
  double best_scale_ = 1.0;
};

}  // namespace

double sup_norm(const std::vector<double>& r) {
  double m = 0.0;
  for (double x : r) m = std::max(m, std::abs(x));
  return m;
}

NewtonStats solve_system(DiscreteSystem& sys, std::vector<double>& u, const SolverConfig& cfg) {
  Driver driver(sys, cfg);
  return driver.run(u);
}

}  // namespace qgdiff::detail
