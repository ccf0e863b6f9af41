#include "isinglearn/optimizer.hpp"

#include <chrono>
#include <cmath>

#include "isinglearn/errors.hpp"
#include "isinglearn/mple.hpp"

namespace isinglearn {

void validate(const FitConfig& cfg) {
  if (cfg.max_iters < 1) throw ParameterError("optimizer.max_iters must be >= 1");
  if (cfg.grad_map_tol && !(*cfg.grad_map_tol > 0.0)) throw ParameterError("optimizer.grad_map_tol must be positive");
  if (!(cfg.initial_step > 0.0)) throw ParameterError("optimizer.initial_step must be positive");
  if (!(cfg.backtracking_factor > 0.0 && cfg.backtracking_factor < 1.0))
    throw ParameterError("optimizer.backtracking_factor must lie in (0, 1)");
  if (!(cfg.armijo_const > 0.0 && cfg.armijo_const < 1.0))
    throw ParameterError("optimizer.armijo_const must lie in (0, 1)");
  if (!(cfg.projection.tol > 0.0)) throw ParameterError("optimizer.projection_tol must be positive");
  if (cfg.projection.max_iter < 1) throw ParameterError("optimizer.projection_max_iter must be >= 1");
}

FitReport fit_mple(const SampleBatch& samples, const Vector& field, const ConstraintSet& set, const FitConfig& cfg) {
  validate(cfg);
  validate(set);
  const auto started = std::chrono::steady_clock::now();
  const int n = samples.dimension();
  const double scale = static_cast<double>(n) * samples.count();
  const PseudolikelihoodContext ctx(samples, field);

  FitReport report;
  report.grad_map_tol = cfg.grad_map_tol.value_or(1e-6 * scale);
  const double tol = report.grad_map_tol / scale;

  auto project_counted = [&](const CouplingMatrix& m) {
    ProjectionResult r = project(set, m, cfg.projection);
    if (!r.converged) ++report.projection_warnings;
    return std::move(r.matrix);
  };
  auto value = [&](const CouplingMatrix& m) {
    const double v = ctx.objective(m) / scale;
    if (!std::isfinite(v)) throw NumericalError("non-finite pseudolikelihood objective during fit");
    return v;
  };

  CouplingMatrix current = project_counted(cfg.init.value_or(CouplingMatrix::zero(n)));
  if (current.size() != n) throw ParameterError("optimizer.init has the wrong dimension");
  double f = value(current);
  CouplingMatrix best = current;
  double best_f = f;
  report.objective_trace.push_back(f * scale);

  double step = cfg.initial_step;
  for (int it = 0; it < cfg.max_iters; ++it) {
    const CouplingMatrix grad = (1.0 / scale) * ctx.gradient(current);
    step = std::min(cfg.initial_step, step / cfg.backtracking_factor);
    bool accepted = false;
    CouplingMatrix candidate;
    double candidate_f = 0.0;
    while (step >= 1e-18) {
      candidate = project_counted(current - step * grad);
      candidate_f = value(candidate);
      const double decrease = grad.upper_dot(candidate - current);
      if (candidate_f <= f + cfg.armijo_const * decrease) {
        accepted = true;
        break;
      }
      step *= cfg.backtracking_factor;
    }
    report.iterations = it + 1;
    if (!accepted) break;  // step underflow: projection and gradient disagree

    // Gradient mapping at the current iterate for the accepted step.
    const double grad_map = (candidate.matrix() - current.matrix()).norm() / step;
    report.grad_map_trace.push_back(grad_map * scale);
    // Armijo guarantees descent up to projection inexactness; never record an increase.
    if (candidate_f <= f) {
      current = std::move(candidate);
      f = candidate_f;
    }
    report.objective_trace.push_back(f * scale);
    if (f < best_f) {
      best_f = f;
      best = current;
    }
    if (grad_map <= tol) {
      report.converged = true;
      break;
    }
  }

  report.estimate = std::move(best);
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

}  // namespace isinglearn
