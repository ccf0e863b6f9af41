#pragma once

#include <optional>
#include <vector>

#include "isinglearn/core.hpp"
#include "isinglearn/projections.hpp"

namespace isinglearn {

struct FitConfig {
  int max_iters = 2000;
  /// Stop once |J_t - project(J_t - eta grad)|_F / eta falls below this
  /// (unnormalized units). Unset means 1e-6 * n * l.
  std::optional<double> grad_map_tol;
  double initial_step = 1.0;
  double backtracking_factor = 0.5;
  double armijo_const = 1e-4;
  /// Starting matrix; zero when unset. Projected onto the set before use.
  std::optional<CouplingMatrix> init;
  ProjectionOptions projection;
};

/// Throws ParameterError naming the offending field.
void validate(const FitConfig& cfg);

struct FitReport {
  CouplingMatrix estimate;             // best iterate by objective
  int iterations = 0;
  std::vector<double> objective_trace; // phi(J_t), unnormalized
  std::vector<double> grad_map_trace;  // gradient-mapping norm, unnormalized
  bool converged = false;
  double wall_time = 0.0;              // seconds
  int projection_warnings = 0;         // projections that hit max_iter
  double grad_map_tol = 0.0;           // resolved tolerance
};

/// Projected gradient descent on the negative log-pseudolikelihood over
/// `set`, with Armijo backtracking. Internally minimizes phi / (n l).
FitReport fit_mple(const SampleBatch& samples, const Vector& field, const ConstraintSet& set,
                   const FitConfig& cfg = {});

}  // namespace isinglearn
