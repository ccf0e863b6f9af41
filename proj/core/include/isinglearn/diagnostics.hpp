#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "isinglearn/core.hpp"
#include "isinglearn/exact.hpp"

namespace isinglearn {

// ---------------------------------------------------------------------------
// Subset conditioning

struct SubsetDecomposition {
  std::vector<std::vector<int>> subsets;  // sorted node indices, no empties
  double eta = 0.0;
  std::vector<int> membership_count;      // per node
  int target_count = 0;
};

struct SubsetOptions {
  double c = 64.0;            // r = ceil(c M^2 log n / eta^2)
  int resample_budget = 10000;  // per subset
  int placement_tries = 64;     // random subsets probed before opening a new one
};

/// Random subsets I_1..I_r such that every principal submatrix J_{I I} has
/// infinity norm <= eta and every node belongs to the same number of
/// subsets. Nodes are included with probability eta / (8M); violating
/// subsets are resampled, then memberships are rebalanced to exactly
/// ceil(eta r / (8M)) per node.
SubsetDecomposition subset_decomposition(const CouplingMatrix& j, double width_bound, double eta,
                                         std::uint64_t seed, const SubsetOptions& opts = {});

struct SubsetCheck {
  double max_width = 0.0;  // max over subsets of |J_{I I}|_inf
  int min_count = 0;
  int max_count = 0;
  bool widths_ok = false;
  bool balanced = false;
  bool ok() const { return widths_ok && balanced; }
};

/// Recomputes both properties from scratch.
SubsetCheck check_subset_decomposition(const CouplingMatrix& j, const SubsetDecomposition& dec);

// ---------------------------------------------------------------------------
// Regularity

struct RegularityEntry {
  int id = 0;
  double e_jstar = 0.0;  // E_{J*}[|(J - J*) X|^2]
  double e_j = 0.0;      // E_J[|(J - J*) X|^2]
  double ratio = 0.0;
};

struct RegularityReport {
  double gamma_probe = 0.0;
  std::vector<RegularityEntry> ratios;
  std::vector<int> excluded;  // directions with 0/0
  double max_ratio = 0.0;
};

/// Random symmetric zero-diagonal directions A, each rescaled so that
/// E_{J*}[|AX|^2] = gamma; reports E_{J*+A}[|AX|^2] / gamma.
RegularityReport regularity_probe(const IsingModel& model, double gamma, int num_perturbations,
                                  std::uint64_t seed, int cap = kTableCap);

/// Same as regularity_probe with caller-supplied directions.
RegularityReport regularity_ratios(const IsingModel& model, const std::vector<CouplingMatrix>& directions,
                                   double gamma, int cap = kTableCap);

// ---------------------------------------------------------------------------
// Metric comparison

struct MetricComparison {
  double e_jstar = 0.0;  // E_{J*}[|(J2 - J*) X|^2]
  double frob_sq = 0.0;  // |J2 - J*|_F^2
  double ratio = 0.0;    // NaN when degenerate
  bool degenerate = false;
};

MetricComparison metric_comparison(const IsingModel& model, const CouplingMatrix& other, int cap = kTableCap);

// ---------------------------------------------------------------------------
// TV versus Frobenius

struct TvFrobeniusResult {
  double tv = 0.0;
  double frob = 0.0;
  bool bound_ok = false;  // tv <= n * frob
  double kl = 0.0;        // KL(P_1 || P_2)
  double pinsker_slack = 0.0;  // sqrt(KL / 2) - tv, nonnegative by Pinsker
};

/// Both models must have zero external field.
TvFrobeniusResult tv_frobenius_check(const IsingModel& m1, const IsingModel& m2, int cap = kTableCap);

// ---------------------------------------------------------------------------
// Gradient concentration

struct GradientConcentration {
  double mean = 0.0;
  double stddev = 0.0;
  double t_statistic = 0.0;  // mean / (stddev / sqrt(batches))
  /// Fraction of batches with |first derivative| > t |A|_F sqrt(l), t = 1, 2, 4.
  std::array<double, 3> exceedance{};
  std::vector<double> values;
};

GradientConcentration gradient_concentration_probe(const IsingModel& model, const CouplingMatrix& direction,
                                                   int l, int batches, std::uint64_t seed, int cap = kTableCap);

}  // namespace isinglearn
