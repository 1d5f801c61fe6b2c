#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "uqalign/core.hpp"
#include "uqalign/measures.hpp"
#include "uqalign/scoring.hpp"

namespace uqalign {

using Permutation = std::vector<std::size_t>;

/// Loss-rejection curve. Point k (1-based) keeps the k least uncertain
/// instances: alpha = k/n and loss is their mean task loss. The alpha = 0
/// point is omitted.
struct RejectionCurve {
  std::vector<double> alphas;
  std::vector<double> losses;
  double aulc = 0.0;
  /// Per-instance task losses in input order, and the keep order used.
  std::vector<double> instance_losses;
  Permutation order;
};

/// Stable ascending sort permutation of `uncertainties` (most certain first;
/// ties keep input order). Throws InvalidArgument on NaN.
Permutation rejection_order(std::span<const double> uncertainties);

/// Builds the curve for costs ordered by rejection_order(uncertainties).
/// aulc is the Riemann sum with step 1/n, i.e. the mean of the curve points.
RejectionCurve loss_rejection_curve(std::span<const double> per_instance_losses,
                                    std::span<const double> uncertainties);

/// w_j = sum_{k=j}^{n} 1/k for j = 1..n.
std::vector<double> aulc_weights(std::size_t n);

/// S(pi) = sum_j w_j c_{pi(j)} = n * aulc for the ordering pi.
double rearrangement_sum(std::span<const double> costs, std::span<const std::size_t> order);

/// Ordering that minimises the expected AULC: ascending expected loss, stable.
Permutation optimal_order(std::span<const double> expected_losses);

struct BruteForceResult {
  Permutation order;
  double value = 0.0;
};

inline constexpr std::size_t kBruteForceMaxSize = 9;

/// Exhaustive minimum of S(pi) over all n! orderings (n <= 9). Returns the
/// lexicographically first minimiser.
BruteForceResult brute_force_aulc(std::span<const double> expected_losses);

/// Selective prediction on a labelled test set: task losses are scored at
/// each ensemble's model average with `task_rule`, uncertainties are the
/// requested component of the decomposition under `unc_rule`.
RejectionCurve selective_experiment(std::span<const SecondOrderEnsemble> predictions,
                                    std::span<const Label> labels, const ScoringRule& unc_rule,
                                    Component unc_component, const ScoringRule& task_rule);

}  // namespace uqalign
