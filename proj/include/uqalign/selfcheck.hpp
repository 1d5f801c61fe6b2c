#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "uqalign/core.hpp"

namespace uqalign::selfcheck {

struct SuiteResult {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  double max_error = 0.0;     ///< largest deviation seen, 0 for exact suites
  std::string first_failure;  ///< empty when every case passed

  [[nodiscard]] bool passed() const noexcept { return failures == 0; }
};

struct CheckOptions {
  std::size_t ensembles = 1000;
  std::size_t cost_vectors = 200;
  std::size_t bregman_points = 100;
  std::size_t auroc_cases = 200;
  Seed seed{20240101};
};

/// Random ensembles cycling through K in {2, 3, 5, 10} and M in {1, 2, 20}.
/// Members mix interior points, vectors with exact zeros and point masses;
/// every other ensemble carries non-uniform weights.
std::vector<SecondOrderEnsemble> random_ensembles(std::size_t count, Seed seed);

/// TU = AU + EU within 1e-9 and EU >= -1e-12, for every built-in rule.
SuiteResult decomposition_identity(std::span<const SecondOrderEnsemble> qs);
/// Closed-form and generic paths agree within 1e-9 componentwise.
SuiteResult closed_form_equivalence(std::span<const SecondOrderEnsemble> qs);
/// jensen_gap equals EU within 1e-9 for log and Brier.
SuiteResult jensen_gap_identity(std::span<const SecondOrderEnsemble> qs);
/// Divergence equals the Bregman form of the potential, with the gradient
/// taken by central differences, within 1e-7 at interior points.
SuiteResult bregman_gradient(std::size_t points, Seed seed);
/// Expected loss never beats the truth's own entropy (all rules), and
/// strictly exceeds it for log and Brier when prediction != truth.
SuiteResult properness(std::size_t points, Seed seed);
/// optimal_order reaches the brute-force minimum exactly, and aulc * n
/// equals the weighted rearrangement sum within 1e-9. n in {2..7}.
SuiteResult rearrangement_oracle(std::size_t vectors, Seed seed);
/// Rank-based AUROC equals pairwise counting exactly, ties included.
SuiteResult auroc_pair_counting(std::size_t cases, Seed seed);

/// All suites, in the order above.
std::vector<SuiteResult> run_all(const CheckOptions& options);

}  // namespace uqalign::selfcheck
