#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>

#include "uqalign/core.hpp"
#include "uqalign/measures.hpp"
#include "uqalign/scoring.hpp"

namespace uqalign {

struct OodReport {
  double auroc = 0.5;
  std::size_t n_id = 0;
  std::size_t n_ood = 0;
  std::string rule_name;
  Component component = Component::epistemic;
};

/// Mann-Whitney AUROC with OoD as the positive class: the fraction of
/// (id, ood) pairs with ood > id, ties counting one half. Sort-based,
/// O((n + m) log n).
double auroc(std::span<const double> id_scores, std::span<const double> ood_scores);

/// Same statistic by direct enumeration of all n * m pairs.
double auroc_pairwise(std::span<const double> id_scores, std::span<const double> ood_scores);

/// Maps a feature row to a second-order prediction.
using Predictor = std::function<SecondOrderEnsemble(std::span<const double>)>;

/// Scores both datasets with the chosen uncertainty component and returns
/// the AUROC of separating OoD from iD instances.
OodReport ood_experiment(const Predictor& predict, const Dataset& id_data, const Dataset& ood_data,
                         const ScoringRule& rule, Component component);

}  // namespace uqalign
