#include "uqalign/ood.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace uqalign {
namespace {

void check_scores(std::span<const double> id_scores, std::span<const double> ood_scores) {
  if (id_scores.empty() || ood_scores.empty()) {
    throw InvalidArgument("auroc needs nonempty iD and OoD score sets");
  }
  const auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(id_scores.begin(), id_scores.end(), finite) ||
      !std::all_of(ood_scores.begin(), ood_scores.end(), finite)) {
    throw InvalidArgument("auroc scores must be finite");
  }
}

// Both estimators count in half-pair units so they agree bit for bit.
double from_half_units(std::uint64_t half_units, std::size_t n_id, std::size_t n_ood) {
  return static_cast<double>(half_units) /
         (2.0 * static_cast<double>(n_id) * static_cast<double>(n_ood));
}

}  // namespace

double auroc(std::span<const double> id_scores, std::span<const double> ood_scores) {
  check_scores(id_scores, ood_scores);
  std::vector<double> sorted(id_scores.begin(), id_scores.end());
  std::sort(sorted.begin(), sorted.end());
  std::uint64_t half_units = 0;
  for (double o : ood_scores) {
    const auto lo = std::lower_bound(sorted.begin(), sorted.end(), o);
    const auto hi = std::upper_bound(lo, sorted.end(), o);
    const auto below = static_cast<std::uint64_t>(lo - sorted.begin());
    const auto equal = static_cast<std::uint64_t>(hi - lo);
    half_units += 2 * below + equal;
  }
  return from_half_units(half_units, id_scores.size(), ood_scores.size());
}

double auroc_pairwise(std::span<const double> id_scores, std::span<const double> ood_scores) {
  check_scores(id_scores, ood_scores);
  std::uint64_t half_units = 0;
  for (double i : id_scores) {
    for (double o : ood_scores) {
      if (o > i) {
        half_units += 2;
      } else if (o == i) {
        half_units += 1;
      }
    }
  }
  return from_half_units(half_units, id_scores.size(), ood_scores.size());
}

OodReport ood_experiment(const Predictor& predict, const Dataset& id_data, const Dataset& ood_data,
                         const ScoringRule& rule, Component component) {
  if (id_data.num_features() != ood_data.num_features()) {
    throw DimensionMismatch("iD and OoD datasets differ in feature dimension");
  }
  const auto score_all = [&](const Dataset& data) {
    std::vector<double> scores(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
      scores[i] = decompose(rule, predict(data.row(i))).get(component);
    }
    return scores;
  };
  const auto id_scores = score_all(id_data);
  const auto ood_scores = score_all(ood_data);
  return {auroc(id_scores, ood_scores), id_data.size(), ood_data.size(), std::string(rule.name()),
          component};
}

}  // namespace uqalign
