#include "uqalign/selective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace uqalign {
namespace {

Permutation stable_ascending(std::span<const double> values) {
  for (double v : values) {
    if (std::isnan(v)) throw InvalidArgument("NaN in ordering scores");
  }
  Permutation perm(values.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::stable_sort(perm.begin(), perm.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  return perm;
}

}  // namespace

Permutation rejection_order(std::span<const double> uncertainties) {
  return stable_ascending(uncertainties);
}

Permutation optimal_order(std::span<const double> expected_losses) {
  return stable_ascending(expected_losses);
}

RejectionCurve loss_rejection_curve(std::span<const double> per_instance_losses,
                                    std::span<const double> uncertainties) {
  if (per_instance_losses.size() != uncertainties.size()) {
    throw DimensionMismatch("losses and uncertainties differ in length");
  }
  const std::size_t n = per_instance_losses.size();
  if (n == 0) throw InvalidArgument("loss-rejection curve needs at least one instance");

  RejectionCurve curve;
  curve.order = rejection_order(uncertainties);
  curve.instance_losses.assign(per_instance_losses.begin(), per_instance_losses.end());
  curve.alphas.reserve(n);
  curve.losses.reserve(n);

  double running = 0.0;
  double area = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    running += per_instance_losses[curve.order[k - 1]];
    const double mean = running / static_cast<double>(k);
    curve.alphas.push_back(static_cast<double>(k) / static_cast<double>(n));
    curve.losses.push_back(mean);
    area += mean;
  }
  curve.alphas.back() = 1.0;
  curve.aulc = area / static_cast<double>(n);
  return curve;
}

std::vector<double> aulc_weights(std::size_t n) {
  if (n == 0) throw InvalidArgument("aulc weights need n >= 1");
  std::vector<double> w(n);
  double tail = 0.0;
  for (std::size_t j = n; j-- > 0;) {
    tail += 1.0 / static_cast<double>(j + 1);
    w[j] = tail;
  }
  return w;
}

double rearrangement_sum(std::span<const double> costs, std::span<const std::size_t> order) {
  if (costs.size() != order.size()) throw DimensionMismatch("ordering length differs from costs");
  const auto w = aulc_weights(costs.size());
  double s = 0.0;
  for (std::size_t j = 0; j < order.size(); ++j) s += w[j] * costs[order[j]];
  return s;
}

BruteForceResult brute_force_aulc(std::span<const double> expected_losses) {
  const std::size_t n = expected_losses.size();
  if (n == 0) throw InvalidArgument("brute-force aulc needs n >= 1");
  if (n > kBruteForceMaxSize) {
    throw InvalidArgument("brute-force aulc limited to n <= " +
                          std::to_string(kBruteForceMaxSize));
  }
  for (double c : expected_losses) {
    if (std::isnan(c)) throw InvalidArgument("NaN in expected losses");
  }
  const auto w = aulc_weights(n);
  Permutation perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});

  BruteForceResult best{perm, std::numeric_limits<double>::infinity()};
  do {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += w[j] * expected_losses[perm[j]];
    if (s < best.value) best = {perm, s};
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

RejectionCurve selective_experiment(std::span<const SecondOrderEnsemble> predictions,
                                    std::span<const Label> labels, const ScoringRule& unc_rule,
                                    Component unc_component, const ScoringRule& task_rule) {
  if (predictions.size() != labels.size()) {
    throw DimensionMismatch("predictions and labels differ in length");
  }
  std::vector<double> costs(predictions.size());
  std::vector<double> scores(predictions.size());
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const Categorical avg = model_average(predictions[i]);
    costs[i] = task_rule.score(avg, labels[i]);
    scores[i] = decompose(unc_rule, predictions[i]).get(unc_component);
  }
  return loss_rejection_curve(costs, scores);
}

}  // namespace uqalign
