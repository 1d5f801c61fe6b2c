#include "uqalign/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

namespace uqalign {

Categorical::Categorical(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.size() < 2) {
    throw InvalidArgument("categorical needs at least 2 classes");
  }
  double sum = 0.0;
  for (double p : probs_) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
      throw InvalidArgument("not a distribution: entry outside [0, 1]");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSimplexTolerance) {
    throw InvalidArgument("not a distribution: entries sum to " + std::to_string(sum));
  }
}

std::size_t Categorical::argmax() const noexcept {
  std::size_t best = 0;
  for (std::size_t k = 1; k < probs_.size(); ++k) {
    if (probs_[k] > probs_[best]) best = k;
  }
  return best;
}

Categorical Categorical::uniform(std::size_t k) {
  return Categorical(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

Categorical Categorical::point_mass(std::size_t k, std::size_t at) {
  if (at >= k) throw InvalidArgument("point mass index out of range");
  std::vector<double> p(k, 0.0);
  p[at] = 1.0;
  return Categorical(std::move(p));
}

Categorical validate_simplex(std::span<const double> v, double tol) {
  if (v.size() < 2) throw InvalidArgument("not a distribution: fewer than 2 entries");
  double sum = 0.0;
  for (double p : v) {
    if (!std::isfinite(p)) throw InvalidArgument("not a distribution: non-finite entry");
    if (p < -tol) throw InvalidArgument("not a distribution: negative entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > tol) {
    throw InvalidArgument("not a distribution: entries sum to " + std::to_string(sum));
  }
  std::vector<double> out(v.size());
  double clipped_sum = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    out[k] = std::max(v[k], 0.0);
    clipped_sum += out[k];
  }
  for (double& p : out) p = std::min(p / clipped_sum, 1.0);
  return Categorical(std::move(out));
}

SecondOrderEnsemble::SecondOrderEnsemble(std::vector<Categorical> members)
    : SecondOrderEnsemble(std::move(members), {}) {}

SecondOrderEnsemble::SecondOrderEnsemble(std::vector<Categorical> members,
                                         std::vector<double> weights)
    : members_(std::move(members)), weights_(std::move(weights)) {
  if (members_.empty()) throw InvalidArgument("ensemble needs at least one member");
  const std::size_t k = members_.front().size();
  for (const auto& m : members_) {
    if (m.size() != k) throw DimensionMismatch("ensemble members differ in class count");
  }
  if (weights_.empty()) {
    weights_.assign(members_.size(), 1.0 / static_cast<double>(members_.size()));
    return;
  }
  if (weights_.size() != members_.size()) {
    throw DimensionMismatch("ensemble weights and members differ in length");
  }
  double sum = 0.0;
  for (double w : weights_) {
    if (!std::isfinite(w) || w < 0.0) throw InvalidArgument("ensemble weight must be >= 0");
    sum += w;
  }
  if (std::abs(sum - 1.0) > kSimplexTolerance) {
    throw InvalidArgument("ensemble weights must sum to 1");
  }
}

Categorical model_average(const SecondOrderEnsemble& q) {
  std::vector<double> mean(q.num_classes(), 0.0);
  for (std::size_t m = 0; m < q.size(); ++m) {
    const double w = q.weight(m);
    const auto p = q[m].probs();
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += w * p[k];
  }
  // Rounding can push an entry a hair above 1 for point-mass ensembles.
  for (double& p : mean) p = std::min(p, 1.0);
  return Categorical(std::move(mean));
}

Dataset::Dataset(std::size_t num_features, std::size_t num_classes, std::vector<double> features,
                 std::vector<Label> labels, std::string source)
    : num_features_(num_features),
      num_classes_(num_classes),
      features_(std::move(features)),
      labels_(std::move(labels)),
      source_(std::move(source)) {
  if (num_features_ == 0) throw InvalidArgument("dataset needs at least one feature");
  if (num_classes_ < 2) throw InvalidArgument("dataset needs at least 2 classes");
  if (features_.size() != labels_.size() * num_features_) {
    throw DimensionMismatch("feature matrix rows do not match label count");
  }
  for (Label y : labels_) {
    if (y >= num_classes_) throw InvalidArgument("label out of range");
  }
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  std::vector<double> feats;
  feats.reserve(indices.size() * num_features_);
  std::vector<Label> labels;
  labels.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= size()) throw InvalidArgument("subset index out of range");
    const auto r = row(i);
    feats.insert(feats.end(), r.begin(), r.end());
    labels.push_back(labels_[i]);
  }
  return Dataset(num_features_, num_classes_, std::move(feats), std::move(labels), source_);
}

}  // namespace uqalign
