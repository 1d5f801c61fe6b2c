#include "uqalign/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace uqalign {

void ScoringRule::check_label(const Categorical& pred, Label y) {
  if (y >= pred.size()) {
    throw InvalidArgument("label " + std::to_string(y) + " out of range for " +
                          std::to_string(pred.size()) + " classes");
  }
}

void ScoringRule::check_same_size(const Categorical& a, const Categorical& b) {
  if (a.size() != b.size()) {
    throw DimensionMismatch("distributions differ in class count (" + std::to_string(a.size()) +
                            " vs " + std::to_string(b.size()) + ")");
  }
}

double ScoringRule::expected_loss(const Categorical& pred, const Categorical& truth) const {
  check_same_size(pred, truth);
  double total = 0.0;
  for (std::size_t y = 0; y < truth.size(); ++y) {
    if (truth[y] > 0.0) total += truth[y] * score(pred, y);
  }
  return total;
}

double ScoringRule::entropy(const Categorical& truth) const {
  return expected_loss(truth, truth);
}

double ScoringRule::divergence(const Categorical& pred, const Categorical& truth) const {
  return expected_loss(pred, truth) - entropy(truth);
}

double ScoringRule::potential(const Categorical& theta) const {
  if (!strictly_proper()) {
    throw UnsupportedOperation("no convex potential exposed for rule '" + std::string(name()) +
                               "'");
  }
  return -entropy(theta);
}

// ---------------------------------------------------------------------------

LogScore::LogScore(double clamp) : clamp_(clamp) {
  if (!(clamp > 0.0 && clamp < 1.0)) throw InvalidArgument("log clamp must be in (0, 1)");
}

double LogScore::neg_log(double p) const noexcept { return -std::log(std::max(p, clamp_)); }

double LogScore::score(const Categorical& pred, Label y) const {
  check_label(pred, y);
  return neg_log(pred[y]);
}

double LogScore::expected_loss(const Categorical& pred, const Categorical& truth) const {
  check_same_size(pred, truth);
  double total = 0.0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    if (truth[k] > 0.0) total += truth[k] * neg_log(pred[k]);
  }
  return total;
}

double LogScore::entropy(const Categorical& truth) const {
  double total = 0.0;
  for (double p : truth.probs()) {
    if (p > 0.0) total += p * neg_log(p);
  }
  return total;
}

// ---------------------------------------------------------------------------

double BrierScore::score(const Categorical& pred, Label y) const {
  check_label(pred, y);
  double total = 0.0;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    const double d = pred[k] - (k == y ? 1.0 : 0.0);
    total += d * d;
  }
  return total;
}

// sum_y truth_y (||pred||^2 - 2 pred_y + 1)
double BrierScore::expected_loss(const Categorical& pred, const Categorical& truth) const {
  check_same_size(pred, truth);
  double sq = 0.0;
  double cross = 0.0;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    sq += pred[k] * pred[k];
    cross += truth[k] * pred[k];
  }
  return sq - 2.0 * cross + 1.0;
}

double BrierScore::entropy(const Categorical& truth) const {
  double sq = 0.0;
  for (double p : truth.probs()) sq += p * p;
  return 1.0 - sq;
}

// ---------------------------------------------------------------------------

double ZeroOneScore::score(const Categorical& pred, Label y) const {
  check_label(pred, y);
  return pred.argmax() == y ? 0.0 : 1.0;
}

double ZeroOneScore::expected_loss(const Categorical& pred, const Categorical& truth) const {
  check_same_size(pred, truth);
  return 1.0 - truth[pred.argmax()];
}

double ZeroOneScore::entropy(const Categorical& truth) const { return 1.0 - truth.max(); }

// ---------------------------------------------------------------------------

RuleRegistry::RuleRegistry() {
  add("log", [] { return std::make_shared<const LogScore>(); });
  add("brier", [] { return std::make_shared<const BrierScore>(); });
  add("zero_one", [] { return std::make_shared<const ZeroOneScore>(); });
}

RuleRegistry& RuleRegistry::global() {
  static RuleRegistry registry;
  return registry;
}

void RuleRegistry::add(std::string name, Factory factory) {
  factories_[std::move(name)] = std::move(factory);
}

bool RuleRegistry::contains(std::string_view name) const {
  return factories_.find(name) != factories_.end();
}

RulePtr RuleRegistry::make(std::string_view name) const {
  const auto it = factories_.find(name);
  if (it == factories_.end()) {
    throw ConfigError("unknown scoring rule '" + std::string(name) + "'");
  }
  return it->second();
}

std::vector<std::string> RuleRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : factories_) out.push_back(name);
  return out;
}

RulePtr make_rule(std::string_view name) { return RuleRegistry::global().make(name); }

std::vector<RulePtr> builtin_rules() {
  return {std::make_shared<const LogScore>(), std::make_shared<const BrierScore>(),
          std::make_shared<const ZeroOneScore>()};
}

}  // namespace uqalign
