#include "uqalign/measures.hpp"

#include <cmath>

namespace uqalign {
namespace {

UncertaintyTriple decompose_generic(const ScoringRule& rule, const SecondOrderEnsemble& q) {
  const Categorical avg = model_average(q);
  double tu = 0.0;
  double au = 0.0;
  for (std::size_t m = 0; m < q.size(); ++m) {
    tu += q.weight(m) * rule.expected_loss(avg, q[m]);
    au += q.weight(m) * rule.entropy(q[m]);
  }
  return {tu, au, tu - au, std::string(rule.name())};
}

UncertaintyTriple closed_log(const LogScore& rule, const SecondOrderEnsemble& q) {
  const Categorical avg = model_average(q);
  double tu = 0.0;
  for (double p : avg.probs()) {
    if (p > 0.0) tu += p * rule.neg_log(p);
  }
  double au = 0.0;
  double eu = 0.0;
  for (std::size_t m = 0; m < q.size(); ++m) {
    const double w = q.weight(m);
    double entropy = 0.0;
    double kl = 0.0;
    for (std::size_t k = 0; k < avg.size(); ++k) {
      const double p = q[m][k];
      if (p <= 0.0) continue;
      entropy += p * rule.neg_log(p);
      kl += p * (rule.neg_log(avg[k]) - rule.neg_log(p));
    }
    au += w * entropy;
    eu += w * kl;
  }
  return {tu, au, eu, "log"};
}

UncertaintyTriple closed_brier(const SecondOrderEnsemble& q) {
  const Categorical avg = model_average(q);
  double avg_sq = 0.0;
  for (double p : avg.probs()) avg_sq += p * p;
  double au = 0.0;
  double eu = 0.0;
  for (std::size_t m = 0; m < q.size(); ++m) {
    double sq = 0.0;
    double dist = 0.0;
    for (std::size_t k = 0; k < avg.size(); ++k) {
      const double p = q[m][k];
      sq += p * p;
      dist += (avg[k] - p) * (avg[k] - p);
    }
    au += q.weight(m) * (1.0 - sq);
    eu += q.weight(m) * dist;
  }
  return {1.0 - avg_sq, au, eu, "brier"};
}

UncertaintyTriple closed_zero_one(const SecondOrderEnsemble& q) {
  const Categorical avg = model_average(q);
  const std::size_t a = avg.argmax();
  double au = 0.0;
  double eu = 0.0;
  for (std::size_t m = 0; m < q.size(); ++m) {
    const double top = q[m].max();
    au += q.weight(m) * (1.0 - top);
    eu += q.weight(m) * (top - q[m][a]);
  }
  return {1.0 - avg[a], au, eu, "zero_one"};
}

}  // namespace

std::string_view to_string(Component c) noexcept {
  switch (c) {
    case Component::total:
      return "tu";
    case Component::aleatoric:
      return "au";
    case Component::epistemic:
      return "eu";
  }
  return "?";
}

Component parse_component(std::string_view s) {
  if (s == "tu") return Component::total;
  if (s == "au") return Component::aleatoric;
  if (s == "eu") return Component::epistemic;
  throw ConfigError("unknown uncertainty component '" + std::string(s) +
                    "' (expected tu, au or eu)");
}

double UncertaintyTriple::get(Component c) const noexcept {
  switch (c) {
    case Component::total:
      return tu;
    case Component::aleatoric:
      return au;
    case Component::epistemic:
      return eu;
  }
  return tu;
}

bool has_closed_form(const ScoringRule& rule) noexcept {
  return dynamic_cast<const LogScore*>(&rule) != nullptr ||
         dynamic_cast<const BrierScore*>(&rule) != nullptr ||
         dynamic_cast<const ZeroOneScore*>(&rule) != nullptr;
}

UncertaintyTriple decompose(const ScoringRule& rule, const SecondOrderEnsemble& q,
                            DecomposeMode mode) {
  if (mode == DecomposeMode::generic) return decompose_generic(rule, q);

  if (const auto* log = dynamic_cast<const LogScore*>(&rule)) return closed_log(*log, q);
  if (dynamic_cast<const BrierScore*>(&rule) != nullptr) return closed_brier(q);
  if (dynamic_cast<const ZeroOneScore*>(&rule) != nullptr) return closed_zero_one(q);

  if (mode == DecomposeMode::closed_form) {
    throw InvalidArgument("no closed-form decomposition for rule '" + std::string(rule.name()) +
                          "'");
  }
  return decompose_generic(rule, q);
}

double jensen_gap(const ScoringRule& rule, const SecondOrderEnsemble& q) {
  const Categorical avg = model_average(q);
  double expected = 0.0;
  for (std::size_t m = 0; m < q.size(); ++m) expected += q.weight(m) * rule.potential(q[m]);
  return expected - rule.potential(avg);
}

std::vector<UncertaintyTriple> batch_decompose(const ScoringRule& rule,
                                               std::span<const SecondOrderEnsemble> qs,
                                               DecomposeMode mode) {
  std::vector<UncertaintyTriple> out;
  if (qs.empty()) return out;
  const std::size_t k = qs.front().num_classes();
  for (const auto& q : qs) {
    if (q.num_classes() != k) throw DimensionMismatch("batch mixes class counts");
  }
  out.reserve(qs.size());
  for (const auto& q : qs) out.push_back(decompose(rule, q, mode));
  return out;
}

}  // namespace uqalign
