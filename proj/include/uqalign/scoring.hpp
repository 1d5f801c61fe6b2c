#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "uqalign/core.hpp"

namespace uqalign {

/// A negatively oriented scoring rule l(pred, y).
///
/// Subclasses must provide `score`. The expected score, entropy and
/// potential have generic defaults built on `score`; the built-in rules
/// override them with closed forms.
class ScoringRule {
 public:
  virtual ~ScoringRule() = default;

  [[nodiscard]] virtual std::string_view name() const = 0;
  [[nodiscard]] virtual bool strictly_proper() const = 0;

  /// Loss of reporting `pred` when `y` occurs.
  [[nodiscard]] virtual double score(const Categorical& pred, Label y) const = 0;

  /// E_{Y ~ truth}[score(pred, Y)].
  [[nodiscard]] virtual double expected_loss(const Categorical& pred,
                                             const Categorical& truth) const;

  /// Expected loss of predicting the truth itself.
  [[nodiscard]] virtual double entropy(const Categorical& truth) const;

  /// Excess expected loss of `pred` over the truth: expected_loss - entropy.
  [[nodiscard]] double divergence(const Categorical& pred, const Categorical& truth) const;

  /// Convex potential G = -entropy. Throws UnsupportedOperation for rules
  /// that are not strictly proper.
  [[nodiscard]] virtual double potential(const Categorical& theta) const;

 protected:
  static void check_label(const Categorical& pred, Label y);
  static void check_same_size(const Categorical& a, const Categorical& b);
};

/// Logarithmic score -log(pred_y). Probabilities are clamped to
/// [clamp, 1] before the log so every score stays finite.
class LogScore final : public ScoringRule {
 public:
  static constexpr double kDefaultClamp = 1e-12;

  explicit LogScore(double clamp = kDefaultClamp);

  [[nodiscard]] std::string_view name() const override { return "log"; }
  [[nodiscard]] bool strictly_proper() const override { return true; }
  [[nodiscard]] double score(const Categorical& pred, Label y) const override;
  [[nodiscard]] double expected_loss(const Categorical& pred,
                                     const Categorical& truth) const override;
  [[nodiscard]] double entropy(const Categorical& truth) const override;

  [[nodiscard]] double clamp() const noexcept { return clamp_; }
  /// -log(max(p, clamp)).
  [[nodiscard]] double neg_log(double p) const noexcept;

 private:
  double clamp_;
};

/// Quadratic (Brier) score sum_k (pred_k - [k = y])^2.
class BrierScore final : public ScoringRule {
 public:
  [[nodiscard]] std::string_view name() const override { return "brier"; }
  [[nodiscard]] bool strictly_proper() const override { return true; }
  [[nodiscard]] double score(const Categorical& pred, Label y) const override;
  [[nodiscard]] double expected_loss(const Categorical& pred,
                                     const Categorical& truth) const override;
  [[nodiscard]] double entropy(const Categorical& truth) const override;
};

/// Zero-one loss 1 - [argmax pred = y]; proper but not strictly proper.
class ZeroOneScore final : public ScoringRule {
 public:
  [[nodiscard]] std::string_view name() const override { return "zero_one"; }
  [[nodiscard]] bool strictly_proper() const override { return false; }
  [[nodiscard]] double score(const Categorical& pred, Label y) const override;
  [[nodiscard]] double expected_loss(const Categorical& pred,
                                     const Categorical& truth) const override;
  [[nodiscard]] double entropy(const Categorical& truth) const override;
};

using RulePtr = std::shared_ptr<const ScoringRule>;

/// Name-keyed rule registry. The built-ins "log", "brier" and "zero_one"
/// are always present; user rules can be added with `add`.
class RuleRegistry {
 public:
  using Factory = std::function<RulePtr()>;

  RuleRegistry();

  /// Process-wide registry used by the CLI.
  static RuleRegistry& global();

  void add(std::string name, Factory factory);
  [[nodiscard]] bool contains(std::string_view name) const;
  /// Throws ConfigError for unknown names.
  [[nodiscard]] RulePtr make(std::string_view name) const;
  [[nodiscard]] std::vector<std::string> names() const;

 private:
  std::map<std::string, Factory, std::less<>> factories_;
};

/// Shorthand for RuleRegistry::global().make(name).
RulePtr make_rule(std::string_view name);

/// The three built-in rules in canonical order: log, brier, zero_one.
std::vector<RulePtr> builtin_rules();

}  // namespace uqalign
