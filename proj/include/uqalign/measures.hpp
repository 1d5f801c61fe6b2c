#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uqalign/core.hpp"
#include "uqalign/scoring.hpp"

namespace uqalign {

enum class Component { total, aleatoric, epistemic };

/// "tu" / "au" / "eu".
std::string_view to_string(Component c) noexcept;
/// Throws ConfigError for anything but "tu", "au", "eu".
Component parse_component(std::string_view s);

/// Total, aleatoric and epistemic uncertainty of one ensemble under one rule.
struct UncertaintyTriple {
  double tu = 0.0;
  double au = 0.0;
  double eu = 0.0;
  std::string rule_name;

  [[nodiscard]] double get(Component c) const noexcept;
};

enum class DecomposeMode {
  generic,      ///< expectations of expected_loss / entropy over the members
  closed_form,  ///< per-rule analytic formulas (log, brier, zero_one only)
  automatic,    ///< closed_form when available, else generic
};

/// Whether `rule` has an analytic decomposition.
bool has_closed_form(const ScoringRule& rule) noexcept;

/// TU = E_Q[L(avg, theta)], AU = E_Q[H(theta)], EU = TU - AU, where avg is
/// the model average of `q`.
///
/// Closed forms, with avg the model average:
///   log:      TU = S(avg),         AU = E[S(theta)],        EU = E[KL(theta || avg)]
///   brier:    TU = 1 - |avg|^2,    AU = E[1 - |theta|^2],   EU = E[|avg - theta|^2]
///   zero_one: TU = 1 - max avg,    AU = E[1 - max theta],   EU = E[max theta - theta_a]
/// with a = argmax avg (lowest index on ties). Throws InvalidArgument when
/// closed_form is requested for a rule without one.
UncertaintyTriple decompose(const ScoringRule& rule, const SecondOrderEnsemble& q,
                            DecomposeMode mode = DecomposeMode::automatic);

/// E_Q[G(theta)] - G(avg) for the convex potential G of a strictly proper
/// rule; equals the epistemic component. Throws UnsupportedOperation for
/// rules without a potential.
double jensen_gap(const ScoringRule& rule, const SecondOrderEnsemble& q);

/// decompose() applied to each ensemble, preserving order. All ensembles must
/// share the class count.
std::vector<UncertaintyTriple> batch_decompose(const ScoringRule& rule,
                                               std::span<const SecondOrderEnsemble> qs,
                                               DecomposeMode mode = DecomposeMode::automatic);

}  // namespace uqalign
