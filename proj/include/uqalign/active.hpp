#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "uqalign/core.hpp"
#include "uqalign/trees.hpp"

namespace uqalign {

enum class QueryStrategy { eu_log, eu_brier, eu_zero_one, random };

std::string_view to_string(QueryStrategy s) noexcept;
/// Throws ConfigError for unknown names.
QueryStrategy parse_strategy(std::string_view s);
/// All strategies in canonical order.
std::vector<QueryStrategy> all_strategies();

struct ActiveLearningConfig {
  std::size_t initial_labeled = 50;
  std::size_t query_budget = 50;
  std::size_t rounds = 20;
  QueryStrategy strategy = QueryStrategy::eu_zero_one;
  Seed seed{};
};

struct LearningCurve {
  std::vector<std::size_t> labeled_counts;
  std::vector<double> task_losses;  ///< zero-one test loss after each fit
  /// Pool indices queried in each round (round 0 holds the initial set).
  std::vector<std::vector<std::size_t>> queried;

  friend bool operator==(const LearningCurve&, const LearningCurve&) = default;
};

/// Indices of the `budget` largest scores, ties to the lowest index,
/// returned in ascending index order.
std::vector<std::size_t> query_batch(std::span<const double> eu_scores, std::size_t budget);

/// Pool-based active learning. Round 0 fits on `initial_labeled` seeded
/// random pool rows; every later round scores the unlabelled remainder with
/// the strategy, moves `query_budget` rows into the labelled set and refits.
/// The curve holds rounds + 1 points.
LearningCurve run_active_learning(const Dataset& pool, const Dataset& test,
                                  const ActiveLearningConfig& config,
                                  const TreeParams& learner = {});

}  // namespace uqalign
