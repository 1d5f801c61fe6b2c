#include "uqalign/active.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "uqalign/measures.hpp"
#include "uqalign/rng.hpp"
#include "uqalign/scoring.hpp"

namespace uqalign {
namespace {

// Substream ids under the run seed.
constexpr std::uint64_t kInitialStream = 0;
constexpr std::uint64_t kRandomQueryStream = 1;
constexpr std::uint64_t kModelStreamBase = 1000;

RulePtr strategy_rule(QueryStrategy s) {
  switch (s) {
    case QueryStrategy::eu_log:
      return std::make_shared<const LogScore>();
    case QueryStrategy::eu_brier:
      return std::make_shared<const BrierScore>();
    case QueryStrategy::eu_zero_one:
      return std::make_shared<const ZeroOneScore>();
    case QueryStrategy::random:
      break;
  }
  return nullptr;
}

}  // namespace

std::string_view to_string(QueryStrategy s) noexcept {
  switch (s) {
    case QueryStrategy::eu_log:
      return "eu_log";
    case QueryStrategy::eu_brier:
      return "eu_brier";
    case QueryStrategy::eu_zero_one:
      return "eu_zero_one";
    case QueryStrategy::random:
      return "random";
  }
  return "?";
}

QueryStrategy parse_strategy(std::string_view s) {
  for (QueryStrategy q : all_strategies()) {
    if (to_string(q) == s) return q;
  }
  throw ConfigError("unknown query strategy '" + std::string(s) +
                    "' (expected eu_log, eu_brier, eu_zero_one or random)");
}

std::vector<QueryStrategy> all_strategies() {
  return {QueryStrategy::eu_log, QueryStrategy::eu_brier, QueryStrategy::eu_zero_one,
          QueryStrategy::random};
}

std::vector<std::size_t> query_batch(std::span<const double> eu_scores, std::size_t budget) {
  if (budget > eu_scores.size()) {
    throw InvalidArgument("query budget " + std::to_string(budget) + " exceeds pool size " +
                          std::to_string(eu_scores.size()));
  }
  for (double s : eu_scores) {
    if (std::isnan(s)) throw InvalidArgument("NaN in query scores");
  }
  std::vector<std::size_t> idx(eu_scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return eu_scores[a] > eu_scores[b]; });
  idx.resize(budget);
  std::sort(idx.begin(), idx.end());
  return idx;
}

LearningCurve run_active_learning(const Dataset& pool, const Dataset& test,
                                  const ActiveLearningConfig& config, const TreeParams& learner) {
  if (config.initial_labeled == 0 || config.query_budget == 0) {
    throw InvalidArgument("initial set and query budget must be >= 1");
  }
  if (config.initial_labeled + config.rounds * config.query_budget > pool.size()) {
    throw InvalidArgument("pool exhausted: " + std::to_string(pool.size()) +
                          " rows cannot supply the initial set plus " +
                          std::to_string(config.rounds) + " rounds of " +
                          std::to_string(config.query_budget));
  }
  if (test.empty()) throw InvalidArgument("active learning needs a nonempty test set");
  if (pool.num_features() != test.num_features()) {
    throw DimensionMismatch("pool and test sets differ in feature dimension");
  }

  const RulePtr rule = strategy_rule(config.strategy);
  Rng random_queries(Rng::derive(config.seed, kRandomQueryStream));

  auto initial = Rng(Rng::derive(config.seed, kInitialStream)).permutation(pool.size());
  initial.resize(config.initial_labeled);
  std::sort(initial.begin(), initial.end());

  std::vector<bool> is_labeled(pool.size(), false);
  std::vector<std::size_t> labeled;
  for (std::size_t i : initial) {
    is_labeled[i] = true;
    labeled.push_back(i);
  }

  LearningCurve curve;
  curve.queried.push_back(initial);
  const auto fit_and_record = [&](std::size_t round) {
    const auto model = fit_bagged_trees(pool.subset(labeled), learner,
                                        Rng::derive(config.seed, kModelStreamBase + round));
    curve.labeled_counts.push_back(labeled.size());
    curve.task_losses.push_back(zero_one_error(model, test));
    return model;
  };

  auto model = fit_and_record(0);
  for (std::size_t round = 1; round <= config.rounds; ++round) {
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (!is_labeled[i]) candidates.push_back(i);
    }

    std::vector<std::size_t> picks;
    if (rule == nullptr) {
      auto perm = random_queries.permutation(candidates.size());
      perm.resize(config.query_budget);
      picks = std::move(perm);
      std::sort(picks.begin(), picks.end());
    } else {
      std::vector<double> scores(candidates.size());
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        scores[c] = decompose(*rule, predict_second_order(model, pool.row(candidates[c]))).eu;
      }
      picks = query_batch(scores, config.query_budget);
    }

    std::vector<std::size_t> queried;
    queried.reserve(picks.size());
    for (std::size_t c : picks) {
      const std::size_t i = candidates[c];
      is_labeled[i] = true;
      labeled.push_back(i);
      queried.push_back(i);
    }
    curve.queried.push_back(std::move(queried));
    model = fit_and_record(round);
  }
  return curve;
}

}  // namespace uqalign
