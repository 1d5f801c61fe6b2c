#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uqalign/active.hpp"
#include "uqalign/core.hpp"
#include "uqalign/data.hpp"
#include "uqalign/measures.hpp"
#include "uqalign/selective.hpp"
#include "uqalign/trees.hpp"

namespace uqalign::experiments {

/// Mean and population standard deviation.
struct Summary {
  double mean = 0.0;
  double std = 0.0;
};
Summary summarize(std::span<const double> values);

struct CsvSource {
  std::filesystem::path path;
  std::string label_column = "label";
  char delimiter = ',';
  double train_fraction = 0.7;
};

/// Either a synthetic mixture (fresh train/test draws per seed) or a CSV
/// file (re-split per seed).
struct DataSource {
  MixtureSpec mixture;
  std::optional<CsvSource> csv;
};

struct TrainTest {
  Dataset train;
  Dataset test;
};

/// Mixture: train from substream 0 and test from substream 1 of `seed`.
/// CSV: split(load_csv(...), train_fraction, seed); the sizes are ignored.
TrainTest make_train_test(const DataSource& source, std::size_t n_train, std::size_t n_test,
                          Seed seed);

// --- selective prediction -------------------------------------------------

struct SelectiveSettings {
  DataSource data{presets::selective_default(), std::nullopt};
  std::size_t n_train = 3000;
  std::size_t n_test = 10000;
  TreeParams trees{};
  std::vector<std::string> unc_rules{"log", "brier", "zero_one"};
  std::vector<std::string> task_rules{"log", "brier", "zero_one"};
  std::vector<Component> components{Component::total};
};

struct SelectiveCell {
  std::string unc_rule;
  std::string task_rule;
  Component component = Component::total;
  std::vector<double> aulc;  ///< one per seed, in seed order
  std::vector<RejectionCurve> curves;
};

/// One cell per (unc_rule, task_rule, component), in that nesting order.
std::vector<SelectiveCell> run_selective(const SelectiveSettings& settings,
                                         std::span<const Seed> seeds);

// --- OoD detection ----------------------------------------------------------

struct OodSettings {
  MixtureSpec mixture = presets::ood_default();
  double shift = 10.0;
  std::size_t n_train = 10000;
  std::size_t n_id = 2000;
  std::size_t n_ood = 2000;
  TreeParams trees{};
  std::vector<std::string> rules{"log", "brier", "zero_one"};
  std::vector<Component> components{Component::total, Component::aleatoric,
                                    Component::epistemic};
};

struct OodCell {
  std::string rule;
  Component component = Component::epistemic;
  std::vector<double> auroc;  ///< one per seed
};

/// The model is trained on unshifted data; iD test rows come from substream
/// 1 and shifted OoD rows from substream 3 of each seed.
std::vector<OodCell> run_ood(const OodSettings& settings, std::span<const Seed> seeds);

// --- active learning --------------------------------------------------------

struct ActiveSettings {
  DataSource data{presets::rare_regions(), std::nullopt};
  std::size_t n_pool = 5000;
  std::size_t n_test = 2000;
  std::size_t initial_labeled = 20;
  std::size_t query_budget = 20;
  std::size_t rounds = 20;
  TreeParams trees{};
  std::vector<QueryStrategy> strategies = all_strategies();
};

struct ActiveRun {
  QueryStrategy strategy = QueryStrategy::random;
  Seed seed{};
  LearningCurve curve;
};

/// Strategy-major, seed-minor. Every strategy sees the same pool, test set
/// and initial labelled set for a given seed.
std::vector<ActiveRun> run_active(const ActiveSettings& settings, std::span<const Seed> seeds);

/// Pointwise mean of the loss curves of `strategy` over all runs.
std::vector<double> mean_curve(std::span<const ActiveRun> runs, QueryStrategy strategy);

/// First round whose loss is <= target, or curve.size() when never reached.
std::size_t rounds_to_reach(std::span<const double> curve, double target);

// --- aleatoric dial ---------------------------------------------------------

struct DialSettings {
  std::vector<double> label_flips{0.0, 0.1, 0.2, 0.3};
  std::size_t n_train = 3000;
  std::size_t n_test = 2000;
  TreeParams trees{};
};

struct DialRow {
  double label_flip = 0.0;
  std::vector<double> mean_au;    ///< mean zero-one AU on test rows, per seed
  std::vector<double> test_loss;  ///< zero-one test error, per seed
};

/// Trains on presets::separated(flip) for each flip level.
std::vector<DialRow> run_aleatoric_dial(const DialSettings& settings, std::span<const Seed> seeds);

}  // namespace uqalign::experiments
