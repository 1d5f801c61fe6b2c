#include "uqalign/experiments.hpp"

#include <cmath>
#include <numeric>

#include "uqalign/ood.hpp"
#include "uqalign/rng.hpp"
#include "uqalign/scoring.hpp"

namespace uqalign::experiments {
namespace {

constexpr std::uint64_t kTrainStream = 0;
constexpr std::uint64_t kTestStream = 1;
constexpr std::uint64_t kModelStream = 2;
constexpr std::uint64_t kOodStream = 3;
constexpr std::uint64_t kLoopStream = 4;

TrainTest draw(const DataSource& source, const std::optional<Dataset>& csv_data,
               std::size_t n_train, std::size_t n_test, Seed seed) {
  if (csv_data) {
    auto [train, test] = split(*csv_data, source.csv->train_fraction, seed);
    return {std::move(train), std::move(test)};
  }
  return {gen_mixture(source.mixture, n_train, Rng::derive(seed, kTrainStream)),
          gen_mixture(source.mixture, n_test, Rng::derive(seed, kTestStream))};
}

std::optional<Dataset> load_if_csv(const DataSource& source) {
  if (!source.csv) return std::nullopt;
  return load_csv(source.csv->path, source.csv->label_column, source.csv->delimiter);
}

}  // namespace

Summary summarize(std::span<const double> values) {
  if (values.empty()) return {};
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / n)};
}

TrainTest make_train_test(const DataSource& source, std::size_t n_train, std::size_t n_test,
                          Seed seed) {
  return draw(source, load_if_csv(source), n_train, n_test, seed);
}

std::vector<SelectiveCell> run_selective(const SelectiveSettings& settings,
                                         std::span<const Seed> seeds) {
  std::vector<RulePtr> unc;
  std::vector<RulePtr> task;
  for (const auto& name : settings.unc_rules) unc.push_back(make_rule(name));
  for (const auto& name : settings.task_rules) task.push_back(make_rule(name));

  std::vector<SelectiveCell> cells;
  for (const auto& u : unc) {
    for (const auto& t : task) {
      for (Component c : settings.components) {
        cells.push_back({std::string(u->name()), std::string(t->name()), c, {}, {}});
      }
    }
  }

  const auto csv_data = load_if_csv(settings.data);
  for (Seed seed : seeds) {
    const auto [train, test] =
        draw(settings.data, csv_data, settings.n_train, settings.n_test, seed);
    const auto model = fit_bagged_trees(train, settings.trees, Rng::derive(seed, kModelStream));
    const auto predictions = predict_all(model, test);

    std::size_t cell = 0;
    for (const auto& u : unc) {
      for (const auto& t : task) {
        for (Component c : settings.components) {
          auto curve = selective_experiment(predictions, test.labels(), *u, c, *t);
          cells[cell].aulc.push_back(curve.aulc);
          cells[cell].curves.push_back(std::move(curve));
          ++cell;
        }
      }
    }
  }
  return cells;
}

std::vector<OodCell> run_ood(const OodSettings& settings, std::span<const Seed> seeds) {
  std::vector<RulePtr> rules;
  for (const auto& name : settings.rules) rules.push_back(make_rule(name));

  std::vector<OodCell> cells;
  for (const auto& r : rules) {
    for (Component c : settings.components) cells.push_back({std::string(r->name()), c, {}});
  }

  for (Seed seed : seeds) {
    const auto train =
        gen_mixture(settings.mixture, settings.n_train, Rng::derive(seed, kTrainStream));
    const auto id_data =
        gen_mixture(settings.mixture, settings.n_id, Rng::derive(seed, kTestStream));
    const auto ood_data = gen_ood_shift(settings.mixture, settings.shift, settings.n_ood,
                                        Rng::derive(seed, kOodStream));
    const auto model = fit_bagged_trees(train, settings.trees, Rng::derive(seed, kModelStream));
    const Predictor predict = [&model](std::span<const double> x) {
      return predict_second_order(model, x);
    };

    std::size_t cell = 0;
    for (const auto& r : rules) {
      for (Component c : settings.components) {
        cells[cell++].auroc.push_back(ood_experiment(predict, id_data, ood_data, *r, c).auroc);
      }
    }
  }
  return cells;
}

std::vector<ActiveRun> run_active(const ActiveSettings& settings, std::span<const Seed> seeds) {
  const auto csv_data = load_if_csv(settings.data);
  std::vector<TrainTest> splits;
  splits.reserve(seeds.size());
  for (Seed seed : seeds) {
    splits.push_back(draw(settings.data, csv_data, settings.n_pool, settings.n_test, seed));
  }

  std::vector<ActiveRun> runs;
  for (QueryStrategy strategy : settings.strategies) {
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      ActiveLearningConfig config{settings.initial_labeled, settings.query_budget,
                                  settings.rounds, strategy, Rng::derive(seeds[s], kLoopStream)};
      runs.push_back({strategy, seeds[s],
                      run_active_learning(splits[s].train, splits[s].test, config,
                                          settings.trees)});
    }
  }
  return runs;
}

std::vector<double> mean_curve(std::span<const ActiveRun> runs, QueryStrategy strategy) {
  std::vector<double> mean;
  std::size_t count = 0;
  for (const auto& run : runs) {
    if (run.strategy != strategy) continue;
    const auto& losses = run.curve.task_losses;
    if (mean.empty()) mean.assign(losses.size(), 0.0);
    if (losses.size() != mean.size()) throw InvalidArgument("learning curves differ in length");
    for (std::size_t r = 0; r < losses.size(); ++r) mean[r] += losses[r];
    ++count;
  }
  for (double& v : mean) v /= static_cast<double>(count);
  return mean;
}

std::size_t rounds_to_reach(std::span<const double> curve, double target) {
  for (std::size_t r = 0; r < curve.size(); ++r) {
    if (curve[r] <= target) return r;
  }
  return curve.size();
}

std::vector<DialRow> run_aleatoric_dial(const DialSettings& settings,
                                        std::span<const Seed> seeds) {
  const ZeroOneScore zero_one;
  std::vector<DialRow> rows;
  for (double flip : settings.label_flips) {
    const DataSource source{presets::separated(flip), std::nullopt};
    DialRow row{flip, {}, {}};
    for (Seed seed : seeds) {
      const auto [train, test] = draw(source, std::nullopt, settings.n_train, settings.n_test, seed);
      const auto model =
          fit_bagged_trees(train, settings.trees, Rng::derive(seed, kModelStream));
      const auto predictions = predict_all(model, test);
      double au = 0.0;
      for (const auto& q : predictions) au += decompose(zero_one, q).au;
      row.mean_au.push_back(au / static_cast<double>(predictions.size()));
      row.test_loss.push_back(zero_one_error(model, test));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace uqalign::experiments
