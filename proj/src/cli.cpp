#include "uqalign/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "uqalign/config.hpp"
#include "uqalign/experiments.hpp"
#include "uqalign/measures.hpp"
#include "uqalign/scoring.hpp"
#include "uqalign/selfcheck.hpp"

namespace uqalign::cli {

using config::Json;
namespace ex = experiments;

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw DataError("cannot create directory '" + path.parent_path().string() + "'");
  fs::path tmp = path;
  tmp += ".partial";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.close();
    if (!f) {
      fs::remove(tmp, ec);
      throw DataError("cannot write '" + path.string() + "'");
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw DataError("cannot write '" + path.string() + "'");
  }
}

namespace {

// ---------------------------------------------------------------- output

struct Output {
  std::string name;     // file stem under the default directory
  std::string content;
  std::optional<std::filesystem::path> explicit_path;
  std::string extension;
};

std::filesystem::path default_dir() {
  const char* env = std::getenv(kOutputDirEnv);
  return (env != nullptr && *env != '\0') ? std::filesystem::path(env)
                                           : std::filesystem::path("results");
}

// Files are written only after every result is ready.
void emit(const std::vector<Output>& outputs, std::ostream& out) {
  for (const auto& o : outputs) {
    if (o.explicit_path && o.explicit_path->string() == "-") {
      out << o.content;
      continue;
    }
    const auto path = o.explicit_path ? *o.explicit_path : default_dir() / (o.name + o.extension);
    write_atomic(path, o.content);
    out << "wrote " << path.string() << "\n";
  }
}

class Csv {
 public:
  explicit Csv(std::initializer_list<std::string_view> header) { row(header); }

  template <typename... Cells>
  void add(const Cells&... cells) {
    bool first = true;
    ((os_ << (first ? "" : ",") << cell(cells), first = false), ...);
    os_ << '\n';
  }

  [[nodiscard]] std::string str() const { return os_.str(); }

 private:
  void row(std::initializer_list<std::string_view> cells) {
    bool first = true;
    for (auto c : cells) {
      os_ << (first ? "" : ",") << c;
      first = false;
    }
    os_ << '\n';
  }
  static std::string cell(double v) { return format_number(v); }
  static std::string cell(std::string_view v) { return std::string(v); }
  static std::string cell(const std::string& v) { return v; }
  static std::string cell(const char* v) { return v; }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(Seed s) { return std::to_string(s.value); }

  std::ostringstream os_;
};

std::string fixed(double v, int digits = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

Json seeds_json(std::span<const Seed> seeds) {
  Json a = Json::array();
  for (Seed s : seeds) a.push_back(s.value);
  return a;
}

Json stats_json(std::span<const double> values) {
  const auto s = ex::summarize(values);
  return Json{{"values", std::vector<double>(values.begin(), values.end())},
              {"mean", s.mean},
              {"std", s.std}};
}

std::vector<std::string> component_names(std::span<const Component> cs) {
  std::vector<std::string> out;
  for (Component c : cs) out.emplace_back(to_string(c));
  return out;
}

// ------------------------------------------------------- shared options

struct CommonOptions {
  std::string config_path;
  std::vector<std::uint64_t> seeds;
  std::string output;
  std::string format;
  CLI::Option* seeds_opt = nullptr;
  CLI::Option* output_opt = nullptr;
  CLI::Option* format_opt = nullptr;

  void attach(CLI::App* app, const std::string& default_format) {
    format = default_format;
    app->add_option("--config", config_path,
                    "JSON config file; command-line flags override its values");
    seeds_opt = app->add_option("--seeds", seeds,
                                "Comma-separated seeds; results are reported per seed and as "
                                "mean/std (default: 1,2,3)")
                    ->delimiter(',');
    output_opt = app->add_option("--output,-o", output,
                                 "Output file, or - for stdout (default: $" +
                                     std::string(kOutputDirEnv) + "/<command>.<format>, " +
                                     "with ./results when the variable is unset)");
    format_opt = app->add_option("--format", format, "Output format")
                     ->check(CLI::IsMember({"csv", "json"}))
                     ->default_str(default_format);
  }

  // Merges config-file run options and flags into the final values.
  void resolve(const config::RunOptions& from_config, std::vector<Seed>& seeds_out,
               std::optional<std::filesystem::path>& path_out, std::string& format_out) const {
    seeds_out = from_config.seeds;
    if (seeds_opt->count() > 0) {
      seeds_out.clear();
      for (auto s : seeds) seeds_out.push_back({s});
    }
    if (seeds_out.empty()) seeds_out = {{1}, {2}, {3}};

    path_out = from_config.output;
    if (output_opt->count() > 0) path_out = output;

    format_out = format;
    if (format_opt->count() == 0 && from_config.format) format_out = *from_config.format;
    if (format_out != "csv" && format_out != "json") {
      throw ConfigError("format must be csv or json, got '" + format_out + "'");
    }
  }

  [[nodiscard]] Json load() const {
    if (config_path.empty()) return Json::object();
    return config::load_json<ConfigError>(config_path);
  }
};

struct TreeOptions {
  std::size_t num_trees = 0;
  std::size_t max_depth = 0;
  CLI::Option* trees_opt = nullptr;
  CLI::Option* depth_opt = nullptr;

  void attach(CLI::App* app) {
    const TreeParams d;
    trees_opt = app->add_option("--trees", num_trees, "Trees per bagged ensemble")
                    ->default_str(std::to_string(d.num_trees))
                    ->check(CLI::PositiveNumber);
    depth_opt = app->add_option("--depth", max_depth, "Maximum tree depth")
                    ->default_str(std::to_string(d.max_depth));
  }
  void apply(TreeParams& t) const {
    if (trees_opt->count() > 0) t.num_trees = num_trees;
    if (depth_opt->count() > 0) t.max_depth = max_depth;
  }
};

struct CsvOptions {
  std::string path;
  std::string label_column = "label";
  std::string delimiter = ",";
  double train_fraction = 0.7;
  CLI::Option* path_opt = nullptr;
  CLI::Option* label_opt = nullptr;
  CLI::Option* delim_opt = nullptr;
  CLI::Option* frac_opt = nullptr;

  void attach(CLI::App* app) {
    path_opt = app->add_option("--csv", path,
                               "Use a delimited file instead of the synthetic mixture; it is "
                               "re-split per seed");
    label_opt = app->add_option("--label-column", label_column, "Label column name")
                    ->capture_default_str();
    delim_opt = app->add_option("--delimiter", delimiter, "Single-character field delimiter")
                    ->capture_default_str();
    frac_opt = app->add_option("--train-fraction", train_fraction,
                               "Fraction of CSV rows used for training (or the pool)")
                   ->capture_default_str();
  }

  void apply(ex::DataSource& source) const {
    if (path_opt->count() > 0) {
      source.csv = ex::CsvSource{};
      source.csv->path = path;
    }
    const bool tweaks = label_opt->count() + delim_opt->count() + frac_opt->count() > 0;
    if (!source.csv) {
      if (tweaks) throw ConfigError("--label-column/--delimiter/--train-fraction need --csv");
      return;
    }
    if (label_opt->count() > 0) source.csv->label_column = label_column;
    if (delim_opt->count() > 0) {
      if (delimiter.size() != 1) throw ConfigError("--delimiter must be a single character");
      source.csv->delimiter = delimiter[0];
    }
    if (frac_opt->count() > 0) source.csv->train_fraction = train_fraction;
  }
};

template <typename T>
void override_if(CLI::Option* opt, T& target, const T& value) {
  if (opt->count() > 0) target = value;
}

std::vector<RulePtr> resolve_rules(const std::vector<std::string>& names) {
  std::vector<RulePtr> out;
  for (const auto& n : names) out.push_back(make_rule(n));
  return out;
}

std::vector<Component> resolve_components(const std::vector<std::string>& names) {
  std::vector<Component> out;
  for (const auto& n : names) out.push_back(parse_component(n));
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string s;
  for (const auto& i : items) s += (s.empty() ? "" : ",") + i;
  return s;
}

// ---------------------------------------------------------------- measure

struct MeasureCommand {
  CLI::App* app = nullptr;
  std::string input;
  std::vector<std::string> rules{"log", "brier", "zero_one"};
  std::string mode = "auto";
  std::string output;
  std::string format = "json";
  CLI::Option* output_opt = nullptr;

  void attach(CLI::App& root) {
    app = root.add_subcommand("measure", "Decompose ensembles read from a JSON file");
    app->add_option("input", input,
                    "JSON file: one ensemble as a list of probability vectors, a list of "
                    "ensembles, or {\"ensembles\": [...], \"weights\": [...]}")
        ->required();
    app->add_option("--rule", rules, "Scoring rules, comma-separated")
        ->delimiter(',')
        ->capture_default_str();
    app->add_option("--mode", mode, "Decomposition path")
        ->check(CLI::IsMember({"auto", "generic", "closed_form"}))
        ->capture_default_str();
    output_opt = app->add_option("--output,-o", output,
                                 "Output file, or - for stdout (default: $" +
                                     std::string(kOutputDirEnv) + "/measure.<format>)");
    app->add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
  }

  int execute(std::ostream& out) const {
    const auto rule_ptrs = resolve_rules(rules);
    const DecomposeMode m = mode == "generic"       ? DecomposeMode::generic
                            : mode == "closed_form" ? DecomposeMode::closed_form
                                                    : DecomposeMode::automatic;
    const auto qs = config::ensembles_from_json(config::load_json<DataError>(input));

    Json records = Json::array();
    Csv csv({"ensemble", "rule", "tu", "au", "eu"});
    for (std::size_t i = 0; i < qs.size(); ++i) {
      for (const auto& r : rule_ptrs) {
        const auto t = decompose(*r, qs[i], m);
        records.push_back(
            Json{{"ensemble", i}, {"rule", t.rule_name}, {"tu", t.tu}, {"au", t.au}, {"eu", t.eu}});
        csv.add(i, t.rule_name, t.tu, t.au, t.eu);
      }
    }
    Output o{"measure", "", std::nullopt, "." + format};
    if (output_opt->count() > 0) o.explicit_path = output;
    o.content = format == "json" ? Json{{"mode", mode}, {"records", records}}.dump(2) + "\n"
                                 : csv.str();
    emit({o}, out);
    return kOk;
  }
};

// -------------------------------------------------------------- selective

struct SelectiveCommand {
  CLI::App* app = nullptr;
  CommonOptions common;
  TreeOptions trees;
  CsvOptions csv;
  std::vector<std::string> unc_rules;
  std::vector<std::string> task_rules;
  std::vector<std::string> components;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::string curves;
  CLI::Option* unc_opt = nullptr;
  CLI::Option* task_opt = nullptr;
  CLI::Option* comp_opt = nullptr;
  CLI::Option* n_train_opt = nullptr;
  CLI::Option* n_test_opt = nullptr;

  void attach(CLI::App& root) {
    const ex::SelectiveSettings d;
    app = root.add_subcommand(
        "selective", "Loss-rejection curves: AULC per (uncertainty rule, task rule, component)");
    common.attach(app, "csv");
    trees.attach(app);
    csv.attach(app);
    unc_opt = app->add_option("--unc-rules", unc_rules, "Rules ranking the instances")
                  ->delimiter(',')
                  ->default_str(join(d.unc_rules));
    task_opt = app->add_option("--task-rules", task_rules, "Rules scoring the kept instances")
                   ->delimiter(',')
                   ->default_str(join(d.task_rules));
    comp_opt = app->add_option("--components", components, "Components among tu, au, eu")
                   ->delimiter(',')
                   ->default_str(join(component_names(d.components)));
    n_train_opt = app->add_option("--n-train", n_train, "Synthetic training rows")
                      ->default_str(std::to_string(d.n_train));
    n_test_opt = app->add_option("--n-test", n_test, "Synthetic test rows")
                     ->default_str(std::to_string(d.n_test));
    app->add_option("--curves", curves,
                    "Also write every rejection curve (alpha, loss, and an aulc summary row) "
                    "as CSV to this file");
  }

  int execute(std::ostream& out) const {
    ex::SelectiveSettings s;
    config::RunOptions run;
    config::apply_selective(common.load(), s, run);
    if (unc_opt->count() > 0) s.unc_rules = unc_rules;
    if (task_opt->count() > 0) s.task_rules = task_rules;
    if (comp_opt->count() > 0) s.components = resolve_components(components);
    override_if(n_train_opt, s.n_train, n_train);
    override_if(n_test_opt, s.n_test, n_test);
    trees.apply(s.trees);
    csv.apply(s.data);
    resolve_rules(s.unc_rules);
    resolve_rules(s.task_rules);

    std::vector<Seed> seeds;
    std::optional<std::filesystem::path> path;
    std::string format;
    common.resolve(run, seeds, path, format);

    const auto cells = ex::run_selective(s, seeds);

    std::vector<Output> outputs;
    Output o{"selective", "", path, "." + format};
    if (format == "csv") {
      Csv table({"unc_rule", "task_rule", "component", "seed", "aulc"});
      for (const auto& c : cells) {
        for (std::size_t i = 0; i < seeds.size(); ++i) {
          table.add(c.unc_rule, c.task_rule, to_string(c.component), seeds[i], c.aulc[i]);
        }
        const auto sum = ex::summarize(c.aulc);
        table.add(c.unc_rule, c.task_rule, to_string(c.component), "mean", sum.mean);
        table.add(c.unc_rule, c.task_rule, to_string(c.component), "std", sum.std);
      }
      o.content = table.str();
    } else {
      Json jc = Json::array();
      for (const auto& c : cells) {
        Json cell = stats_json(c.aulc);
        cell["unc_rule"] = c.unc_rule;
        cell["task_rule"] = c.task_rule;
        cell["component"] = to_string(c.component);
        jc.push_back(std::move(cell));
      }
      Json cfg{{"data", config::to_json(s.data)},
               {"n_train", s.n_train},
               {"n_test", s.n_test},
               {"trees", config::to_json(s.trees)},
               {"unc_rules", s.unc_rules},
               {"task_rules", s.task_rules},
               {"components", component_names(s.components)},
               {"seeds", seeds_json(seeds)}};
      o.content = Json{{"command", "selective"}, {"config", cfg}, {"cells", jc}}.dump(2) + "\n";
    }
    outputs.push_back(std::move(o));

    if (!curves.empty()) {
      Csv table({"unc_rule", "task_rule", "component", "seed", "alpha", "loss"});
      for (const auto& c : cells) {
        for (std::size_t i = 0; i < seeds.size(); ++i) {
          const auto& curve = c.curves[i];
          for (std::size_t k = 0; k < curve.alphas.size(); ++k) {
            table.add(c.unc_rule, c.task_rule, to_string(c.component), seeds[i], curve.alphas[k],
                      curve.losses[k]);
          }
          table.add(c.unc_rule, c.task_rule, to_string(c.component), seeds[i], "aulc",
                    curve.aulc);
        }
      }
      outputs.push_back({"curves", table.str(), std::filesystem::path(curves), ".csv"});
    }

    // Mean AULC grid: rows are uncertainty rules, columns task rules.
    for (Component comp : s.components) {
      out << "mean AULC, component " << to_string(comp) << " (rows: uncertainty rule)\n";
      out << std::setw(10) << "";
      for (const auto& t : s.task_rules) out << std::setw(12) << t;
      out << "\n";
      for (const auto& u : s.unc_rules) {
        out << std::setw(10) << u;
        for (const auto& t : s.task_rules) {
          for (const auto& c : cells) {
            if (c.unc_rule == u && c.task_rule == t && c.component == comp) {
              out << std::setw(12) << fixed(ex::summarize(c.aulc).mean, 5);
            }
          }
        }
        out << "\n";
      }
    }
    emit(outputs, out);
    return kOk;
  }
};

// ------------------------------------------------------------------- ood

struct OodCommand {
  CLI::App* app = nullptr;
  CommonOptions common;
  TreeOptions trees;
  std::vector<std::string> rules;
  std::vector<std::string> components;
  double shift = 0.0;
  std::size_t n_train = 0;
  std::size_t n_id = 0;
  std::size_t n_ood = 0;
  CLI::Option* rules_opt = nullptr;
  CLI::Option* comp_opt = nullptr;
  CLI::Option* shift_opt = nullptr;
  CLI::Option* n_train_opt = nullptr;
  CLI::Option* n_id_opt = nullptr;
  CLI::Option* n_ood_opt = nullptr;

  void attach(CLI::App& root) {
    const ex::OodSettings d;
    app = root.add_subcommand("ood", "Out-of-distribution detection AUROC per rule and component");
    common.attach(app, "csv");
    trees.attach(app);
    rules_opt = app->add_option("--rules", rules, "Scoring rules")
                    ->delimiter(',')
                    ->default_str(join(d.rules));
    comp_opt = app->add_option("--components", components, "Components among tu, au, eu")
                   ->delimiter(',')
                   ->default_str(join(component_names(d.components)));
    shift_opt = app->add_option("--shift", shift,
                                "OoD offset along the first axis, in units of the mean class "
                                "scale")
                    ->default_str(format_number(d.shift));
    n_train_opt = app->add_option("--n-train", n_train, "Training rows")
                      ->default_str(std::to_string(d.n_train));
    n_id_opt = app->add_option("--n-id", n_id, "In-distribution test rows")
                   ->default_str(std::to_string(d.n_id));
    n_ood_opt = app->add_option("--n-ood", n_ood, "Shifted test rows")
                    ->default_str(std::to_string(d.n_ood));
  }

  int execute(std::ostream& out) const {
    ex::OodSettings s;
    config::RunOptions run;
    config::apply_ood(common.load(), s, run);
    if (rules_opt->count() > 0) s.rules = rules;
    if (comp_opt->count() > 0) s.components = resolve_components(components);
    override_if(shift_opt, s.shift, shift);
    override_if(n_train_opt, s.n_train, n_train);
    override_if(n_id_opt, s.n_id, n_id);
    override_if(n_ood_opt, s.n_ood, n_ood);
    trees.apply(s.trees);
    resolve_rules(s.rules);

    std::vector<Seed> seeds;
    std::optional<std::filesystem::path> path;
    std::string format;
    common.resolve(run, seeds, path, format);

    const auto cells = ex::run_ood(s, seeds);

    Output o{"ood", "", path, "." + format};
    if (format == "csv") {
      Csv table({"rule", "component", "seed", "auroc"});
      for (const auto& c : cells) {
        for (std::size_t i = 0; i < seeds.size(); ++i) {
          table.add(c.rule, to_string(c.component), seeds[i], c.auroc[i]);
        }
        const auto sum = ex::summarize(c.auroc);
        table.add(c.rule, to_string(c.component), "mean", sum.mean);
        table.add(c.rule, to_string(c.component), "std", sum.std);
      }
      o.content = table.str();
    } else {
      Json jc = Json::array();
      for (const auto& c : cells) {
        Json cell = stats_json(c.auroc);
        cell["rule"] = c.rule;
        cell["component"] = to_string(c.component);
        jc.push_back(std::move(cell));
      }
      Json cfg{{"mixture", config::to_json(s.mixture)},
               {"shift", s.shift},
               {"n_train", s.n_train},
               {"n_id", s.n_id},
               {"n_ood", s.n_ood},
               {"trees", config::to_json(s.trees)},
               {"rules", s.rules},
               {"components", component_names(s.components)},
               {"seeds", seeds_json(seeds)}};
      o.content = Json{{"command", "ood"}, {"config", cfg}, {"cells", jc}}.dump(2) + "\n";
    }

    out << "AUROC mean +- std (rows: rule)\n" << std::setw(10) << "";
    for (Component c : s.components) out << std::setw(18) << to_string(c);
    out << "\n";
    for (const auto& r : s.rules) {
      out << std::setw(10) << r;
      for (Component comp : s.components) {
        for (const auto& c : cells) {
          if (c.rule == r && c.component == comp) {
            const auto sum = ex::summarize(c.auroc);
            out << std::setw(18) << (fixed(sum.mean) + " +- " + fixed(sum.std));
          }
        }
      }
      out << "\n";
    }
    emit({o}, out);
    return kOk;
  }
};

// ---------------------------------------------------------------- active

struct ActiveCommand {
  CLI::App* app = nullptr;
  CommonOptions common;
  TreeOptions trees;
  CsvOptions csv;
  std::vector<std::string> strategies;
  std::size_t n_pool = 0;
  std::size_t n_test = 0;
  std::size_t initial = 0;
  std::size_t budget = 0;
  std::size_t rounds = 0;
  CLI::Option* strat_opt = nullptr;
  CLI::Option* n_pool_opt = nullptr;
  CLI::Option* n_test_opt = nullptr;
  CLI::Option* initial_opt = nullptr;
  CLI::Option* budget_opt = nullptr;
  CLI::Option* rounds_opt = nullptr;

  void attach(CLI::App& root) {
    const ex::ActiveSettings d;
    app = root.add_subcommand("active", "Pool-based active learning curves per query strategy");
    common.attach(app, "csv");
    trees.attach(app);
    csv.attach(app);
    std::vector<std::string> names;
    for (auto q : d.strategies) names.emplace_back(to_string(q));
    strat_opt = app->add_option("--strategies", strategies,
                                "Among eu_log, eu_brier, eu_zero_one, random")
                    ->delimiter(',')
                    ->default_str(join(names));
    n_pool_opt = app->add_option("--n-pool", n_pool, "Synthetic pool rows")
                     ->default_str(std::to_string(d.n_pool));
    n_test_opt = app->add_option("--n-test", n_test, "Synthetic test rows")
                     ->default_str(std::to_string(d.n_test));
    initial_opt = app->add_option("--initial", initial, "Initially labelled rows")
                      ->default_str(std::to_string(d.initial_labeled));
    budget_opt = app->add_option("--budget", budget, "Rows queried per round")
                     ->default_str(std::to_string(d.query_budget));
    rounds_opt = app->add_option("--rounds", rounds, "Query rounds")
                     ->default_str(std::to_string(d.rounds));
  }

  int execute(std::ostream& out) const {
    ex::ActiveSettings s;
    config::RunOptions run;
    config::apply_active(common.load(), s, run);
    if (strat_opt->count() > 0) {
      s.strategies.clear();
      for (const auto& n : strategies) s.strategies.push_back(parse_strategy(n));
    }
    override_if(n_pool_opt, s.n_pool, n_pool);
    override_if(n_test_opt, s.n_test, n_test);
    override_if(initial_opt, s.initial_labeled, initial);
    override_if(budget_opt, s.query_budget, budget);
    override_if(rounds_opt, s.rounds, rounds);
    trees.apply(s.trees);
    csv.apply(s.data);

    std::vector<Seed> seeds;
    std::optional<std::filesystem::path> path;
    std::string format;
    common.resolve(run, seeds, path, format);

    const auto runs = ex::run_active(s, seeds);

    // Reach: rounds until the mean curve hits random's final mean loss.
    std::optional<double> target;
    for (auto q : s.strategies) {
      if (q == QueryStrategy::random) target = ex::mean_curve(runs, q).back();
    }

    Output o{"active", "", path, "." + format};
    if (format == "csv") {
      Csv table({"strategy", "seed", "round", "labeled_count", "zero_one_loss"});
      for (auto q : s.strategies) {
        std::vector<const ex::ActiveRun*> mine;
        for (const auto& r : runs) {
          if (r.strategy != q) continue;
          mine.push_back(&r);
          for (std::size_t k = 0; k < r.curve.task_losses.size(); ++k) {
            table.add(to_string(q), r.seed, k, r.curve.labeled_counts[k],
                      r.curve.task_losses[k]);
          }
        }
        for (std::size_t k = 0; k <= s.rounds; ++k) {
          std::vector<double> at;
          for (const auto* r : mine) at.push_back(r->curve.task_losses[k]);
          const auto sum = ex::summarize(at);
          const std::size_t count = mine.front()->curve.labeled_counts[k];
          table.add(to_string(q), "mean", k, count, sum.mean);
          table.add(to_string(q), "std", k, count, sum.std);
        }
      }
      o.content = table.str();
    } else {
      Json js = Json::array();
      for (auto q : s.strategies) {
        Json curves = Json::array();
        for (const auto& r : runs) {
          if (r.strategy != q) continue;
          curves.push_back(Json{{"seed", r.seed.value},
                                {"labeled_counts", r.curve.labeled_counts},
                                {"zero_one_loss", r.curve.task_losses}});
        }
        const auto mean = ex::mean_curve(runs, q);
        Json entry{{"strategy", to_string(q)}, {"runs", curves}, {"mean_loss", mean}};
        if (target) entry["rounds_to_reach_target"] = ex::rounds_to_reach(mean, *target);
        js.push_back(std::move(entry));
      }
      std::vector<std::string> names;
      for (auto q : s.strategies) names.emplace_back(to_string(q));
      Json cfg{{"data", config::to_json(s.data)},
               {"n_pool", s.n_pool},
               {"n_test", s.n_test},
               {"initial_labeled", s.initial_labeled},
               {"query_budget", s.query_budget},
               {"rounds", s.rounds},
               {"trees", config::to_json(s.trees)},
               {"strategies", names},
               {"seeds", seeds_json(seeds)}};
      Json doc{{"command", "active"}, {"config", cfg}, {"strategies", js}};
      if (target) doc["target_loss"] = *target;
      o.content = doc.dump(2) + "\n";
    }

    out << "strategy      final mean loss";
    if (target) out << "   rounds to reach " << fixed(*target);
    out << "\n";
    for (auto q : s.strategies) {
      const auto mean = ex::mean_curve(runs, q);
      out << std::left << std::setw(14) << to_string(q) << std::right << std::setw(15)
          << fixed(mean.back());
      if (target) out << std::setw(19 + 7) << ex::rounds_to_reach(mean, *target);
      out << "\n";
    }
    emit({o}, out);
    return kOk;
  }
};

// ------------------------------------------------------------------ dial

struct DialCommand {
  CLI::App* app = nullptr;
  CommonOptions common;
  TreeOptions trees;
  std::vector<double> flips;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  CLI::Option* flips_opt = nullptr;
  CLI::Option* n_train_opt = nullptr;
  CLI::Option* n_test_opt = nullptr;

  void attach(CLI::App& root) {
    const ex::DialSettings d;
    app = root.add_subcommand(
        "dial", "Aleatoric dial: zero-one AU and test error against the label flip rate");
    common.attach(app, "csv");
    trees.attach(app);
    std::vector<std::string> names;
    for (double f : d.label_flips) names.push_back(format_number(f));
    flips_opt = app->add_option("--flips", flips, "Label flip rates")
                    ->delimiter(',')
                    ->default_str(join(names));
    n_train_opt = app->add_option("--n-train", n_train, "Training rows")
                      ->default_str(std::to_string(d.n_train));
    n_test_opt = app->add_option("--n-test", n_test, "Test rows")
                     ->default_str(std::to_string(d.n_test));
  }

  int execute(std::ostream& out) const {
    ex::DialSettings s;
    config::RunOptions run;
    config::apply_dial(common.load(), s, run);
    override_if(flips_opt, s.label_flips, flips);
    override_if(n_train_opt, s.n_train, n_train);
    override_if(n_test_opt, s.n_test, n_test);
    trees.apply(s.trees);

    std::vector<Seed> seeds;
    std::optional<std::filesystem::path> path;
    std::string format;
    common.resolve(run, seeds, path, format);

    const auto rows = ex::run_aleatoric_dial(s, seeds);
    Output o{"dial", "", path, "." + format};
    if (format == "csv") {
      Csv table({"label_flip", "seed", "mean_au", "test_loss"});
      for (const auto& r : rows) {
        for (std::size_t i = 0; i < seeds.size(); ++i) {
          table.add(r.label_flip, seeds[i], r.mean_au[i], r.test_loss[i]);
        }
        const auto au = ex::summarize(r.mean_au);
        const auto loss = ex::summarize(r.test_loss);
        table.add(r.label_flip, "mean", au.mean, loss.mean);
        table.add(r.label_flip, "std", au.std, loss.std);
      }
      o.content = table.str();
    } else {
      Json jr = Json::array();
      for (const auto& r : rows) {
        jr.push_back(Json{{"label_flip", r.label_flip},
                          {"mean_au", stats_json(r.mean_au)},
                          {"test_loss", stats_json(r.test_loss)}});
      }
      Json cfg{{"label_flips", s.label_flips},
               {"n_train", s.n_train},
               {"n_test", s.n_test},
               {"trees", config::to_json(s.trees)},
               {"seeds", seeds_json(seeds)}};
      o.content = Json{{"command", "dial"}, {"config", cfg}, {"rows", jr}}.dump(2) + "\n";
    }
    out << "label_flip   mean AU (zero-one)   test error\n";
    for (const auto& r : rows) {
      out << std::setw(10) << fixed(r.label_flip, 2) << std::setw(21)
          << fixed(ex::summarize(r.mean_au).mean) << std::setw(13)
          << fixed(ex::summarize(r.test_loss).mean) << "\n";
    }
    emit({o}, out);
    return kOk;
  }
};

// ----------------------------------------------------------------- check

struct CheckCommand {
  CLI::App* app = nullptr;
  selfcheck::CheckOptions options;
  std::uint64_t seed = selfcheck::CheckOptions{}.seed.value;

  void attach(CLI::App& root) {
    app = root.add_subcommand("check", "Run the built-in property and oracle suites");
    app->add_option("--ensembles", options.ensembles, "Random ensembles per suite")
        ->capture_default_str();
    app->add_option("--cost-vectors", options.cost_vectors,
                    "Cost vectors for the brute-force ordering oracle")
        ->capture_default_str();
    app->add_option("--bregman-points", options.bregman_points,
                    "Interior points for the finite-difference check")
        ->capture_default_str();
    app->add_option("--auroc-cases", options.auroc_cases, "Random AUROC cases")
        ->capture_default_str();
    app->add_option("--seed", seed, "Seed for the random cases")->capture_default_str();
  }

  int execute(std::ostream& out) {
    options.seed = {seed};
    const auto results = selfcheck::run_all(options);
    std::size_t passed = 0;
    for (const auto& r : results) {
      out << (r.passed() ? "PASS " : "FAIL ") << r.name << ": " << r.cases << " cases, "
          << r.failures << " failures, max error " << format_number(r.max_error);
      if (!r.passed()) out << " (first: " << r.first_failure << ")";
      out << "\n";
      passed += r.passed() ? 1 : 0;
    }
    out << passed << "/" << results.size() << " suites passed\n";
    return passed == results.size() ? kOk : kCheckFailed;
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Loss-based uncertainty decomposition and downstream-task benchmarks"};
  app.name(args.empty() ? "uqalign" : std::filesystem::path(args[0]).filename().string());
  app.require_subcommand(1);

  MeasureCommand measure;
  SelectiveCommand selective;
  OodCommand ood;
  ActiveCommand active;
  DialCommand dial;
  CheckCommand check;
  measure.attach(app);
  selective.attach(app);
  ood.attach(app);
  active.attach(app);
  dial.attach(app);
  check.attach(app);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << " (see --help)\n";
    return kConfigError;
  }

  try {
    if (measure.app->parsed()) return measure.execute(out);
    if (selective.app->parsed()) return selective.execute(out);
    if (ood.app->parsed()) return ood.execute(out);
    if (active.app->parsed()) return active.execute(out);
    if (dial.app->parsed()) return dial.execute(out);
    if (check.app->parsed()) return check.execute(out);
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const InvalidArgument& e) {
    err << "invalid setting: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInternalError;
  }
  return kInternalError;
}

}  // namespace uqalign::cli
