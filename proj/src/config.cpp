#include "uqalign/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "uqalign/scoring.hpp"

namespace uqalign::config {
namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

template <typename T>
T get_as(const Json& j, const std::string& where) {
  try {
    return j.get<T>();
  } catch (const Json::exception&) {
    bad(where, "unexpected value " + j.dump());
  }
}

std::size_t get_count(const Json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 0) bad(where, "expected a count, got " + j.dump());
  return j.get<std::size_t>();
}

double get_number(const Json& j, const std::string& where) {
  if (!j.is_number()) bad(where, "expected a number, got " + j.dump());
  return j.get<double>();
}

std::vector<std::string> get_rules(const Json& j, const std::string& where) {
  auto names = get_as<std::vector<std::string>>(j, where);
  if (names.empty()) bad(where, "needs at least one rule");
  for (const auto& n : names) {
    if (!RuleRegistry::global().contains(n)) bad(where, "unknown scoring rule '" + n + "'");
  }
  return names;
}

std::vector<Component> get_components(const Json& j, const std::string& where) {
  std::vector<Component> out;
  for (const auto& n : get_as<std::vector<std::string>>(j, where)) out.push_back(parse_component(n));
  if (out.empty()) bad(where, "needs at least one component");
  return out;
}

TreeParams get_trees(const Json& j) {
  check_keys(j, {"num_trees", "max_depth"}, "trees");
  TreeParams t;
  if (j.contains("num_trees")) t.num_trees = get_count(j["num_trees"], "trees.num_trees");
  if (j.contains("max_depth")) t.max_depth = get_count(j["max_depth"], "trees.max_depth");
  if (t.num_trees == 0) bad("trees.num_trees", "must be >= 1");
  return t;
}

experiments::DataSource get_source(const Json& j) {
  check_keys(j, {"mixture", "csv"}, "data");
  experiments::DataSource src;
  if (j.contains("mixture") && j.contains("csv")) bad("data", "give either mixture or csv");
  if (j.contains("mixture")) src.mixture = mixture_from_json(j["mixture"]);
  if (j.contains("csv")) {
    const Json& c = j["csv"];
    check_keys(c, {"path", "label_column", "delimiter", "train_fraction"}, "data.csv");
    experiments::CsvSource csv;
    if (!c.contains("path")) bad("data.csv", "missing path");
    csv.path = get_as<std::string>(c["path"], "data.csv.path");
    if (c.contains("label_column")) {
      csv.label_column = get_as<std::string>(c["label_column"], "data.csv.label_column");
    }
    if (c.contains("delimiter")) {
      const auto d = get_as<std::string>(c["delimiter"], "data.csv.delimiter");
      if (d.size() != 1) bad("data.csv.delimiter", "must be a single character");
      csv.delimiter = d[0];
    }
    if (c.contains("train_fraction")) {
      csv.train_fraction = get_number(c["train_fraction"], "data.csv.train_fraction");
    }
    src.csv = std::move(csv);
  }
  return src;
}

void get_run(const Json& j, RunOptions& run) {
  if (j.contains("seeds")) {
    run.seeds.clear();
    for (auto v : get_as<std::vector<std::uint64_t>>(j["seeds"], "seeds")) run.seeds.push_back({v});
    if (run.seeds.empty()) bad("seeds", "needs at least one seed");
  }
  if (j.contains("output")) run.output = get_as<std::string>(j["output"], "output");
  if (j.contains("format")) run.format = get_as<std::string>(j["format"], "format");
}

std::vector<std::vector<double>> get_matrix(const Json& j, const std::string& where) {
  return get_as<std::vector<std::vector<double>>>(j, where);
}

}  // namespace

template <typename Err>
Json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Err("cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Err("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}
template Json load_json<ConfigError>(const std::filesystem::path&);
template Json load_json<DataError>(const std::filesystem::path&);

void check_keys(const Json& object, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!object.is_object()) bad(where, "expected a JSON object");
  for (const auto& [key, value] : object.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* a) { return key == a; });
    if (!known) bad(where, "unknown key '" + key + "'");
  }
}

MixtureSpec mixture_from_json(const Json& j) {
  check_keys(j, {"num_classes", "num_features", "means", "scales", "scale", "class_priors",
                 "label_flip"},
             "mixture");
  if (!j.contains("means")) bad("mixture", "missing means");
  MixtureSpec spec;
  spec.means = get_matrix(j["means"], "mixture.means");
  if (spec.means.empty()) bad("mixture.means", "needs at least one row");
  spec.num_classes = j.contains("num_classes") ? get_count(j["num_classes"], "mixture.num_classes")
                                               : spec.means.size();
  spec.num_features = j.contains("num_features")
                          ? get_count(j["num_features"], "mixture.num_features")
                          : spec.means.front().size();
  if (j.contains("scales") && j.contains("scale")) bad("mixture", "give either scales or scale");
  if (j.contains("scales")) {
    spec.scales = get_matrix(j["scales"], "mixture.scales");
  } else {
    const double s = j.contains("scale") ? get_number(j["scale"], "mixture.scale") : 1.0;
    spec.scales.assign(spec.num_classes, std::vector<double>(spec.num_features, s));
  }
  if (j.contains("class_priors")) {
    spec.class_priors = get_as<std::vector<double>>(j["class_priors"], "mixture.class_priors");
  }
  if (j.contains("label_flip")) spec.label_flip = get_number(j["label_flip"], "mixture.label_flip");
  try {
    spec.validate();
  } catch (const InvalidArgument& e) {
    bad("mixture", e.what());
  }
  return spec;
}

Json to_json(const MixtureSpec& spec) {
  return Json{{"num_classes", spec.num_classes}, {"num_features", spec.num_features},
              {"means", spec.means},             {"scales", spec.scales},
              {"class_priors", spec.class_priors}, {"label_flip", spec.label_flip}};
}

std::vector<SecondOrderEnsemble> ensembles_from_json(const Json& j) {
  const auto fail = [](const std::string& what) -> DataError {
    return DataError("ensembles: " + what);
  };
  Json list = j;
  Json weights;
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      if (key != "ensembles" && key != "weights") throw fail("unknown key '" + key + "'");
    }
    if (!j.contains("ensembles")) throw fail("missing key 'ensembles'");
    list = j["ensembles"];
    if (j.contains("weights")) weights = j["weights"];
  }
  if (!list.is_array() || list.empty()) throw fail("expected a nonempty array");
  // A single ensemble is an array of probability vectors.
  const bool single = list[0].is_array() && !list[0].empty() && list[0][0].is_number();
  if (single) list = Json::array({list});

  std::vector<SecondOrderEnsemble> out;
  out.reserve(list.size());
  for (std::size_t e = 0; e < list.size(); ++e) {
    const std::string where = "ensemble " + std::to_string(e);
    std::vector<std::vector<double>> rows;
    try {
      rows = list[e].get<std::vector<std::vector<double>>>();
    } catch (const Json::exception&) {
      throw fail(where + ": expected an array of probability vectors");
    }
    try {
      std::vector<Categorical> members;
      members.reserve(rows.size());
      for (const auto& r : rows) members.emplace_back(r);
      if (weights.is_null()) {
        out.emplace_back(std::move(members));
      } else {
        if (!weights.is_array() || weights.size() != list.size()) {
          throw fail("weights must have one row per ensemble");
        }
        std::vector<double> w;
        try {
          w = weights[e].get<std::vector<double>>();
        } catch (const Json::exception&) {
          throw fail(where + ": weights must be numbers");
        }
        out.emplace_back(std::move(members), std::move(w));
      }
    } catch (const InvalidArgument& err) {
      throw fail(where + ": " + err.what());
    }
  }
  return out;
}

Json to_json(const experiments::DataSource& source) {
  if (!source.csv) return Json{{"mixture", to_json(source.mixture)}};
  const auto& c = *source.csv;
  return Json{{"csv",
               {{"path", c.path.string()},
                {"label_column", c.label_column},
                {"delimiter", std::string(1, c.delimiter)},
                {"train_fraction", c.train_fraction}}}};
}

Json to_json(const TreeParams& trees) {
  return Json{{"num_trees", trees.num_trees}, {"max_depth", trees.max_depth}};
}

void apply_selective(const Json& j, experiments::SelectiveSettings& s, RunOptions& run) {
  check_keys(j, {"data", "n_train", "n_test", "trees", "unc_rules", "task_rules", "components",
                 "seeds", "output", "format"},
             "selective config");
  if (j.contains("data")) s.data = get_source(j["data"]);
  if (j.contains("n_train")) s.n_train = get_count(j["n_train"], "n_train");
  if (j.contains("n_test")) s.n_test = get_count(j["n_test"], "n_test");
  if (j.contains("trees")) s.trees = get_trees(j["trees"]);
  if (j.contains("unc_rules")) s.unc_rules = get_rules(j["unc_rules"], "unc_rules");
  if (j.contains("task_rules")) s.task_rules = get_rules(j["task_rules"], "task_rules");
  if (j.contains("components")) s.components = get_components(j["components"], "components");
  get_run(j, run);
}

void apply_ood(const Json& j, experiments::OodSettings& s, RunOptions& run) {
  check_keys(j, {"mixture", "shift", "n_train", "n_id", "n_ood", "trees", "rules", "components",
                 "seeds", "output", "format"},
             "ood config");
  if (j.contains("mixture")) s.mixture = mixture_from_json(j["mixture"]);
  if (j.contains("shift")) s.shift = get_number(j["shift"], "shift");
  if (j.contains("n_train")) s.n_train = get_count(j["n_train"], "n_train");
  if (j.contains("n_id")) s.n_id = get_count(j["n_id"], "n_id");
  if (j.contains("n_ood")) s.n_ood = get_count(j["n_ood"], "n_ood");
  if (j.contains("trees")) s.trees = get_trees(j["trees"]);
  if (j.contains("rules")) s.rules = get_rules(j["rules"], "rules");
  if (j.contains("components")) s.components = get_components(j["components"], "components");
  get_run(j, run);
}

void apply_active(const Json& j, experiments::ActiveSettings& s, RunOptions& run) {
  check_keys(j, {"data", "n_pool", "n_test", "initial_labeled", "query_budget", "rounds", "trees",
                 "strategies", "seeds", "output", "format"},
             "active config");
  if (j.contains("data")) s.data = get_source(j["data"]);
  if (j.contains("n_pool")) s.n_pool = get_count(j["n_pool"], "n_pool");
  if (j.contains("n_test")) s.n_test = get_count(j["n_test"], "n_test");
  if (j.contains("initial_labeled")) {
    s.initial_labeled = get_count(j["initial_labeled"], "initial_labeled");
  }
  if (j.contains("query_budget")) s.query_budget = get_count(j["query_budget"], "query_budget");
  if (j.contains("rounds")) s.rounds = get_count(j["rounds"], "rounds");
  if (j.contains("trees")) s.trees = get_trees(j["trees"]);
  if (j.contains("strategies")) {
    s.strategies.clear();
    for (const auto& n : get_as<std::vector<std::string>>(j["strategies"], "strategies")) {
      s.strategies.push_back(parse_strategy(n));
    }
    if (s.strategies.empty()) bad("strategies", "needs at least one strategy");
  }
  get_run(j, run);
}

void apply_dial(const Json& j, experiments::DialSettings& s, RunOptions& run) {
  check_keys(j, {"label_flips", "n_train", "n_test", "trees", "seeds", "output", "format"},
             "dial config");
  if (j.contains("label_flips")) {
    s.label_flips = get_as<std::vector<double>>(j["label_flips"], "label_flips");
  }
  if (j.contains("n_train")) s.n_train = get_count(j["n_train"], "n_train");
  if (j.contains("n_test")) s.n_test = get_count(j["n_test"], "n_test");
  if (j.contains("trees")) s.trees = get_trees(j["trees"]);
  get_run(j, run);
}

}  // namespace uqalign::config
