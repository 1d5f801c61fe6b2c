#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "uqalign/cli.hpp"

namespace fs = std::filesystem;
using uqalign::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  args.insert(args.begin(), "uqalign");
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "uqalign_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void put(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("format_number round-trips") {
  using uqalign::cli::format_number;
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(-2.5e-7) == "-2.5e-07");
  CHECK(std::stod(format_number(0.6931471805599453)) == 0.6931471805599453);
}

TEST_CASE("write_atomic leaves no temporary behind") {
  const auto dir = scratch("atomic");
  const auto p = dir / "nested" / "x.txt";
  uqalign::cli::write_atomic(p, "hello\n");
  CHECK(slurp(p) == "hello\n");
  uqalign::cli::write_atomic(p, "bye\n");
  CHECK(slurp(p) == "bye\n");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir / "nested")) ++files;
  CHECK(files == 1);
}

TEST_CASE("measure writes a JSON record") {
  const auto dir = scratch("measure");
  put(dir / "q.json", "[[1, 0], [0, 1]]");
  const auto r = call({"measure", (dir / "q.json").string(), "--rule", "log", "-o",
                       (dir / "m.json").string()});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(slurp(dir / "m.json"));
  REQUIRE(j["records"].size() == 1);
  CHECK(j["records"][0]["rule"] == "log");
  CHECK(j["records"][0]["tu"].get<double>() == doctest::Approx(0.693147).epsilon(1e-6));
  CHECK(j["records"][0]["au"].get<double>() == 0.0);
  CHECK(j["records"][0]["eu"].get<double>() == doctest::Approx(0.693147).epsilon(1e-6));

  const auto csv = call({"measure", (dir / "q.json").string(), "--format", "csv", "-o", "-"});
  CHECK(csv.code == 0);
  CHECK(csv.out.rfind("ensemble,rule,tu,au,eu\n0,log,", 0) == 0);
}

TEST_CASE("exit codes") {
  const auto dir = scratch("codes");
  CHECK(call({"--help"}).code == 0);
  CHECK(call({"selective", "--help"}).code == 0);
  CHECK(call({"selective", "--help"}).out.find("--unc-rules") != std::string::npos);
  CHECK(call({}).code == 2);
  CHECK(call({"frobnicate"}).code == 2);
  CHECK(call({"selective", "--seeds", "x"}).code == 2);
  CHECK(call({"ood", "--rules", "hinge", "-o", (dir / "o.csv").string()}).code == 2);
  CHECK(call({"selective", "--format", "xml"}).code == 2);

  const auto missing = call({"measure", (dir / "absent.json").string()});
  CHECK(missing.code == 3);
  CHECK(missing.err.find('\n') == missing.err.size() - 1);  // one line

  put(dir / "bad.json", "[[0.7, 0.7]]");
  CHECK(call({"measure", (dir / "bad.json").string()}).code == 3);

  put(dir / "cfg.json", R"({"n_trian": 10})");
  CHECK(call({"selective", "--config", (dir / "cfg.json").string()}).code == 2);
  put(dir / "broken.json", "{");
  CHECK(call({"ood", "--config", (dir / "broken.json").string()}).code == 2);

  put(dir / "bad.csv", "x,label\n1,a\nz,b\n");
  const auto data = call({"active", "--csv", (dir / "bad.csv").string(), "-o",
                          (dir / "a.csv").string()});
  CHECK(data.code == 3);
  CHECK_FALSE(fs::exists(dir / "a.csv"));

  // An impossible loop (pool too small) is a configuration problem.
  CHECK(call({"active", "--n-pool", "30", "--rounds", "5", "-o", (dir / "a.csv").string()}).code ==
        2);
}

TEST_CASE("check subcommand") {
  const auto r = call({"check", "--ensembles", "200", "--cost-vectors", "50"});
  CHECK(r.code == 0);
  CHECK(r.out.find("7/7 suites passed") != std::string::npos);
}

TEST_CASE("experiment subcommands write csv and json with seed rows") {
  const auto dir = scratch("experiments");
  const std::vector<std::string> small{"--seeds", "4,5", "--trees", "3", "--depth", "3"};
  auto with = [&](std::vector<std::string> a) {
    a.insert(a.end(), small.begin(), small.end());
    return call(a);
  };

  REQUIRE(with({"selective", "--n-train", "200", "--n-test", "100", "-o",
                (dir / "s.csv").string(), "--curves", (dir / "curves.csv").string()})
              .code == 0);
  const auto s = slurp(dir / "s.csv");
  CHECK(s.rfind("unc_rule,task_rule,component,seed,aulc\n", 0) == 0);
  CHECK(s.find("log,log,tu,4,") != std::string::npos);
  CHECK(s.find("zero_one,brier,tu,mean,") != std::string::npos);
  CHECK(s.find("brier,zero_one,tu,std,") != std::string::npos);
  const auto curves = slurp(dir / "curves.csv");
  CHECK(curves.find("log,log,tu,5,1,") != std::string::npos);
  CHECK(curves.find(",aulc,") != std::string::npos);

  REQUIRE(with({"ood", "--n-train", "200", "--n-id", "50", "--n-ood", "50", "--format", "json",
                "-o", (dir / "o.json").string()})
              .code == 0);
  const auto o = nlohmann::json::parse(slurp(dir / "o.json"));
  CHECK(o["cells"].size() == 9);
  CHECK(o["cells"][0]["values"].size() == 2);
  CHECK(o["config"]["seeds"] == nlohmann::json::array({4, 5}));

  REQUIRE(with({"active", "--n-pool", "200", "--n-test", "100", "--initial", "10", "--budget",
                "10", "--rounds", "2", "-o", (dir / "a.csv").string()})
              .code == 0);
  const auto a = slurp(dir / "a.csv");
  CHECK(a.rfind("strategy,seed,round,labeled_count,zero_one_loss\n", 0) == 0);
  CHECK(a.find("eu_zero_one,5,2,30,") != std::string::npos);
  CHECK(a.find("random,mean,0,10,") != std::string::npos);

  REQUIRE(with({"dial", "--flips", "0,0.2", "--n-train", "200", "--n-test", "100", "-o",
                (dir / "d.csv").string()})
              .code == 0);
  CHECK(slurp(dir / "d.csv").find("0.2,mean,") != std::string::npos);
}

TEST_CASE("config values apply and flags override them") {
  const auto dir = scratch("config");
  put(dir / "c.json", R"({"n_train": 150, "n_test": 80, "seeds": [9],
                          "trees": {"num_trees": 2, "max_depth": 2},
                          "unc_rules": ["brier"], "task_rules": ["log"]})");
  REQUIRE(call({"selective", "--config", (dir / "c.json").string(), "--format", "json", "-o",
                (dir / "c_out.json").string()})
              .code == 0);
  auto j = nlohmann::json::parse(slurp(dir / "c_out.json"));
  CHECK(j["config"]["seeds"] == nlohmann::json::array({9}));
  CHECK(j["cells"].size() == 1);
  CHECK(j["config"]["trees"]["num_trees"] == 2);

  REQUIRE(call({"selective", "--config", (dir / "c.json").string(), "--seeds", "1,2",
                "--task-rules", "log,zero_one", "--format", "json", "-o",
                (dir / "c_out.json").string()})
              .code == 0);
  j = nlohmann::json::parse(slurp(dir / "c_out.json"));
  CHECK(j["config"]["seeds"] == nlohmann::json::array({1, 2}));
  CHECK(j["cells"].size() == 2);
}

TEST_CASE("default output directory comes from the environment") {
  const auto dir = scratch("env");
  put(dir / "q.json", "[[0.5, 0.5]]");
  ::setenv(uqalign::cli::kOutputDirEnv, (dir / "out").string().c_str(), 1);
  const auto r = call({"measure", (dir / "q.json").string()});
  ::unsetenv(uqalign::cli::kOutputDirEnv);
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "out" / "measure.json"));
}
