// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Trend criteria use seeds 1..10.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support/oracle.hpp"
#include "support/random_inputs.hpp"
#include "uqalign/experiments.hpp"
#include "uqalign/measures.hpp"
#include "uqalign/ood.hpp"
#include "uqalign/scoring.hpp"
#include "uqalign/selective.hpp"

using namespace uqalign;
namespace ex = uqalign::experiments;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool ok = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double time_limit_s;  // <= 0 means none stated
  std::function<Verdict()> body;
};

std::string num(double v, int digits = 5) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

std::string sci(double v) {
  std::ostringstream os;
  os.setf(std::ios::scientific);
  os.precision(2);
  os << v;
  return os.str();
}

std::vector<Seed> ten_seeds() {
  std::vector<Seed> s;
  for (std::uint64_t i = 1; i <= 10; ++i) s.push_back({i});
  return s;
}

const std::vector<testgen::Ensemble>& shared_inputs() {
  static const auto inputs = testgen::grid(1000, 2024);
  return inputs;
}

const std::vector<SecondOrderEnsemble>& shared_ensembles() {
  static const auto built = [] {
    std::vector<SecondOrderEnsemble> out;
    for (const auto& e : shared_inputs()) out.push_back(e.build());
    return out;
  }();
  return built;
}

// ------------------------------------------------------------ criteria

Verdict decomposition_identity() {
  double worst_gap = 0.0;
  double min_eu = INFINITY;
  std::size_t cases = 0;
  for (const auto& q : shared_ensembles()) {
    for (const auto& r : builtin_rules()) {
      const auto t = decompose(*r, q);
      worst_gap = std::max(worst_gap, std::abs(t.tu - (t.au + t.eu)));
      min_eu = std::min(min_eu, t.eu);
      ++cases;
    }
  }
  return {worst_gap < 1e-9 && min_eu >= -1e-12,
          std::to_string(cases) + " cases, max |TU-(AU+EU)| = " + sci(worst_gap) +
              ", min EU = " + sci(min_eu)};
}

Verdict closed_form_equivalence() {
  double worst = 0.0;
  double worst_oracle = 0.0;
  const auto& inputs = shared_inputs();
  const auto& qs = shared_ensembles();
  for (std::size_t i = 0; i < qs.size(); ++i) {
    for (const auto& r : builtin_rules()) {
      const auto a = decompose(*r, qs[i], DecomposeMode::closed_form);
      const auto b = decompose(*r, qs[i], DecomposeMode::generic);
      worst = std::max({worst, std::abs(a.tu - b.tu), std::abs(a.au - b.au),
                        std::abs(a.eu - b.eu)});
      // Both paths also against the definition written out in test code.
      const auto o = oracle::decompose(std::string(r->name()), inputs[i].members, inputs[i].weights);
      worst_oracle = std::max({worst_oracle, std::abs(a.tu - o.tu), std::abs(a.au - o.au),
                               std::abs(b.tu - o.tu), std::abs(b.au - o.au)});
    }
  }
  return {worst < 1e-9 && worst_oracle < 1e-9,
          "max closed/generic diff = " + sci(worst) +
              ", max diff to oracle = " + sci(worst_oracle)};
}

Verdict jensen_and_bregman() {
  double worst_gap = 0.0;
  for (const auto& q : shared_ensembles()) {
    for (const auto& r : builtin_rules()) {
      if (!r->strictly_proper()) continue;
      worst_gap = std::max(worst_gap, std::abs(jensen_gap(*r, q) - decompose(*r, q).eu));
    }
  }

  // D(a, b) = G(b) - G(a) - <grad G(a), b - a>, gradient by central
  // differences along e_i - (1/K) 1.
  std::mt19937_64 gen(77);
  const double h = 1e-6;
  double worst_fd = 0.0;
  static constexpr std::size_t ks[] = {2, 3, 5, 10};
  for (const auto& r : builtin_rules()) {
    if (!r->strictly_proper()) continue;
    for (std::size_t i = 0; i < 100; ++i) {
      const std::size_t k = ks[i % 4];
      const auto a = testgen::simplex(gen, k, 0.2);
      const auto b = testgen::member(gen, k);
      double slope = 0.0;
      for (std::size_t c = 0; c < k; ++c) {
        auto up = a;
        auto down = a;
        for (std::size_t j = 0; j < k; ++j) {
          const double u = (j == c ? 1.0 : 0.0) - 1.0 / static_cast<double>(k);
          up[j] += h * u;
          down[j] -= h * u;
        }
        const double d = (r->potential(Categorical(up)) - r->potential(Categorical(down))) / (2 * h);
        slope += (b[c] - a[c]) * d;
      }
      const double bregman = r->potential(Categorical(b)) - r->potential(Categorical(a)) - slope;
      worst_fd = std::max(worst_fd, std::abs(bregman - r->divergence(Categorical(a), Categorical(b))));
    }
  }
  return {worst_gap < 1e-9 && worst_fd < 1e-7,
          "max |gap-EU| = " + sci(worst_gap) +
              ", max Bregman FD error = " + sci(worst_fd) + " (200 points)"};
}

Verdict ordering_oracle() {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t misses = 0;
  double worst_identity = 0.0;
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 2 + static_cast<std::size_t>(i % 6);
    std::vector<double> c(n);
    for (double& x : c) x = i % 5 == 0 ? std::floor(u(gen) * 4) / 4 : u(gen);
    const auto order = optimal_order(c);
    if (oracle::order_sum(c, order) != oracle::brute_force_min(c)) ++misses;
    const auto curve = loss_rejection_curve(c, c);
    worst_identity = std::max(
        worst_identity, std::abs(curve.aulc * static_cast<double>(n) - oracle::order_sum(c, order)));
  }
  return {misses == 0 && worst_identity < 1e-9,
          "200 vectors, " + std::to_string(misses) +
              " non-optimal, max |n*aulc - S| = " + sci(worst_identity)};
}

// Criteria 5 and 6 share one run over all components.
const std::vector<ex::SelectiveCell>& selective_cells() {
  static const auto cells = [] {
    ex::SelectiveSettings s;
    s.components = {Component::total, Component::aleatoric, Component::epistemic};
    return ex::run_selective(s, ten_seeds());
  }();
  return cells;
}

double mean_aulc(const std::string& unc, const std::string& task, Component c) {
  for (const auto& cell : selective_cells()) {
    if (cell.unc_rule == unc && cell.task_rule == task && cell.component == c) {
      return ex::summarize(cell.aulc).mean;
    }
  }
  throw std::logic_error("missing cell");
}

const std::vector<std::string> kRules{"log", "brier", "zero_one"};

Verdict selective_alignment() {
  Verdict v;
  for (const auto& task : kRules) {
    const double matched = mean_aulc(task, task, Component::total);
    double best_other = INFINITY;
    for (const auto& unc : kRules) {
      if (unc != task) best_other = std::min(best_other, mean_aulc(unc, task, Component::total));
    }
    v.ok = v.ok && matched <= best_other;
    v.detail += task + ": matched " + num(matched) + " vs best mismatched " + num(best_other) + (task == kRules.back() ? "" : "; ");
  }
  return v;
}

Verdict tu_beats_components() {
  Verdict v;
  for (const auto& rule : kRules) {
    const double tu = mean_aulc(rule, rule, Component::total);
    const double au = mean_aulc(rule, rule, Component::aleatoric);
    const double eu = mean_aulc(rule, rule, Component::epistemic);
    v.ok = v.ok && tu <= au && tu <= eu;
    v.detail += rule + ": tu " + num(tu) + " au " + num(au) + " eu " + num(eu) + (rule == kRules.back() ? "" : "; ");
  }
  return v;
}

Verdict ood_trend() {
  ex::OodSettings s;
  s.shift = 10.0;
  s.components = {Component::epistemic};
  const auto cells = ex::run_ood(s, ten_seeds());
  std::map<std::string, double> eu;
  for (const auto& c : cells) eu[c.rule] = ex::summarize(c.auroc).mean;

  std::mt19937_64 gen(5);
  std::uniform_int_distribution<int> size(1, 100);
  std::uniform_int_distribution<int> coarse(0, 6);
  std::normal_distribution<double> z;
  std::size_t mismatches = 0;
  for (int i = 0; i < 500; ++i) {
    std::vector<double> id(size(gen));
    std::vector<double> ood(size(gen));
    for (double& x : id) x = i % 2 ? coarse(gen) : z(gen);
    for (double& x : ood) x = (i % 2 ? coarse(gen) : z(gen)) + 0.4;
    if (auroc(id, ood) != oracle::pairwise_auroc(id, ood)) ++mismatches;
  }
  return {eu["log"] > eu["zero_one"] && eu["log"] >= 0.9 && mismatches == 0,
          "EU auroc log " + num(eu["log"], 4) + ", brier " + num(eu["brier"], 4) +
              ", zero_one " + num(eu["zero_one"], 4) + "; pair-count mismatches " +
              std::to_string(mismatches) + "/500"};
}

Verdict active_trend() {
  const ex::ActiveSettings s;
  const auto runs = ex::run_active(s, ten_seeds());
  const double target = ex::mean_curve(runs, QueryStrategy::random).back();
  std::map<QueryStrategy, std::size_t> reach;
  for (auto q : all_strategies()) reach[q] = ex::rounds_to_reach(ex::mean_curve(runs, q), target);
  const auto z = reach[QueryStrategy::eu_zero_one];
  const auto rnd = reach[QueryStrategy::random];
  bool ok = true;
  for (auto q : all_strategies()) ok = ok && z <= reach[q];
  for (auto q : {QueryStrategy::eu_log, QueryStrategy::eu_brier, QueryStrategy::eu_zero_one}) {
    ok = ok && reach[q] < rnd;
  }
  std::string detail = "target " + num(target, 4) + "; rounds to reach:";
  for (auto q : all_strategies()) {
    detail += " " + std::string(to_string(q)) + "=" + std::to_string(reach[q]);
  }
  return {ok, detail};
}

Verdict aleatoric_dial() {
  const ex::DialSettings s;
  const auto rows = ex::run_aleatoric_dial(s, ten_seeds());
  bool increasing = true;
  double prev = -INFINITY;
  std::string detail = "mean AU:";
  double loss_at_03 = NAN;
  for (const auto& r : rows) {
    const double au = ex::summarize(r.mean_au).mean;
    increasing = increasing && au > prev;
    prev = au;
    detail += " " + num(au, 4);
    if (r.label_flip == 0.3) loss_at_03 = ex::summarize(r.test_loss).mean;
  }
  detail += "; test loss at flip 0.3 = " + num(loss_at_03, 4);
  return {increasing && std::abs(loss_at_03 - 0.30) <= 0.03, detail};
}

// ---------------------------------------------------------- determinism

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

int shell(const std::string& cmd) { return std::system((cmd + " > /dev/null").c_str()); }

Verdict cli_determinism() {
  const fs::path root = UQALIGN_SCRATCH;
  fs::remove_all(root);
  fs::create_directories(root);
  {
    std::ofstream q(root / "ensembles.json");
    q << "[[[0.7, 0.2, 0.1], [0.1, 0.8, 0.1]], [[0.5, 0.5, 0], [0.2, 0.2, 0.6], [1, 0, 0]]]";
  }
  const std::string tool = UQALIGN_TOOL;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"measure", "measure " + (root / "ensembles.json").string()},
      {"selective", "selective --seeds 1,2 --curves {dir}/curves.csv"},
      {"ood", "ood --seeds 1,2"},
      {"active", "active --seeds 1,2"},
      {"dial", "dial --seeds 1,2"},
  };
  Verdict v;
  std::size_t compared = 0;
  for (const auto& [name, args] : commands) {
    for (const std::string format : {"csv", "json"}) {
      std::string outputs[2];
      std::string curves[2];
      for (int rep = 0; rep < 2; ++rep) {
        const fs::path dir = root / (name + "_" + format + "_" + std::to_string(rep));
        std::string a = args;
        if (const auto at = a.find("{dir}"); at != std::string::npos) a.replace(at, 5, dir.string());
        const fs::path out = dir / (name + "." + format);
        const int rc = shell(tool + " " + a + " --format " + format + " -o " + out.string());
        if (rc != 0 || !fs::exists(out)) {
          v.ok = false;
          v.detail += name + "/" + format + " failed to run; ";
          continue;
        }
        outputs[rep] = slurp(out);
        if (fs::exists(dir / "curves.csv")) curves[rep] = slurp(dir / "curves.csv");
      }
      if (outputs[0].empty() || outputs[0] != outputs[1] || curves[0] != curves[1]) {
        v.ok = false;
        v.detail += name + "/" + format + " differs; ";
      }
      ++compared;
    }
  }
  v.detail += std::to_string(compared) + " command/format pairs rerun and compared byte for byte";
  return v;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "decomposition identity", 5.0, decomposition_identity},
      {2, "closed form equals generic", 5.0, closed_form_equivalence},
      {3, "jensen gap and bregman gradient", 0.0, jensen_and_bregman},
      {4, "ordering oracle", 10.0, ordering_oracle},
      {5, "selective alignment trend", 300.0, selective_alignment},
      {6, "tu beats components", 0.0, tu_beats_components},
      {7, "ood trend and pair counting", 0.0, ood_trend},
      {8, "active learning trend", 600.0, active_trend},
      {9, "aleatoric dial", 0.0, aleatoric_dial},
      {10, "cli determinism", 0.0, cli_determinism},
  };
  // Inputs shared by 1-3 are built before timing starts.
  (void)shared_ensembles();

  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.body();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.time_limit_s <= 0.0 || secs < c.time_limit_s;
    const bool ok = v.ok && in_time;
    failed += ok ? 0 : 1;
    std::cout << (ok ? "PASS" : "FAIL") << " [" << c.id << "] " << c.title << ": " << v.detail
              << " (" << num(secs, 2) << " s";
    if (c.time_limit_s > 0.0) std::cout << ", limit " << num(c.time_limit_s, 0) << " s";
    std::cout << ")" << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
            << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
