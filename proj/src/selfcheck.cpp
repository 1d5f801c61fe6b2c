#include "uqalign/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "uqalign/measures.hpp"
#include "uqalign/ood.hpp"
#include "uqalign/rng.hpp"
#include "uqalign/scoring.hpp"
#include "uqalign/selective.hpp"

namespace uqalign::selfcheck {
namespace {

constexpr std::size_t kClassCounts[] = {2, 3, 5, 10};
constexpr std::size_t kMemberCounts[] = {1, 2, 20};

std::vector<double> normalized(std::vector<double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  for (double& x : v) x /= s;
  return v;
}

// Exponential spacings give a uniform draw on the simplex.
std::vector<double> simplex_point(Rng& rng, std::size_t k) {
  std::vector<double> v(k);
  for (double& x : v) x = -std::log1p(-rng.uniform()) + 1e-300;
  return normalized(std::move(v));
}

Categorical random_member(Rng& rng, std::size_t k) {
  const double kind = rng.uniform();
  if (kind < 0.1) return Categorical::point_mass(k, rng.below(k));
  auto v = simplex_point(rng, k);
  if (kind < 0.3) {
    v[rng.below(k)] = 0.0;
    if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; })) v[0] = 1.0;
    v = normalized(std::move(v));
  }
  return Categorical(std::move(v));
}

Categorical interior_point(Rng& rng, std::size_t k) {
  auto v = simplex_point(rng, k);
  for (double& x : v) x = 0.8 * x + 0.2 / static_cast<double>(k);
  return Categorical(normalized(std::move(v)));
}

void record(SuiteResult& r, double error, bool ok, const std::string& what) {
  ++r.cases;
  r.max_error = std::max(r.max_error, error);
  if (ok) return;
  if (r.failures++ == 0) r.first_failure = what;
}

std::string describe(std::string_view rule, std::size_t index) {
  std::ostringstream os;
  os << "rule " << rule << ", case " << index;
  return os.str();
}

}  // namespace

std::vector<SecondOrderEnsemble> random_ensembles(std::size_t count, Seed seed) {
  Rng rng(seed);
  std::vector<SecondOrderEnsemble> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t k = kClassCounts[i % std::size(kClassCounts)];
    const std::size_t m = kMemberCounts[(i / std::size(kClassCounts)) % std::size(kMemberCounts)];
    std::vector<Categorical> members;
    for (std::size_t j = 0; j < m; ++j) members.push_back(random_member(rng, k));
    if (i % 2 == 1) {
      out.emplace_back(std::move(members), simplex_point(rng, m));
    } else {
      out.emplace_back(std::move(members));
    }
  }
  return out;
}

SuiteResult decomposition_identity(std::span<const SecondOrderEnsemble> qs) {
  SuiteResult r{"decomposition identity", 0, 0, 0.0, {}};
  for (const auto& rule : builtin_rules()) {
    for (std::size_t i = 0; i < qs.size(); ++i) {
      const auto t = decompose(*rule, qs[i]);
      const double gap = std::abs(t.tu - (t.au + t.eu));
      record(r, gap, gap < 1e-9 && t.eu >= -1e-12, describe(rule->name(), i));
    }
  }
  return r;
}

SuiteResult closed_form_equivalence(std::span<const SecondOrderEnsemble> qs) {
  SuiteResult r{"closed form equals generic", 0, 0, 0.0, {}};
  for (const auto& rule : builtin_rules()) {
    for (std::size_t i = 0; i < qs.size(); ++i) {
      const auto a = decompose(*rule, qs[i], DecomposeMode::closed_form);
      const auto b = decompose(*rule, qs[i], DecomposeMode::generic);
      const double err = std::max(
          {std::abs(a.tu - b.tu), std::abs(a.au - b.au), std::abs(a.eu - b.eu)});
      record(r, err, err < 1e-9, describe(rule->name(), i));
    }
  }
  return r;
}

SuiteResult jensen_gap_identity(std::span<const SecondOrderEnsemble> qs) {
  SuiteResult r{"jensen gap equals EU", 0, 0, 0.0, {}};
  for (const auto& rule : builtin_rules()) {
    if (!rule->strictly_proper()) continue;
    for (std::size_t i = 0; i < qs.size(); ++i) {
      const double err = std::abs(jensen_gap(*rule, qs[i]) - decompose(*rule, qs[i]).eu);
      record(r, err, err < 1e-9, describe(rule->name(), i));
    }
  }
  return r;
}

SuiteResult bregman_gradient(std::size_t points, Seed seed) {
  SuiteResult r{"bregman finite differences", 0, 0, 0.0, {}};
  constexpr double h = 1e-6;
  Rng rng(seed);
  for (const auto& rule : builtin_rules()) {
    if (!rule->strictly_proper()) continue;
    for (std::size_t i = 0; i < points; ++i) {
      const std::size_t k = kClassCounts[i % std::size(kClassCounts)];
      const Categorical at = interior_point(rng, k);
      const Categorical other = random_member(rng, k);
      double slope = 0.0;
      for (std::size_t c = 0; c < k; ++c) {
        std::vector<double> up(at.probs().begin(), at.probs().end());
        std::vector<double> down = up;
        for (std::size_t j = 0; j < k; ++j) {
          const double u = (j == c ? 1.0 : 0.0) - 1.0 / static_cast<double>(k);
          up[j] += h * u;
          down[j] -= h * u;
        }
        const double directional =
            (rule->potential(Categorical(up)) - rule->potential(Categorical(down))) / (2.0 * h);
        slope += (other[c] - at[c]) * directional;
      }
      const double bregman = rule->potential(other) - rule->potential(at) - slope;
      const double err = std::abs(bregman - rule->divergence(at, other));
      record(r, err, err < 1e-7, describe(rule->name(), i));
    }
  }
  return r;
}

SuiteResult properness(std::size_t points, Seed seed) {
  SuiteResult r{"properness", 0, 0, 0.0, {}};
  Rng rng(seed);
  for (const auto& rule : builtin_rules()) {
    for (std::size_t i = 0; i < points; ++i) {
      const std::size_t k = kClassCounts[i % std::size(kClassCounts)];
      const Categorical truth = random_member(rng, k);
      const Categorical pred = random_member(rng, k);
      const double excess = rule->expected_loss(pred, truth) - rule->entropy(truth);
      bool ok = excess >= -1e-12;
      if (rule->strictly_proper() && !(pred == truth)) ok = ok && excess > 0.0;
      record(r, std::max(0.0, -excess), ok, describe(rule->name(), i));
    }
  }
  return r;
}

SuiteResult rearrangement_oracle(std::size_t vectors, Seed seed) {
  SuiteResult r{"rearrangement oracle", 0, 0, 0.0, {}};
  Rng rng(seed);
  for (std::size_t i = 0; i < vectors; ++i) {
    const std::size_t n = 2 + i % 6;
    std::vector<double> costs(n);
    // Every third vector draws from a coarse grid so ties occur.
    for (double& c : costs) {
      c = i % 3 == 0 ? static_cast<double>(rng.below(4)) / 4.0 : rng.uniform();
    }
    const auto order = optimal_order(costs);
    const double value = rearrangement_sum(costs, order);
    const auto brute = brute_force_aulc(costs);

    std::vector<double> uncertainties(n);
    for (std::size_t j = 0; j < n; ++j) uncertainties[order[j]] = static_cast<double>(j);
    const auto curve = loss_rejection_curve(costs, uncertainties);
    const double identity_err = std::abs(curve.aulc * static_cast<double>(n) - value);

    std::ostringstream what;
    what << "vector " << i << " (n=" << n << ")";
    record(r, std::max(std::abs(value - brute.value), identity_err),
           value == brute.value && identity_err < 1e-9, what.str());
  }
  return r;
}

SuiteResult auroc_pair_counting(std::size_t cases, Seed seed) {
  SuiteResult r{"auroc pair counting", 0, 0, 0.0, {}};
  Rng rng(seed);
  for (std::size_t i = 0; i < cases; ++i) {
    const std::size_t n_id = 1 + rng.below(100);
    const std::size_t n_ood = 1 + rng.below(100);
    const bool coarse = i % 2 == 0;
    const auto draw = [&] {
      return coarse ? static_cast<double>(rng.below(5)) : rng.normal();
    };
    std::vector<double> id(n_id);
    std::vector<double> ood(n_ood);
    for (double& x : id) x = draw();
    for (double& x : ood) x = draw() + 0.5;
    const double a = auroc(id, ood);
    const double b = auroc_pairwise(id, ood);
    record(r, std::abs(a - b), a == b, "case " + std::to_string(i));
  }
  return r;
}

std::vector<SuiteResult> run_all(const CheckOptions& options) {
  const auto qs = random_ensembles(options.ensembles, Rng::derive(options.seed, 0));
  return {decomposition_identity(qs),
          closed_form_equivalence(qs),
          jensen_gap_identity(qs),
          bregman_gradient(options.bregman_points, Rng::derive(options.seed, 1)),
          properness(options.ensembles, Rng::derive(options.seed, 2)),
          rearrangement_oracle(options.cost_vectors, Rng::derive(options.seed, 3)),
          auroc_pair_counting(options.auroc_cases, Rng::derive(options.seed, 4))};
}

}  // namespace uqalign::selfcheck
