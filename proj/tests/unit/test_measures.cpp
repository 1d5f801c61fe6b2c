#include <doctest.h>

#include <cmath>
#include <random>

#include "support/oracle.hpp"
#include "support/random_inputs.hpp"
#include "uqalign/measures.hpp"
#include "uqalign/scoring.hpp"

using namespace uqalign;

namespace {

SecondOrderEnsemble opposite_vertices() {
  return SecondOrderEnsemble({Categorical({1, 0}), Categorical({0, 1})});
}

}  // namespace

TEST_CASE("decompose examples") {
  const double ln2 = std::log(2.0);
  SUBCASE("log on opposite vertices") {
    const auto t = decompose(LogScore(), opposite_vertices());
    CHECK(t.tu == doctest::Approx(ln2));
    CHECK(t.au == doctest::Approx(0.0));
    CHECK(t.eu == doctest::Approx(ln2));
  }
  SUBCASE("brier on opposite vertices") {
    const auto t = decompose(BrierScore(), opposite_vertices());
    CHECK(t.tu == doctest::Approx(0.5));
    CHECK(t.au == doctest::Approx(0.0));
    CHECK(t.eu == doctest::Approx(0.5));
  }
  SUBCASE("zero-one with a tied average") {
    // bar = (0.5, 0.5) picks class 0; TU = 1 - 0.5, AU = 1 - 0.6.
    const SecondOrderEnsemble q({Categorical({0.6, 0.4}), Categorical({0.4, 0.6})});
    for (auto mode : {DecomposeMode::generic, DecomposeMode::closed_form}) {
      const auto t = decompose(ZeroOneScore(), q, mode);
      CHECK(t.tu == doctest::Approx(0.5));
      CHECK(t.au == doctest::Approx(0.4));
      CHECK(t.eu == doctest::Approx(0.1));
    }
  }
  SUBCASE("a point mass ensemble has no epistemic part") {
    const SecondOrderEnsemble q({Categorical({0.2, 0.3, 0.5}), Categorical({0.2, 0.3, 0.5})});
    for (const auto& r : builtin_rules()) CHECK(decompose(*r, q).eu == doctest::Approx(0.0));
  }
}

TEST_CASE("component access and names") {
  const auto t = decompose(LogScore(), opposite_vertices());
  CHECK(t.get(Component::total) == t.tu);
  CHECK(t.get(Component::aleatoric) == t.au);
  CHECK(t.get(Component::epistemic) == t.eu);
  CHECK(t.rule_name == "log");
  CHECK(parse_component("tu") == Component::total);
  CHECK(parse_component("au") == Component::aleatoric);
  CHECK(parse_component("eu") == Component::epistemic);
  CHECK(to_string(Component::epistemic) == "eu");
  CHECK_THROWS_AS(parse_component("xu"), ConfigError);
}

TEST_CASE("decompose agrees with the direct definition on random ensembles") {
  for (const auto& e : testgen::grid(400, 31)) {
    const auto q = e.build();
    for (const auto& r : builtin_rules()) {
      const auto want = oracle::decompose(std::string(r->name()), e.members, e.weights);
      for (auto mode : {DecomposeMode::generic, DecomposeMode::closed_form}) {
        const auto got = decompose(*r, q, mode);
        CHECK(std::abs(got.tu - want.tu) < 1e-9);
        CHECK(std::abs(got.au - want.au) < 1e-9);
        CHECK(std::abs(got.eu - want.eu) < 1e-9);
      }
    }
  }
}

TEST_CASE("closed form for an unknown rule is refused") {
  class Custom final : public ScoringRule {
   public:
    std::string_view name() const override { return "custom"; }
    bool strictly_proper() const override { return false; }
    double score(const Categorical& p, Label y) const override { return 1.0 - p[y]; }
  };
  const Custom c;
  CHECK_FALSE(has_closed_form(c));
  CHECK(has_closed_form(LogScore()));
  CHECK_THROWS_AS(decompose(c, opposite_vertices(), DecomposeMode::closed_form), InvalidArgument);
  const auto t = decompose(c, opposite_vertices());
  CHECK(t.tu == doctest::Approx(t.au + t.eu));
}

TEST_CASE("jensen gap examples") {
  CHECK(jensen_gap(LogScore(), opposite_vertices()) == doctest::Approx(std::log(2.0)));
  const SecondOrderEnsemble point({Categorical({0.3, 0.7})});
  CHECK(jensen_gap(BrierScore(), point) == doctest::Approx(0.0));
  // E[G] = 0.68 - 1 = -0.32 and G(0.5, 0.5) = -0.5, so the gap is 0.18,
  // matching E[sum_k (bar_k - theta_k)^2] = 2 * 0.3^2.
  const SecondOrderEnsemble q({Categorical({0.8, 0.2}), Categorical({0.2, 0.8})});
  CHECK(jensen_gap(BrierScore(), q) == doctest::Approx(0.18));
  CHECK(decompose(BrierScore(), q).eu == doctest::Approx(0.18));
  CHECK_THROWS_AS(jensen_gap(ZeroOneScore(), q), UnsupportedOperation);
}

TEST_CASE("jensen gap equals EU for strictly proper rules") {
  for (const auto& e : testgen::grid(300, 32)) {
    const auto q = e.build();
    for (const auto& r : builtin_rules()) {
      if (!r->strictly_proper()) continue;
      CHECK(std::abs(jensen_gap(*r, q) - decompose(*r, q).eu) < 1e-9);
    }
  }
}

TEST_CASE("batch decompose") {
  CHECK(batch_decompose(LogScore(), {}).empty());

  const SecondOrderEnsemble point({Categorical({0.25, 0.75})});
  const auto one = batch_decompose(BrierScore(), std::span(&point, 1));
  REQUIRE(one.size() == 1);
  CHECK(one[0].tu == doctest::Approx(BrierScore().entropy(Categorical({0.25, 0.75}))));
  CHECK(one[0].au == doctest::Approx(one[0].tu));
  CHECK(one[0].eu == doctest::Approx(0.0));

  std::mt19937_64 gen(33);
  std::vector<SecondOrderEnsemble> qs;
  for (int i = 0; i < 100; ++i) qs.push_back(testgen::ensemble(gen, 3, 1 + i % 7, i % 2 == 0).build());
  const auto batch = batch_decompose(ZeroOneScore(), qs);
  REQUIRE(batch.size() == qs.size());
  for (std::size_t i = 0; i < qs.size(); ++i) {
    const auto single = decompose(ZeroOneScore(), qs[i]);
    CHECK(batch[i].tu == single.tu);
    CHECK(batch[i].au == single.au);
    CHECK(batch[i].eu == single.eu);
  }

  const std::vector<SecondOrderEnsemble> mixed{point, SecondOrderEnsemble({Categorical::uniform(3)})};
  CHECK_THROWS_AS(batch_decompose(LogScore(), mixed), DimensionMismatch);
}
