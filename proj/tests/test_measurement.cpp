#include <doctest.h>

#include <map>

#include "fermitele/measurement.hpp"
#include "fermitele/operators.hpp"
#include "support.hpp"

using namespace fermitele;

TEST_SUITE("measurement") {
  TEST_CASE("Bell measurement of a Bell state is deterministic") {
    auto bb = bell_states(0, 1, 3);
    for (auto b : kBellLabels) {
      auto out = bell_measure(bb[b], 0, 1);
      REQUIRE(out.size() == 4);
      for (std::size_t i = 0; i < 4; ++i) {
        CHECK(out[i].probability == doctest::Approx(kBellLabels[i] == b ? 1.0 : 0.0));
      }
    }
  }

  TEST_CASE("branch probabilities sum to one") {
    testkit::Gen g(41);
    for (int k = 0; k < 30; ++k) {
      FockVector psi = g.state(4, {0, 1, 2, 3}, k % 2);
      double total = 0.0;
      for (const auto& b : bell_measure(psi, 1, 3)) {
        total += b.probability;
        if (b.possible()) CHECK(b.post_state.is_normalized());
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
      total = 0.0;
      for (const auto& b : number_measure(psi, {0, 2})) total += b.probability;
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("number-resolved Bell projectors") {
    ProjectorSet s = number_resolved_bell_projectors(0, 1, 2);
    validate(s);
    CHECK(s.complete);
    CHECK(s.labels == std::vector<std::string>{"0", "11", "Psi+", "Psi-"});
  }

  TEST_CASE("three-outcome measurement has a rank-two even element") {
    ProjectorSet s = three_outcome_povm(0, 1, 2);
    validate(s);
    CHECK(s.complete);
    CHECK(s.projectors.size() == 3);
    CHECK(s.projectors[2].trace().real() == doctest::Approx(2.0));
  }

  TEST_CASE("non-orthogonal ranges are rejected") {
    FockVector a = FockVector::basis(1, 0);
    FockVector b = from_creation_strings(1, {{1.0, {}}, {1.0, {0}}}).normalized();
    CHECK_THROWS_AS(validate(make_projector_set({0}, {{"a", {a}}, {"b", {b}}})), MeasurementError);
  }

  TEST_CASE("parity measurement on a Bell pair") {
    auto bb = bell_states(0, 1, 2);
    auto out = parity_measure(bb[BellLabel::PhiPlus], {0});
    REQUIRE(out.size() == 2);
    CHECK(out[0].label == "even");
    CHECK(out[0].probability == doctest::Approx(0.5));
  }

  TEST_CASE("sampling follows the probabilities and is seeded") {
    std::vector<double> p = {0.1, 0.6, 0.3};
    std::map<std::size_t, int> hits;
    BranchSampler s(5);
    for (int i = 0; i < 20000; ++i) ++hits[s.draw(p)];
    CHECK(hits[1] / 20000.0 == doctest::Approx(0.6).epsilon(0.03));
    BranchSampler a(9), b(9);
    for (int i = 0; i < 100; ++i) CHECK(a.draw(p) == b.draw(p));
  }
}
