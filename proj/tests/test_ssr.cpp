#include <doctest.h>

#include "fermitele/operators.hpp"
#include "fermitele/ssr.hpp"
#include "support.hpp"

using namespace fermitele;

TEST_SUITE("ssr") {
  TEST_CASE("parity superpositions are unphysical under both rules") {
    FockVector v = from_creation_strings(2, {{0.6, {}}, {0.8, {0}}});
    CHECK(is_physical(v, SsrPolicy::None));
    CHECK_FALSE(is_physical(v, SsrPolicy::Parity));
    CHECK_FALSE(is_physical(v, SsrPolicy::ParticleNumber));
    auto r = is_physical(v, SsrPolicy::Parity);
    CHECK(r.offending.size() == 1);
    CHECK_FALSE(r.diagnostic.empty());
  }

  TEST_CASE("0 and 2 particles: physical under parity only") {
    FockVector v = from_creation_strings(2, {{0.6, {}}, {0.8, {0, 1}}});
    CHECK(is_physical(v, SsrPolicy::Parity));
    CHECK_FALSE(is_physical(v, SsrPolicy::ParticleNumber));
  }

  TEST_CASE("mixtures across sectors are physical") {
    Ensemble e({{0.5, FockVector::basis(2, 0)}, {0.5, FockVector::basis(2, 1)}});
    CHECK(is_physical(e, SsrPolicy::Parity));
    CHECK(is_physical(e, SsrPolicy::ParticleNumber));
  }

  TEST_CASE("Bell states are locally physical under parity") {
    auto bb = bell_states(0, 1, 2);
    for (auto b : kBellLabels) {
      CHECK(is_locally_physical(Ensemble(bb[b]), {0}, SsrPolicy::Parity));
      CHECK(is_locally_physical(Ensemble(bb[b]), {1}, SsrPolicy::Parity));
    }
  }

  TEST_CASE("local coherence between sectors is detected") {
    // (|0> + b_0^dag|0>) ^ |0> on a product: local superposition on mode 0
    FockVector v = from_creation_strings(2, {{1.0, {}}, {1.0, {0}}}).normalized();
    CHECK_FALSE(is_locally_physical(Ensemble(v), {0}, SsrPolicy::Parity));
  }

  TEST_CASE("sector decomposition reconstructs the input") {
    testkit::Gen g(21);
    for (int k = 0; k < 30; ++k) {
      FockVector psi = g.state(4, {0, 1, 2, 3});
      for (auto pol : {SsrPolicy::Parity, SsrPolicy::ParticleNumber}) {
        auto parts = sector_decompose(psi, pol);
        FockVector sum(4);
        double w = 0.0;
        for (const auto& p : parts) {
          sum = sum + p.component * cplx(std::sqrt(p.weight));
          w += p.weight;
          CHECK(is_physical(p.component, pol));
        }
        CHECK(w == doctest::Approx(1.0));
        CHECK((sum - psi).norm() < 1e-12);
      }
    }
  }

  TEST_CASE("sector projection on a subset") {
    FockVector v = from_creation_strings(3, {{0.6, {0}}, {0.8, {1, 2}}});
    Projection p = project_sector(v, {0}, SsrPolicy::Parity, odd());
    CHECK(p.probability == doctest::Approx(0.36));
    CHECK(p.state.is_normalized());
    Projection q = project_sector(v, {1, 2}, SsrPolicy::ParticleNumber, count(2));
    CHECK(q.probability == doctest::Approx(0.64));
  }

  TEST_CASE("sector labels and policy names") {
    CHECK(sector_labels(SsrPolicy::ParticleNumber, 3).size() == 4);
    CHECK(sector_labels(SsrPolicy::Parity, 3).size() == 2);
    CHECK(policy_from_string("number") == SsrPolicy::ParticleNumber);
    CHECK_THROWS_AS(policy_from_string("bogus"), SsrError);
    CHECK(even().str() == "even");
    CHECK(count(3).str() == "3");
    CHECK(sector_of(0b1011, SsrPolicy::Parity, 0b0011) == even());
  }
}
