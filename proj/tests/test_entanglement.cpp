#include <doctest.h>

#include "fermitele/entanglement.hpp"
#include "fermitele/operators.hpp"
#include "support.hpp"

using namespace fermitele;

namespace {

// independent binary entropy for the Wootters check
double h2(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1 - p) * std::log2(1 - p);
}

}  // namespace

TEST_SUITE("entanglement") {
  TEST_CASE("entropies") {
    CHECK(shannon_entropy({0.5, 0.5}) == doctest::Approx(1.0));
    CHECK(shannon_entropy({1.0, 0.0}) == doctest::Approx(0.0));
    auto bb = bell_states(0, 1, 2);
    CHECK(entanglement_entropy(bb[BellLabel::PhiPlus], {0}) == doctest::Approx(1.0));
    const double s = 1.0 / std::sqrt(2.0);
    FockVector ebit = from_creation_strings(4, {{s, {1, 3}}, {s, {0, 2}}});
    CHECK(entanglement_entropy(ebit, {0, 2}) == doctest::Approx(1.0));
  }

  TEST_CASE("EOF of the MME states") {
    MmeState m2 = mme_construct(2);
    EofResult e = eof_ssr(m2.state, m2.alice, SsrPolicy::Parity);
    CHECK(e.value == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(e.lower == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(eof_ssr(m2.state, m2.alice, SsrPolicy::None).value == doctest::Approx(0.0).epsilon(1e-6));
    MmeState m4 = mme_construct(4);
    CHECK(eof_ssr(m4.state, m4.alice, SsrPolicy::Parity).value == doctest::Approx(2.0).epsilon(1e-6));
  }

  TEST_CASE("EOF of pure states is the entanglement entropy") {
    testkit::Gen g(71);
    for (int k = 0; k < 10; ++k) {
      FockVector psi = g.state(4, {0, 1, 2, 3}, k % 2);
      EofResult e = eof_ssr(Ensemble(psi), {0, 1}, SsrPolicy::Parity);
      CHECK(e.value == doctest::Approx(entanglement_entropy(psi, {0, 1})).epsilon(1e-9));
      CHECK(e.exact);
    }
  }

  TEST_CASE("Wootters formula on Werner states") {
    // p |Phi+><Phi+| + (1-p) 1/4: C = max(0, (3p - 1)/2)
    Eigen::Matrix4cd phi = Eigen::Matrix4cd::Zero();
    phi(0, 0) = phi(0, 3) = phi(3, 0) = phi(3, 3) = 0.5;
    for (double p : {0.2, 0.5, 0.8, 1.0}) {
      Eigen::Matrix4cd rho = p * phi + (1 - p) * Eigen::Matrix4cd::Identity() / 4.0;
      const double c = std::max(0.0, (3 * p - 1) / 2);
      CHECK(concurrence(rho) == doctest::Approx(c).epsilon(1e-9));
      CHECK(eof_from_concurrence(c) == doctest::Approx(h2(0.5 + 0.5 * std::sqrt(1 - c * c))).epsilon(1e-9));
    }
  }

  TEST_CASE("PPT test") {
    MmeState m2 = mme_construct(2);
    PptResult r = ppt_check(qubit_equivalent(m2.state, m2.alice, m2.bob), 2, 2);
    CHECK(r.separable);
    CHECK(r.min_eigenvalue >= -1e-12);
    auto bb = bell_states(0, 1, 2);
    PptResult bell = ppt_check(qubit_equivalent(Ensemble(bb[BellLabel::PsiPlus]), {0}, {1}), 2, 2);
    CHECK_FALSE(bell.separable);
    CHECK(bell.min_eigenvalue == doctest::Approx(-0.5));
  }

  TEST_CASE("majorization") {
    CHECK(majorizes({1.0, 0.0}, {0.5, 0.5}));
    CHECK_FALSE(majorizes({0.5, 0.5}, {1.0, 0.0}));
    const double s = 1.0 / std::sqrt(2.0);
    FockVector fbit = from_creation_strings(2, {{s, {1}}, {s, {0}}});
    FockVector ebit = from_creation_strings(4, {{s, {1, 3}}, {s, {0, 2}}});
    auto vf = schmidt_vectors_ssr(fbit, {0}, SsrPolicy::Parity);
    auto ve = schmidt_vectors_ssr(ebit, {0, 2}, SsrPolicy::Parity);
    CHECK(vf.vectors.size() == 2);
    CHECK(ve.vectors.size() == 1);
    CHECK(ve.vectors[0].values.size() == 2);
    CHECK(majorization_compare(vf, ve).verdict == Convertibility::Incomparable);
    CHECK(majorization_compare(ve, ve).verdict == Convertibility::Both);
    // product state on the same sector as the ebit is reachable from it
    FockVector prod = FockVector::vacuum(4);
    auto vp = schmidt_vectors_ssr(prod, {0, 2}, SsrPolicy::Parity);
    CHECK(majorization_compare(ve, vp).verdict == Convertibility::SourceToTarget);
  }

  TEST_CASE("N-SSR MME members") {
    auto members = nssr_mme_members();
    REQUIRE(members.size() == 4);
    for (const auto& m : members) {
      CHECK(m.is_normalized());
      CHECK(is_physical(m, SsrPolicy::ParticleNumber));
    }
  }

  TEST_CASE("d_ssr_max") {
    const std::uint64_t expect[] = {1, 2, 3, 6, 10, 20, 35, 70};
    for (int n = 1; n <= 8; ++n) CHECK(d_ssr_max(n) == expect[n - 1]);
    CHECK(d_ssr_max(64) == 1832624140942590534ULL);
    CHECK_THROWS(d_ssr_max(0));
    CHECK_THROWS(d_ssr_max(65));
  }
}
