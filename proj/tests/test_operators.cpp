#include <doctest.h>

#include "checks.hpp"
#include "fermitele/operators.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace fermitele;

TEST_SUITE("operators") {
  TEST_CASE("Bell states") {
    auto bb = bell_states(0, 1, 2);
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(bb[BellLabel::PhiMinus].amplitude(0b11).real() == doctest::Approx(-s).epsilon(1e-12));
    CHECK(bb[BellLabel::PsiMinus].amplitude(0b01).real() == doctest::Approx(-s).epsilon(1e-12));
    CHECK(bb[BellLabel::PsiPlus].amplitude(0b10).real() == doctest::Approx(s).epsilon(1e-12));
    for (auto a : kBellLabels)
      for (auto b : kBellLabels) CHECK(std::abs(inner(bb[a], bb[b])) == doctest::Approx(a == b ? 1.0 : 0.0));
    CHECK(bell_bits(BellLabel::PsiPlus) == "10");
    CHECK(bell_from_string(to_string(BellLabel::PhiMinus)) == BellLabel::PhiMinus);
  }

  TEST_CASE("every stored correction is recovered uniquely by the dense model") {
    const auto& table = checks::transcribed_table_one();
    for (int o = 0; o < 4; ++o) {
      for (int r = 0; r < 4; ++r) {
        CAPTURE(o);
        CAPTURE(r);
        auto found = checks::oracle_corrections(kBellLabels[o], kBellLabels[r]);
        REQUIRE(found.size() == 1);
        CHECK(found[0] == table[o][r]);
        CHECK(correction_for(kBellLabels[o], kBellLabels[r]) == table[o][r]);
      }
    }
  }

  TEST_CASE("U_pi and U_P match their operator definitions") {
    constexpr int n = 3;
    Eigen::MatrixXcd upi = oracle::Mat::Identity(1 << n, 1 << n) - 2.0 * oracle::number(n, 1);
    Eigen::MatrixXcd up = (oracle::annihilator(n, 2) + oracle::creator(n, 2)) *
                          (oracle::annihilator(n, 1) - oracle::creator(n, 1));
    testkit::Gen g(31);
    for (int k = 0; k < 20; ++k) {
      FockVector psi = g.state(n, {0, 1, 2}, k % 2);
      CHECK((oracle::from_fock(apply(u_pi(1), psi)) - upi * oracle::from_fock(psi)).norm() < 1e-12);
      CHECK((oracle::from_fock(apply(u_parity_switch(1, 2), psi)) - up * oracle::from_fock(psi)).norm() < 1e-12);
    }
    CHECK(is_unitary(u_pi(1)));
    CHECK(is_unitary(u_parity_switch(1, 2)));
    for (auto t : kCorrectionTags) CHECK(is_unitary(correction_unitary(t, 1, 2)));
  }

  TEST_CASE("U_P U_pi applies U_pi first") {
    ModeUnitary both = correction_unitary(CorrectionTag::UPUPi, 0, 1);
    ModeUnitary manual = compose(u_parity_switch(0, 1), embed(u_pi(0), {0, 1}));
    CHECK((both.matrix - manual.matrix).cwiseAbs().maxCoeff() < 1e-14);
  }

  TEST_CASE("U_P is exp(-i H) with H = (pi/2)(U_P - 1)") {
    ModeUnitary up = u_parity_switch(0, 1);
    CHECK((involution_exponential(up.matrix) - up.matrix).cwiseAbs().maxCoeff() < 1e-12);
    LocalOperator h = involution_hamiltonian(up);
    CHECK((exp_minus_i(h.matrix) - up.matrix).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(is_quadratic_generator(h).quadratic);
    CHECK(is_quadratic_generator(involution_hamiltonian(u_pi(0))).quadratic);
  }

  TEST_CASE("a quartic generator is rejected") {
    LocalOperator q = from_op(FermionOp::number(0) * FermionOp::number(1), {0, 1});
    auto fit = is_quadratic_generator(q);
    CHECK_FALSE(fit.quadratic);
    CHECK(fit.residual > 0.1);
  }

  TEST_CASE("non-involutions are rejected") {
    LocalOperator m{{0}, Eigen::MatrixXcd::Identity(2, 2) * 2.0, "2"};
    CHECK_THROWS_AS(involution_hamiltonian(m), OperatorError);
  }

  TEST_CASE("local_matrix of the number operator") {
    Eigen::MatrixXcd m = local_matrix(FermionOp::number(1), {0, 1});
    CHECK(m(2, 2) == cplx(1.0));
    CHECK(m(3, 3) == cplx(1.0));
    CHECK(m(1, 1) == cplx(0.0));
  }
}
