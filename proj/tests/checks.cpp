#include "checks.hpp"

#include <cmath>
#include <sstream>

#include "fermitele/entanglement.hpp"
#include "fermitele/protocols.hpp"
#include "fermitele/report.hpp"
#include "oracle.hpp"
#include "properties.hpp"
#include "support.hpp"

namespace checks {

using namespace fermitele;
using testkit::grid20;
using testkit::min_fidelity;

namespace {

constexpr double kExact = 1e-12;

std::string show(double x) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << x;
  return os.str();
}

Verdict verdict(bool pass, std::string detail) { return {pass, std::move(detail)}; }

}  // namespace

const TagTable& transcribed_table_one() {
  using C = CorrectionTag;
  static const TagTable t = {{{C::Identity, C::UPi, C::UP, C::UPUPi},
                              {C::UPi, C::Identity, C::UPUPi, C::UP},
                              {C::UPUPi, C::UP, C::UPi, C::Identity},
                              {C::UP, C::UPUPi, C::Identity, C::UPi}}};
  return t;
}

std::vector<CorrectionTag> oracle_corrections(BellLabel outcome, BellLabel resource) {
  // ~A 0, ~A' 1, A 2, B 3, C 4
  constexpr int n = 5;
  const double s = 1.0 / std::sqrt(2.0);
  auto bell_terms = [&](BellLabel b, int x, int y) -> std::vector<oracle::Term> {
    switch (b) {
      case BellLabel::PhiPlus: return {{s, {}}, {s, {x, y}}};
      case BellLabel::PhiMinus: return {{s, {}}, {-s, {x, y}}};
      case BellLabel::PsiPlus: return {{s, {y}}, {s, {x}}};
      default: return {{s, {y}}, {-s, {x}}};
    }
  };
  // local vector of the outcome on (~A, A): bit 0 = ~A, bit 1 = A
  auto local_pure = [&](const std::vector<oracle::Term>& terms, const std::vector<int>& modes) {
    Eigen::SelfAdjointEigenSolver<oracle::Mat> es(oracle::reduced(oracle::state(n, terms), n, modes));
    return oracle::Vec(es.eigenvectors().col(es.eigenvalues().size() - 1));
  };
  oracle::Vec o = local_pure(bell_terms(outcome, 0, 2), {0, 2});
  oracle::Mat proj = oracle::embed(n, {0, 2}, o * o.adjoint());
  const oracle::Mat id = oracle::Mat::Identity(1 << n, 1 << n);
  const oracle::Mat upi = id - 2.0 * oracle::number(n, 3);
  const oracle::Mat up = (oracle::annihilator(n, 4) + oracle::creator(n, 4)) *
                         (oracle::annihilator(n, 3) - oracle::creator(n, 3));
  const std::array<std::pair<CorrectionTag, oracle::Mat>, 4> candidates = {
      {{CorrectionTag::Identity, id}, {CorrectionTag::UPi, upi}, {CorrectionTag::UP, up}, {CorrectionTag::UPUPi, up * upi}}};

  std::vector<CorrectionTag> out;
  for (const auto& [tag, u] : candidates) {
    bool all = true;
    testkit::Gen g(17);
    for (int trial = 0; trial < 6 && all; ++trial) {
      const bool even = trial % 2 == 0;
      auto [a, b] = g.amplitudes();
      std::vector<oracle::Term> in = even ? std::vector<oracle::Term>{{a, {}}, {b, {0, 1}}}
                                          : std::vector<oracle::Term>{{a, {1}}, {b, {0}}};
      // b_~A -> b_B in the creation polynomial
      std::vector<oracle::Term> target = even ? std::vector<oracle::Term>{{a, {}}, {b, {3, 1}}}
                                              : std::vector<oracle::Term>{{a, {1}}, {b, {3}}};
      oracle::Vec psi = oracle::creation_poly(n, in) * oracle::state(n, bell_terms(resource, 2, 3));
      oracle::Vec post = proj * psi;
      const double p = post.squaredNorm();
      if (std::abs(p - 0.25) > kExact) return {};
      oracle::Vec fin = u * post / std::sqrt(p);
      all = oracle::fidelity(oracle::reduced(fin, n, {1, 3}), local_pure(target, {1, 3})) > 1.0 - kExact;
    }
    if (all) out.push_back(tag);
  }
  return out;
}

// 1. single-mode teleportation over resources, parities and a 20-point grid
Verdict criterion_1() {
  auto l = single_mode_layout();
  double worst = 1.0;
  int runs = 0;
  for (auto r : kBellLabels) {
    for (int parity : {0, 1}) {
      for (auto [a, b] : grid20()) {
        Transcript t = teleport_single_mode(testkit::parity_input(parity, l.reg.n(), l.at, l.atp, a, b), r, l);
        if (t.branches.size() != 4) return verdict(false, "branch count " + std::to_string(t.branches.size()));
        for (const auto& br : t.branches) {
          if (!br.fidelity) return verdict(false, "missing fidelity");
          worst = std::min(worst, *br.fidelity);
        }
        ++runs;
      }
    }
  }
  return verdict(1.0 - worst < kExact, std::to_string(runs) + " runs x 4 outcomes, min fidelity deficit " +
                                           show(1.0 - worst));
}

// 2. brute-force Table I
Verdict criterion_2() {
  const auto& table = transcribed_table_one();
  int cells = 0;
  for (int o = 0; o < 4; ++o) {
    for (int r = 0; r < 4; ++r) {
      auto found = oracle_corrections(kBellLabels[o], kBellLabels[r]);
      const auto expect = table[o][r];
      if (found.size() != 1 || found[0] != expect) {
        std::string got;
        for (auto f : found) got += to_string(f) + " ";
        return verdict(false, "outcome " + to_string(kBellLabels[o]) + ", resource " + to_string(kBellLabels[r]) +
                                  ": oracle found {" + got + "} expected " + to_string(expect));
      }
      if (correction_for(kBellLabels[o], kBellLabels[r]) != expect) {
        return verdict(false, "stored table differs at " + to_string(kBellLabels[o]) + "/" + to_string(kBellLabels[r]));
      }
      ++cells;
    }
  }
  return verdict(true, std::to_string(cells) + " cells, each with a unique correction");
}

// 3. exponential form of U_P and quadratic generators
Verdict criterion_3() {
  ModeUnitary up = u_parity_switch(0, 1);
  const double direct = (involution_exponential(up.matrix) - up.matrix).cwiseAbs().maxCoeff();
  LocalOperator hp = involution_hamiltonian(up);
  const double via_h = (exp_minus_i(hp.matrix) - up.matrix).cwiseAbs().maxCoeff();
  LocalOperator hpi = involution_hamiltonian(u_pi(0));
  LocalOperator quartic = from_op(FermionOp::number(0) * FermionOp::number(1), {0, 1}, "n_0 n_1");
  const bool q_pi = is_quadratic_generator(hpi).quadratic;
  const bool q_p = is_quadratic_generator(hp).quadratic;
  const bool q_4 = is_quadratic_generator(quartic).quadratic;
  const bool pass = direct < kExact && via_h < kExact && q_pi && q_p && !q_4;
  return verdict(pass, "max|exp - U_P| = " + show(std::max(direct, via_h)) + ", quadratic H_pi " +
                           (q_pi ? "yes" : "no") + ", H_P " + (q_p ? "yes" : "no") + ", quartic control " +
                           (q_4 ? "yes" : "no"));
}

// 4. two-mode protocols
Verdict criterion_4() {
  auto l = two_mode_layout();
  const int n = l.reg.n();
  double worst = 1.0;
  for (int parity : {0, 1}) {
    for (auto [a, b] : grid20()) {
      FockVector in = testkit::parity_input(parity, n, l.at, l.atp, a, b);
      Transcript t = teleport_two_mode(in, BellLabel::PhiPlus, BellLabel::PsiMinus, l);
      if (t.branches.size() != 16) return verdict(false, "4-bit variant has " + std::to_string(t.branches.size()) + " branches");
      worst = std::min(worst, min_fidelity(t));
      Transcript p = teleport_two_mode_parity_assisted(in, BellLabel::PhiPlus, BellLabel::PhiPlus, l);
      worst = std::min(worst, min_fidelity(p));
      if (std::abs(p.total_probability() - 1.0) > kExact) return verdict(false, "parity-assisted probabilities");
    }
  }
  // projected resource states after the local parity measurements
  const double s = 1.0 / std::sqrt(2.0);
  FockVector even_state = from_creation_strings(n, {{s, {}}, {s, {l.a, l.b, l.ap, l.bp}}});
  FockVector odd_state = from_creation_strings(n, {{s, {l.a, l.b}}, {s, {l.ap, l.bp}}});
  Transcript p = teleport_two_mode_parity_assisted(testkit::parity_input(0, n, l.at, l.atp, 0.6, cplx(0, 0.8)),
                                                   BellLabel::PhiPlus, BellLabel::PhiPlus, l);
  double f_even = 0.0, f_odd = 0.0;
  for (const auto& br : p.branches) {
    for (const auto& [name, e] : br.snapshots) {
      if (name != "resource-after-parity") continue;
      const FockVector& v = e.members.front().second;
      if (br.label.rfind("even", 0) == 0) f_even = std::max(f_even, fidelity(even_state, v));
      if (br.label.rfind("odd", 0) == 0) f_odd = std::max(f_odd, fidelity(odd_state, v));
    }
  }
  auto h = hybrid_layout();
  ResourceRow row = resource_accounting(
      teleport_two_mode_hybrid(testkit::parity_input(1, h.reg.n(), h.at, h.atp, 0.6, 0.8), BellLabel::PhiPlus, h));
  const bool tally = row.fbits == 1 && row.classical_bits == 2 && row.channel_modes == 1;
  const bool pass = 1.0 - worst < kExact && 1.0 - f_even < kExact && 1.0 - f_odd < kExact && tally;
  return verdict(pass, "min fidelity deficit " + show(1.0 - worst) + ", projected states " + show(1.0 - f_even) + "/" +
                           show(1.0 - f_odd) + ", hybrid tally (" + std::to_string(row.fbits) + ", " +
                           std::to_string(row.classical_bits) + ", " + std::to_string(row.channel_modes) + ")");
}

// 5. success probabilities under particle-number superselection
Verdict criterion_5() {
  auto sl = single_mode_layout();
  auto tl = two_mode_layout();
  auto dl = dual_rail_layout();
  struct Case {
    const char* name;
    double expect;
    double lo = 2.0, hi = -1.0;
  };
  std::array<Case, 4> cases = {{{"single", 0.5}, {"naive two-mode", 0.25}, {"Psi_R", 1.0}, {"fbits + projection", 0.5}}};
  double fid_worst = 1.0;
  for (auto [a, b] : grid20()) {
    std::array<Transcript, 4> t = {
        nssr_teleport_single(odd_input(sl.reg.n(), sl.at, sl.atp, a, b), BellLabel::PsiPlus, sl),
        nssr_teleport_two_naive(odd_input(tl.reg.n(), tl.at, tl.atp, a, b), BellLabel::PsiPlus, BellLabel::PsiPlus, tl),
        nssr_teleport_psi_r(odd_input(dl.reg.n(), dl.at, dl.atp, a, b), dl),
        nssr_fbits_with_projection(odd_input(dl.reg.n(), dl.at, dl.atp, a, b), dl)};
    for (int i = 0; i < 4; ++i) {
      cases[i].lo = std::min(cases[i].lo, t[i].success_probability);
      cases[i].hi = std::max(cases[i].hi, t[i].success_probability);
      for (const auto& br : t[i].branches) {
        if (br.success) fid_worst = std::min(fid_worst, br.fidelity.value_or(0.0));
      }
    }
  }
  bool pass = 1.0 - fid_worst < kExact;
  std::string detail;
  for (const auto& c : cases) {
    pass = pass && std::abs(c.lo - c.expect) < kExact && std::abs(c.hi - c.expect) < kExact;
    detail += std::string(c.name) + " [" + std::to_string(c.lo) + ", " + std::to_string(c.hi) + "]  ";
  }
  return verdict(pass, detail);
}

// 6. maximally mixed entangled states
Verdict criterion_6() {
  MmeState m = mme_construct(2);
  EofResult e = eof_ssr(m.state, m.alice, SsrPolicy::Parity);
  PptResult ppt = ppt_check(qubit_equivalent(m.state, m.alice, m.bob), 2, 2);
  auto sl = swap_layout();
  double worst = 1.0;
  for (int parity : {0, 1}) {
    for (auto [a, b] : grid20()) {
      Transcript t = mme_subsystem_swap(testkit::parity_input(parity, sl.reg.n(), sl.at, sl.atp, a, b),
                                        mme2_state(sl.a, sl.b, sl.reg.n()), sl);
      worst = std::min(worst, min_fidelity(t));
      if (std::abs(t.success_probability - 1.0) > kExact) worst = 0.0;
    }
  }
  auto fl = four_mode_layout();
  Transcript c = mme_fbit_to_ebit(fl);
  const double s = 1.0 / std::sqrt(2.0);
  // |0101> + |1010> read in the order A, B, A', B'
  FockVector ebit = from_creation_strings(fl.reg.n(), {{s, {fl.b, fl.bp}}, {s, {fl.a, fl.ap}}});
  double s_dev = 0.0, f_even = 0.0;
  int branches = 0;
  for (const auto& br : c.branches) {
    if (br.probability <= 1e-14) continue;
    ++branches;
    s_dev = std::max(s_dev, std::abs(br.metrics.at("entropy") - 1.0));
    if (br.label == "even/even") {
      f_even = fidelity(ebit, partial_trace(br.final_state, {fl.a, fl.b, fl.ap, fl.bp}));
    }
  }
  const bool pass = std::abs(e.value - 1.0) < 1e-6 && ppt.min_eigenvalue >= -1e-12 && ppt.separable &&
                    1.0 - worst < kExact && branches == 4 && s_dev < 1e-9 && 1.0 - f_even < kExact;
  return verdict(pass, "EOF " + std::to_string(e.value) + ", PPT min eigenvalue " + show(ppt.min_eigenvalue) +
                           ", swap deficit " + show(1.0 - worst) + ", " + std::to_string(branches) +
                           " conversion branches, entropy deviation " + show(s_dev) + ", even/even fidelity " +
                           std::to_string(f_even));
}

// 7. majorization verdicts
Verdict criterion_7() {
  const double s = 1.0 / std::sqrt(2.0);
  FockVector fbit = from_creation_strings(2, {{s, {1}}, {s, {0}}});
  FockVector ebit = from_creation_strings(4, {{s, {1, 3}}, {s, {0, 2}}});
  auto vf = schmidt_vectors_ssr(fbit, {0}, SsrPolicy::Parity);
  auto ve = schmidt_vectors_ssr(ebit, {0, 2}, SsrPolicy::Parity);
  auto cross = majorization_compare(vf, ve).verdict;
  auto same = majorization_compare(vf, vf).verdict;
  const bool pass = cross == Convertibility::Incomparable && same == Convertibility::Both;
  return verdict(pass, "fbit vs ebit: " + to_string(cross) + ", fbit vs fbit: " + to_string(same));
}

// 8. maximal dimension under particle-number superselection
Verdict criterion_8() {
  const std::array<std::uint64_t, 8> expect = {1, 2, 3, 6, 10, 20, 35, 70};
  for (int n = 1; n <= 8; ++n) {
    if (d_ssr_max(n) != expect[n - 1]) return verdict(false, "d_ssr_max(" + std::to_string(n) + ") = " + std::to_string(d_ssr_max(n)));
  }
  // n - log2 C(n, n/2) = (1/2) log2(pi n / 2) + o(1)
  double worst = 0.0;
  for (int n = 2; n <= 64; ++n) {
    const double gap = n - std::log2(static_cast<double>(d_ssr_max(n)));
    const double ref = 0.5 * std::log2(std::acos(-1.0) * n / 2.0);
    worst = std::max(worst, std::abs(gap - ref));
    if (gap < 0.0 || gap > 0.5 * std::log2(static_cast<double>(n)) + 1.0) {
      return verdict(false, "gap " + std::to_string(gap) + " at n = " + std::to_string(n));
    }
  }
  return verdict(worst < 0.5, "values 1..8 match, |gap - log2(pi n/2)/2| <= " + std::to_string(worst) + " for n <= 64");
}

// 9. qutrit teleportation
Verdict criterion_9() {
  auto l = qutrit_layout();
  std::vector<std::pair<std::string, Ensemble>> resources;
  Ensemble mix;
  for (auto r : kQutritResources) {
    resources.emplace_back(to_string(r), Ensemble(qutrit_resource(r, l)));
    mix.members.emplace_back(0.25, qutrit_resource(r, l));
  }
  resources.emplace_back("equal mixture", mix);
  testkit::Gen g(99);
  double worst = 1.0;
  int runs = 0;
  for (int particles : {1, 2}) {
    auto basis = qutrit_input_basis(particles, l);
    for (int k = 0; k < 10; ++k) {
      FockVector in(l.reg.n());
      for (const auto& b : basis) in = in + b * g.complex();
      in = in.pruned().normalized();
      for (const auto& [name, res] : resources) {
        Transcript t = nssr_qutrit_teleport(in, res, l);
        worst = std::min({worst, min_fidelity(t), t.success_probability});
        ++runs;
      }
    }
  }
  return verdict(1.0 - worst < kExact, std::to_string(runs) + " runs, min fidelity deficit " + show(1.0 - worst));
}

// 10. property suites
Verdict criterion_10() {
  bool pass = true;
  std::string detail;
  for (const auto& o : props::run_all()) {
    pass = pass && o.ok() && o.cases >= 200;
    detail += o.name + " " + std::to_string(o.cases - o.failures) + "/" + std::to_string(o.cases);
    if (!o.ok()) detail += " (" + o.first_failure + ")";
    detail += "; ";
  }
  return verdict(pass, detail);
}

// 11. live regeneration of the resource tables
Verdict criterion_11() {
  int cells = 0, bad = 0;
  std::string detail;
  for (const auto& t : emit_tables()) {
    for (const auto& c : t.cells) {
      ++cells;
      if (!c.match) {
        ++bad;
        detail += " [" + c.row + " / " + c.column + ": computed " + c.computed + ", expected " + c.expected + "]";
      }
    }
  }
  return verdict(bad == 0, std::to_string(cells) + " cells, " + std::to_string(bad) + " mismatch(es)" + detail);
}

const std::vector<Criterion>& all() {
  static const std::vector<Criterion> list = {
      {1, "single-mode teleportation, all resources and outcomes", 1.0, criterion_1},
      {2, "correction table recovered by brute force", 1.0, criterion_2},
      {3, "U_P as an exponential of a quadratic generator", 1.0, criterion_3},
      {4, "two-mode protocols", 5.0, criterion_4},
      {5, "success probabilities under particle-number superselection", 5.0, criterion_5},
      {6, "maximally mixed entangled states", 10.0, criterion_6},
      {7, "majorization verdicts", 1.0, criterion_7},
      {8, "maximal superselected dimension", 1.0, criterion_8},
      {9, "qutrit teleportation", 30.0, criterion_9},
      {10, "property suites", 60.0, criterion_10},
      {11, "tables regenerated from live computation", 0.0, criterion_11},
  };
  return list;
}

}  // namespace checks
