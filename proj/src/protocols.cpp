#include "fermitele/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fermitele/entanglement.hpp"
#include "fermitele/logical.hpp"

namespace fermitele {

std::string to_string(Party p) {
  switch (p) {
    case Party::Alice: return "Alice";
    case Party::Bob: return "Bob";
    case Party::Channel: return "channel";
  }
  return "?";
}

int Register::index(const std::string& label) const {
  for (std::size_t i = 0; i < modes.size(); ++i) {
    if (modes[i].label == label) return static_cast<int>(i);
  }
  throw FockError("no mode labelled '" + label + "'");
}

std::vector<std::string> Register::labels() const {
  std::vector<std::string> out;
  for (const auto& m : modes) out.push_back(m.label);
  return out;
}

std::vector<int> Register::party_modes(Party p) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    if (modes[i].party == p) out.push_back(static_cast<int>(i));
  }
  return out;
}

void Register::require_local(const std::vector<int>& support, Party p, const std::string& step) const {
  for (int m : support) {
    if (m < 0 || m >= n()) throw FockError("mode index out of range in " + step);
    if (modes[m].party != p) {
      throw LocalityError(step + " must be performed by " + to_string(p) + ", but mode " + modes[m].label +
                          " is held by " + to_string(modes[m].party) +
                          "; the operation would act jointly on both laboratories");
    }
  }
}

double Transcript::total_probability() const {
  double s = 0.0;
  for (const auto& b : branches) s += b.probability;
  return s;
}

void finalize(Transcript& t) {
  t.success_probability = 0.0;
  t.average_fidelity = 0.0;
  for (const auto& b : t.branches) {
    if (b.success) t.success_probability += b.probability;
    if (b.fidelity) t.average_fidelity += b.probability * *b.fidelity;
  }
}

int bits_for(std::size_t outcomes) {
  int b = 0;
  while ((std::size_t{1} << b) < outcomes) ++b;
  return b;
}

std::string bit_string(std::size_t index, int width) {
  std::string s(static_cast<std::size_t>(width), '0');
  for (int i = 0; i < width; ++i) {
    if ((index >> (width - 1 - i)) & 1) s[static_cast<std::size_t>(i)] = '1';
  }
  return s;
}

// ---------------------------------------------------------------- layouts

std::vector<int> SingleModeLayout::input_modes() const {
  std::vector<int> out{at, atp};
  out.insert(out.end(), spectators.begin(), spectators.end());
  std::sort(out.begin(), out.end());
  return out;
}

SingleModeLayout single_mode_layout(int n_spectators) {
  if (n_spectators < 0) throw FockError("negative spectator count");
  SingleModeLayout l;
  l.reg.modes.push_back({"~A", Party::Alice});
  l.reg.modes.push_back({"~A'", Party::Alice});
  for (int s = 0; s < n_spectators; ++s) l.reg.modes.push_back({"S" + std::to_string(s + 1), Party::Alice});
  l.reg.modes.push_back({"A", Party::Alice});
  l.reg.modes.push_back({"B", Party::Bob});
  l.reg.modes.push_back({"C", Party::Bob});
  if (l.reg.n() > mode_cap()) throw FockError("register exceeds the mode cap");
  l.at = 0;
  l.atp = 1;
  for (int s = 0; s < n_spectators; ++s) l.spectators.push_back(2 + s);
  l.a = 2 + n_spectators;
  l.b = l.a + 1;
  l.c = l.a + 2;
  return l;
}

TwoModeLayout two_mode_layout() {
  TwoModeLayout l;
  l.reg.modes = {{"~A", Party::Alice}, {"~A'", Party::Alice}, {"A", Party::Alice}, {"B", Party::Bob},
                 {"A'", Party::Alice}, {"B'", Party::Bob},    {"C", Party::Bob}};
  l.at = 0, l.atp = 1, l.a = 2, l.b = 3, l.ap = 4, l.bp = 5, l.c = 6;
  return l;
}

HybridLayout hybrid_layout() {
  HybridLayout l;
  l.reg.modes = {{"~A", Party::Alice}, {"~A'", Party::Alice}, {"A", Party::Alice},
                 {"B", Party::Bob},    {"B'", Party::Bob},    {"C", Party::Bob}};
  l.at = 0, l.atp = 1, l.a = 2, l.b = 3, l.bp = 4, l.c = 5;
  return l;
}

DualRailLayout dual_rail_layout() {
  DualRailLayout l;
  l.reg.modes = {{"~A", Party::Alice}, {"~A'", Party::Alice}, {"A", Party::Alice},
                 {"B", Party::Bob},    {"A'", Party::Alice},  {"B'", Party::Bob}};
  l.at = 0, l.atp = 1, l.a = 2, l.b = 3, l.ap = 4, l.bp = 5;
  return l;
}

SwapLayout swap_layout(bool atp_with_bob) {
  SwapLayout l;
  l.reg.modes = {{"~A", Party::Alice},
                 {"~A'", atp_with_bob ? Party::Bob : Party::Alice},
                 {"A", Party::Alice},
                 {"B", Party::Bob},
                 {"C", Party::Bob}};
  l.at = 0, l.atp = 1, l.a = 2, l.b = 3, l.c = 4;
  return l;
}

FourModeLayout four_mode_layout() {
  FourModeLayout l;
  l.reg.modes = {{"A", Party::Alice}, {"B", Party::Bob}, {"A'", Party::Alice}, {"B'", Party::Bob}};
  l.a = 0, l.b = 1, l.ap = 2, l.bp = 3;
  return l;
}

QutritLayout qutrit_layout() {
  QutritLayout l;
  l.reg.modes = {{"~A", Party::Alice}, {"~A'", Party::Alice}, {"~A''", Party::Alice}, {"A", Party::Alice},
                 {"A'", Party::Alice}, {"A''", Party::Alice}, {"B", Party::Bob},      {"B'", Party::Bob},
                 {"B''", Party::Bob},  {"C", Party::Bob}};
  if (l.reg.n() > mode_cap()) throw FockError("register exceeds the mode cap");
  l.in = {0, 1, 2};
  l.a = {3, 4, 5};
  l.b = {6, 7, 8};
  l.c = 9;
  return l;
}

// ---------------------------------------------------------------- inputs

FockVector even_input(int n_modes, int x, int y, cplx alpha, cplx beta) {
  const Bits sup = bit(x) | bit(y);
  return from_creation_strings(n_modes, {{alpha, {}}, {beta, {x, y}}}).with_support(sup).normalized();
}

FockVector odd_input(int n_modes, int x, int y, cplx alpha, cplx beta) {
  const Bits sup = bit(x) | bit(y);
  return from_creation_strings(n_modes, {{alpha, {y}}, {beta, {x}}}).with_support(sup).normalized();
}

// ---------------------------------------------------------------- helpers

namespace {

void require_physical(const FockVector& s, SsrPolicy policy, const std::string& what) {
  auto rep = is_physical(s, policy);
  if (!rep.ok) throw PhysicalityError(what + " violates " + to_string(policy) + ": " + rep.diagnostic);
}

void require_physical(const Ensemble& s, SsrPolicy policy, const std::string& what) {
  auto rep = is_physical(s, policy);
  if (!rep.ok) throw PhysicalityError(what + " violates " + to_string(policy) + ": " + rep.diagnostic);
}

FockVector place_input(const FockVector& input, const std::vector<int>& modes, int n) {
  if (input.n_modes() != n) throw FockError("input register size does not match the layout");
  const Bits m = mask_of(modes);
  for (const auto& [occ, a] : input.terms()) {
    (void)a;
    if (occ & ~m) throw FockError("input occupies modes reserved for the resource or the auxiliary mode");
  }
  if (!input.is_normalized(1e-9)) throw FockError("input is not normalized");
  return input.with_support(m);
}

int parity_of(const FockVector& s) {
  auto comps = sector_decompose(s, SsrPolicy::Parity);
  if (comps.size() != 1) throw PhysicalityError("state has no definite parity");
  return comps[0].label.value;
}

std::vector<int> sorted(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  return v;
}

FockVector occupied(int n, int mode) { return FockVector::basis(n, bit(mode)).with_support(bit(mode)); }

/// Fills fidelity, output and auxiliary-mode data of a branch.
BranchRecord evaluate(const Transcript& t, BranchRecord b, const Ensemble& final_state) {
  b.final_state = final_state;
  if (b.probability <= 1e-14 || final_state.members.empty()) {
    b.probability = std::max(b.probability, 0.0);
    b.success = false;
    return b;
  }
  DensityView out = partial_trace(final_state, t.output_modes);
  if (t.target) {
    b.fidelity = fidelity(*t.target, out);
    b.success = *b.fidelity >= 1.0 - kSuccessTolerance;
  }
  if (out.purity() > 1.0 - 1e-9) b.output = extract_pure(out, t.reg.n());
  if (t.aux_mode >= 0) {
    DensityView c = partial_trace(final_state, {t.aux_mode});
    b.aux_occupation = c.matrix(1, 1).real();
    b.aux_purity = c.purity();
  }
  return b;
}

struct StepResult {
  BellLabel outcome;
  double probability;
  FockVector pre;
  CorrectionTag tag;
  FockVector post;
};

/// Bell measurement on (at, a) followed by the stored correction on (b, c).
std::vector<StepResult> teleport_step(const FockVector& state, BellLabel resource, int at, int a, int b, int c) {
  std::vector<StepResult> out;
  auto branches = bell_measure(state, at, a);
  for (std::size_t i = 0; i < branches.size(); ++i) {
    BellLabel o = kBellLabels[i];
    CorrectionTag tag = correction_for(o, resource);
    StepResult r{o, branches[i].probability, branches[i].post_state, tag, FockVector(state.n_modes())};
    if (branches[i].possible()) r.post = apply(correction_unitary(tag, b, c), branches[i].post_state);
    out.push_back(std::move(r));
  }
  return out;
}

std::string describe(const FockVector& s, const Register& reg) { return format_state(s, reg.labels()); }

std::string describe(const Ensemble& e, const Register& reg) {
  if (e.is_pure()) return describe(e.members[0].second, reg);
  std::ostringstream os;
  for (std::size_t i = 0; i < e.members.size(); ++i) {
    if (i) os << " + ";
    os << e.members[i].first << " * [" << describe(e.members[i].second, reg) << "]";
  }
  return os.str();
}

Ensemble wedge(const Ensemble& e, const FockVector& v) {
  Ensemble out;
  for (const auto& [w, m] : e.members) out.members.emplace_back(w, wedge(m, v));
  return out;
}

Ensemble wedge(const FockVector& v, const Ensemble& e) {
  Ensemble out;
  for (const auto& [w, m] : e.members) out.members.emplace_back(w, wedge(v, m));
  return out;
}

}  // namespace

// ---------------------------------------------------------------- P-SSR

Transcript teleport_single_mode(const FockVector& input, BellLabel resource, const SingleModeLayout& l,
                                bool aux_occupied) {
  const int n = l.reg.n();
  FockVector in = place_input(input, l.input_modes(), n);
  require_physical(in, SsrPolicy::Parity, "input");
  l.reg.require_local({l.at, l.a}, Party::Alice, "Bell measurement");
  l.reg.require_local({l.b, l.c}, Party::Bob, "correction");

  FockVector joint = wedge(in, bell_states(l.a, l.b, n)[resource]);
  if (aux_occupied) joint = wedge(joint, occupied(n, l.c));
  require_physical(joint, SsrPolicy::Parity, "joint state");

  Transcript t;
  t.protocol = "teleport-single";
  t.policy = SsrPolicy::Parity;
  t.resource = to_string(resource) + "(A,B)";
  t.input = describe(in, l.reg);
  t.reg = l.reg;
  t.aux_mode = l.c;
  t.target = relabel(in, {{l.at, l.b}});
  std::vector<int> outm{l.b, l.atp};
  outm.insert(outm.end(), l.spectators.begin(), l.spectators.end());
  t.output_modes = sorted(outm);

  for (auto& r : teleport_step(joint, resource, l.at, l.a, l.b, l.c)) {
    BranchRecord b;
    b.label = to_string(r.outcome);
    b.bits = bell_bits(r.outcome);
    b.correction = to_string(r.tag);
    b.probability = r.probability;
    b.snapshots = {{"joint", Ensemble(joint)}, {"pre-correction", Ensemble(r.pre)}};
    if (r.probability > 1e-14) require_physical(r.post, SsrPolicy::Parity, "corrected state");
    t.branches.push_back(evaluate(t, std::move(b), r.probability > 1e-14 ? Ensemble(r.post) : Ensemble()));
  }
  t.tally = {1, 2, 0, true, "1 fbit", ""};
  finalize(t);
  return t;
}

std::vector<Transcript> teleport_single_mode(const Ensemble& input, BellLabel resource,
                                             const SingleModeLayout& layout) {
  std::vector<Transcript> out;
  for (const auto& [w, m] : input.members) {
    Transcript t = teleport_single_mode(m, resource, layout);
    t.notes.push_back("ensemble member with weight " + std::to_string(w));
    out.push_back(std::move(t));
  }
  return out;
}

bool entanglement_swap_check(const Transcript& t) {
  if (!t.target) return false;
  for (const auto& b : t.branches) {
    if (b.probability <= 1e-14) continue;
    if (!b.fidelity || *b.fidelity < 1.0 - kSuccessTolerance) return false;
  }
  return !t.branches.empty();
}

bool entanglement_swap_check(const std::vector<Transcript>& runs) {
  return !runs.empty() &&
         std::all_of(runs.begin(), runs.end(), [](const Transcript& t) { return entanglement_swap_check(t); });
}

Transcript measure_and_prepare_baseline(const FockVector& input, const SingleModeLayout& l) {
  const int n = l.reg.n();
  FockVector in = place_input(input, l.input_modes(), n);
  require_physical(in, SsrPolicy::Parity, "input");
  l.reg.require_local({l.at}, Party::Alice, "occupation measurement");
  l.reg.require_local({l.b, l.c}, Party::Bob, "preparation");
  // Bob keeps a spare particle in C and moves it into B when asked.
  FockVector joint = wedge(in, occupied(n, l.c));

  Transcript t;
  t.protocol = "measure-and-prepare";
  t.policy = SsrPolicy::Parity;
  t.resource = "none";
  t.input = describe(in, l.reg);
  t.reg = l.reg;
  t.aux_mode = l.c;
  t.target = relabel(in, {{l.at, l.b}});
  std::vector<int> outm{l.b, l.atp};
  outm.insert(outm.end(), l.spectators.begin(), l.spectators.end());
  t.output_modes = sorted(outm);

  auto branches = number_measure(joint, {l.at});
  for (std::size_t i = 0; i < branches.size(); ++i) {
    BranchRecord b;
    b.label = "n=" + branches[i].label;
    b.bits = bit_string(i, 1);
    b.correction = i == 1 ? "SWAP(B,C)" : "1";
    b.probability = branches[i].probability;
    Ensemble fin;
    if (branches[i].possible()) {
      FockVector post = i == 1 ? apply(mode_swap(l.b, l.c), branches[i].post_state) : branches[i].post_state;
      fin = Ensemble(post);
    }
    t.branches.push_back(evaluate(t, std::move(b), fin));
  }
  t.tally = {0, 1, 0, true, "none", "classical baseline"};
  finalize(t);
  return t;
}

Transcript teleport_two_mode(const FockVector& input, BellLabel r1, BellLabel r2, const TwoModeLayout& l,
                             bool aux_occupied) {
  const int n = l.reg.n();
  FockVector in = place_input(input, {l.at, l.atp}, n);
  require_physical(in, SsrPolicy::Parity, "input");
  l.reg.require_local({l.at, l.a, l.atp, l.ap}, Party::Alice, "Bell measurements");
  l.reg.require_local({l.b, l.bp, l.c}, Party::Bob, "corrections");

  FockVector joint = wedge(wedge(in, bell_states(l.a, l.b, n)[r1]), bell_states(l.ap, l.bp, n)[r2]);
  if (aux_occupied) joint = wedge(joint, occupied(n, l.c));

  Transcript t;
  t.protocol = "teleport-two";
  t.policy = SsrPolicy::Parity;
  t.resource = to_string(r1) + "(A,B) ^ " + to_string(r2) + "(A',B')";
  t.input = describe(in, l.reg);
  t.reg = l.reg;
  t.aux_mode = l.c;
  t.target = relabel(in, {{l.at, l.b}, {l.atp, l.bp}});
  t.output_modes = {l.b, l.bp};

  for (auto& s1 : teleport_step(joint, r1, l.at, l.a, l.b, l.c)) {
    if (s1.probability <= 1e-14) continue;
    require_physical(s1.post, SsrPolicy::Parity, "state after the first correction");
    for (auto& s2 : teleport_step(s1.post, r2, l.atp, l.ap, l.bp, l.c)) {
      BranchRecord b;
      b.label = to_string(s1.outcome) + "|" + to_string(s2.outcome);
      b.bits = bell_bits(s1.outcome) + bell_bits(s2.outcome);
      b.correction = to_string(s1.tag) + " ; " + to_string(s2.tag);
      b.probability = s1.probability * s2.probability;
      b.snapshots = {{"joint", Ensemble(joint)},
                     {"after-first", Ensemble(s1.post)},
                     {"pre-second-correction", Ensemble(s2.pre)}};
      Ensemble fin;
      if (s2.probability > 1e-14) {
        require_physical(s2.post, SsrPolicy::Parity, "corrected state");
        fin = Ensemble(s2.post);
      }
      t.branches.push_back(evaluate(t, std::move(b), fin));
    }
  }
  t.tally = {2, 4, 0, true, "2 fbits", "reducible to 2 bits with the parity-assisted variant"};
  finalize(t);
  return t;
}

namespace {

std::vector<FockVector> parity_input_basis(int parity, int at, int atp, int n) {
  const Bits sup = bit(at) | bit(atp);
  if (parity == 0) {
    return {FockVector::vacuum(n, sup), from_creation_strings(n, {{1.0, {at, atp}}}).with_support(sup)};
  }
  return {occupied(n, atp).with_support(sup), occupied(n, at).with_support(sup)};
}

}  // namespace

Transcript teleport_two_mode_parity_assisted(const FockVector& input, BellLabel r1, BellLabel r2,
                                             const TwoModeLayout& l) {
  const int n = l.reg.n();
  FockVector in = place_input(input, {l.at, l.atp}, n);
  require_physical(in, SsrPolicy::Parity, "input");
  const int p = parity_of(in);
  l.reg.require_local({l.at, l.atp, l.a, l.ap}, Party::Alice, "parity and Bell measurements");
  l.reg.require_local({l.b, l.bp, l.c}, Party::Bob, "parity measurement and correction");

  FockVector res = wedge(bell_states(l.a, l.b, n)[r1], bell_states(l.ap, l.bp, n)[r2]);

  Transcript t;
  t.protocol = "teleport-two-parity";
  t.policy = SsrPolicy::Parity;
  t.resource = to_string(r1) + "(A,B) ^ " + to_string(r2) + "(A',B')";
  t.input = describe(in, l.reg);
  t.reg = l.reg;
  t.aux_mode = l.c;
  t.target = relabel(in, {{l.at, l.b}, {l.atp, l.bp}});
  t.output_modes = {l.b, l.bp};
  t.notes.push_back("the parity of the input is known to both parties");

  LogicalStep step;
  step.in_modes = {l.at, l.atp};
  step.alice_modes = {l.a, l.ap};
  step.bob_modes = {l.b, l.bp};
  step.aux = l.c;
  step.in_basis = parity_input_basis(p, l.at, l.atp, n);
  step.out_map = {{l.at, l.b}, {l.atp, l.bp}};
  step.policy = SsrPolicy::Parity;

  for (const auto& qa : parity_measure(res, {l.a, l.ap})) {
    if (!qa.possible()) continue;
    auto qb = parity_measure(qa.post_state, {l.b, l.bp});
    std::string bob_label;
    for (const auto& x : qb) {
      if (x.probability > 1.0 - 1e-12) bob_label = x.label;
    }
    const FockVector& rq = qa.post_state;
    FockVector joint = wedge(in, rq);
    require_physical(joint, SsrPolicy::Parity, "joint state");
    auto branches = logical_teleport(joint, rq, step);
    for (std::size_t i = 0; i < branches.size(); ++i) {
      auto& lb = branches[i];
      BranchRecord b;
      b.label = qa.label + "/" + bob_label + "/" + lb.label;
      b.bits = bit_string(i, bits_for(branches.size()));
      b.correction = lb.correction.name;
      b.probability = qa.probability * lb.probability;
      b.snapshots = {{"resource-after-parity", Ensemble(rq)}, {"pre-correction", Ensemble(lb.pre)}};
      Ensemble fin;
      if (lb.probability > 1e-14) {
        require_physical(lb.post, SsrPolicy::Parity, "corrected state");
        fin = Ensemble(lb.post);
      }
      t.branches.push_back(evaluate(t, std::move(b), fin));
    }
  }
  t.tally = {2, 2, 0, false, "2 fbits", "local parity measurements on the resource"};
  finalize(t);
  return t;
}

Transcript teleport_two_mode_hybrid(const FockVector& input, BellLabel resource, const HybridLayout& l) {
  const int n = l.reg.n();
  FockVector in = place_input(input, {l.at, l.atp}, n);
  require_physical(in, SsrPolicy::Parity, "input");
  l.reg.require_local({l.at, l.a}, Party::Alice, "Bell measurement");
  l.reg.require_local({l.b, l.c}, Party::Bob, "correction");
  l.reg.require_local({l.atp}, Party::Alice, "channel input");
  l.reg.require_local({l.bp}, Party::Bob, "channel output");

  FockVector joint = wedge(in, bell_states(l.a, l.b, n)[resource]);

  Transcript t;
  t.protocol = "teleport-hybrid";
  t.policy = SsrPolicy::Parity;
  t.resource = to_string(resource) + "(A,B) + channel ~A'->B'";
  t.input = describe(in, l.reg);
  t.reg = l.reg;
  t.aux_mode = l.c;
  t.target = relabel(in, {{l.at, l.b}, {l.atp, l.bp}});
  t.output_modes = {l.b, l.bp};

  for (auto& r : teleport_step(joint, resource, l.at, l.a, l.b, l.c)) {
    BranchRecord b;
    b.label = to_string(r.outcome);
    b.bits = bell_bits(r.outcome);
    b.correction = to_string(r.tag) + " ; channel(~A'->B')";
    b.probability = r.probability;
    Ensemble fin;
    if (r.probability > 1e-14) {
      b.snapshots = {{"joint", Ensemble(joint)}, {"after-correction", Ensemble(r.post)}};
      fin = Ensemble(relabel(r.post, {{l.atp, l.bp}}));
    }
    t.branches.push_back(evaluate(t, std::move(b), fin));
  }
  t.tally = {1, 2, 1, true, "1 fbit + 1 channel mode", ""};
  finalize(t);
  return t;
}

// ---------------------------------------------------------------- N-SSR

namespace {

void require_single_particle(const FockVector& in) {
  require_physical(in, SsrPolicy::ParticleNumber, "input");
  for (const auto& [occ, a] : in.terms()) {
    (void)a;
    if (popcount(occ) != 1) {
      throw PhysicalityError("input must hold exactly one particle; even-parity inputs cannot be teleported "
                             "under particle-number superselection");
    }
  }
}

void require_odd_resource(BellLabel r) {
  if (is_even(r)) throw PhysicalityError(to_string(r) + " superposes particle numbers and is not allowed");
}

struct NssrStep {
  std::string label;
  std::size_t index;
  double probability;
  FockVector pre;
  std::string correction;
  FockVector post;
};

std::vector<NssrStep> nssr_step(const FockVector& state, BellLabel resource, int at, int a, int b) {
  ProjectorSet set = number_resolved_bell_projectors(at, a, state.n_modes());
  auto branches = measure(state, set);
  std::vector<NssrStep> out;
  for (std::size_t i = 0; i < branches.size(); ++i) {
    NssrStep s{branches[i].label, i, branches[i].probability, branches[i].post_state, "none",
               branches[i].post_state};
    if (i >= 2 && branches[i].possible()) {
      BellLabel o = bell_from_string(branches[i].label);
      CorrectionTag tag = correction_for(o, resource);
      s.correction = to_string(tag);
      if (tag == CorrectionTag::UPi) s.post = apply(u_pi(b), s.pre);
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

Transcript nssr_teleport_single(const FockVector& input, BellLabel resource, const SingleModeLayout& l) {
  const int n = l.reg.n();
  FockVector in = place_input(input, l.input_modes(), n);
  require_single_particle(in);
  require_odd_resource(resource);
  l.reg.require_local({l.at, l.a}, Party::Alice, "Bell measurement");
  l.reg.require_local({l.b}, Party::Bob, "correction");

  FockVector joint = wedge(in, bell_states(l.a, l.b, n)[resource]);
  require_physical(joint, SsrPolicy::ParticleNumber, "joint state");

  Transcript t;
  t.protocol = "nssr-single";
  t.policy = SsrPolicy::ParticleNumber;
  t.resource = to_string(resource) + "(A,B)";
  t.input = describe(in, l.reg);
  t.reg = l.reg;
  t.target = relabel(in, {{l.at, l.b}});
  std::vector<int> outm{l.b, l.atp};
  outm.insert(outm.end(), l.spectators.begin(), l.spectators.end());
  t.output_modes = sorted(outm);

  for (auto& s : nssr_step(joint, resource, l.at, l.a, l.b)) {
    BranchRecord b;
    b.label = s.label;
    b.bits = bit_string(s.index, 2);
    b.correction = s.correction;
    b.probability = s.probability;
    Ensemble fin;
    if (s.probability > 1e-14) {
      b.snapshots = {{"joint", Ensemble(joint)}, {"pre-correction", Ensemble(s.pre)}};
      require_physical(s.post, SsrPolicy::ParticleNumber, "post-measurement state");
      fin = Ensemble(s.post);
    }
    t.branches.push_back(evaluate(t, std::move(b), fin));
  }
  t.tally = {1, 2, 0, true, "1 fbit", ""};
  finalize(t);
  return t;
}

Transcript nssr_teleport_two_naive(const FockVector& input, BellLabel r1, BellLabel r2, const TwoModeLayout& l) {
  const int n = l.reg.n();
  FockVector in = place_input(input, {l.at, l.atp}, n);
  require_single_particle(in);
  require_odd_resource(r1);
  require_odd_resource(r2);
  l.reg.require_local({l.at, l.a, l.atp, l.ap}, Party::Alice, "Bell measurements");
  l.reg.require_local({l.b, l.bp}, Party::Bob, "corrections");

  FockVector joint = wedge(wedge(in, bell_states(l.a, l.b, n)[r1]), bell_states(l.ap, l.bp, n)[r2]);

  Transcript t;
  t.protocol = "nssr-two-naive";
  t.policy = SsrPolicy::ParticleNumber;
  t.resource = to_string(r1) + "(A,B) ^ " + to_string(r2) + "(A',B')";
  t.input = describe(in, l.reg);
  t.reg = l.reg;
  t.target = relabel(in, {{l.at, l.b}, {l.atp, l.bp}});
  t.output_modes = {l.b, l.bp};

  for (auto& s1 : nssr_step(joint, r1, l.at, l.a, l.b)) {
    if (s1.probability <= 1e-14) {
      static const std::array<const char*, 4> second = {"0", "11", "Psi+", "Psi-"};
      for (std::size_t k = 0; k < second.size(); ++k) {
        BranchRecord b;
        b.label = s1.label + "|" + second[k];
        b.bits = bit_string(s1.index, 2) + bit_string(k, 2);
        b.correction = "none";
        t.branches.push_back(std::move(b));
      }
      continue;
    }
    for (auto& s2 : nssr_step(s1.post, r2, l.atp, l.ap, l.bp)) {
      BranchRecord b;
      b.label = s1.label + "|" + s2.label;
      b.bits = bit_string(s1.index, 2) + bit_string(s2.index, 2);
      b.correction = s1.correction + " ; " + s2.correction;
      b.probability = s1.probability * s2.probability;
      Ensemble fin;
      if (s2.probability > 1e-14) {
        b.snapshots = {{"after-first", Ensemble(s1.post)}, {"pre-second-correction", Ensemble(s2.pre)}};
        require_physical(s2.post, SsrPolicy::ParticleNumber, "post-measurement state");
        fin = Ensemble(s2.post);
      }
      t.branches.push_back(evaluate(t, std::move(b), fin));
    }
  }
  t.tally = {2, 4, 0, true, "2 fbits", ""};
  finalize(t);
  return t;
}

FockVector psi_r_state(const DualRailLayout& l) {
  const int n = l.reg.n();
  const double r = 1.0 / std::sqrt(2.0);
  return from_creation_strings(n, {{r, {l.a, l.bp}}, {r, {l.b, l.ap}}})
      .with_support(mask_of(sorted({l.a, l.b, l.ap, l.bp})));
}

ProjectorSet psi_r_basis(const DualRailLayout& l) {
  const int n = l.reg.n();
  const double r = 1.0 / std::sqrt(2.0);
  const std::vector<int> sup = sorted({l.at, l.atp, l.a, l.ap});
  auto vec = [&](int x1, int y1, int x2, int y2, double sign) {
    return from_creation_strings(n, {{r, {x1, y1}}, {sign * r, {x2, y2}}}).with_support(mask_of(sup));
  };
  return make_projector_set(sup, {{"Phi_R+", {vec(l.at, l.a, l.atp, l.ap, 1.0)}},
                                  {"Phi_R-", {vec(l.at, l.a, l.atp, l.ap, -1.0)}},
                                  {"Psi_R+", {vec(l.at, l.ap, l.atp, l.a, 1.0)}},
                                  {"Psi_R-", {vec(l.at, l.ap, l.atp, l.a, -1.0)}}});
}

ModeUnitary mode_swap(int x, int y) {
  if (x == y) throw FockError("mode_swap needs two distinct modes");
  FermionOp nx = FermionOp::number(x), ny = FermionOp::number(y);
  FermionOp one = FermionOp::identity();
  FermionOp op = (one - nx) * (one - ny) + FermionOp::cdag(y) * FermionOp::c(x) +
                 FermionOp::cdag(x) * FermionOp::c(y) - nx * ny;
  return from_op(op, sorted({x, y}), "SWAP");
}

ModeUnitary psi_r_correction(const std::string& word, const DualRailLayout& l) {
  const std::vector<int> sup = sorted({l.b, l.bp});
  LocalOperator out{sup, Eigen::MatrixXcd::Identity(4, 4), word};
  std::stringstream ss(word);
  std::string g;
  while (std::getline(ss, g, '*')) {
    LocalOperator f;
    if (g == "1") continue;
    if (g == "Z_B") f = embed(u_pi(l.b), sup);
    else if (g == "Z_B'") f = embed(u_pi(l.bp), sup);
    else if (g == "SWAP") f = mode_swap(l.b, l.bp);
    else throw OperatorError("unknown correction generator '" + g + "'");
    out = compose(out, f);
  }
  out.name = word;
  return out;
}

const std::map<std::string, std::string>& psi_r_correction_table() {
  static const std::map<std::string, std::string> table = {
      {"Phi_R+", "Z_B*SWAP"}, {"Phi_R-", "SWAP"}, {"Psi_R+", "Z_B"}, {"Psi_R-", "1"}};
  return table;
}

namespace {

struct PsiRBranch {
  std::string label;
  std::size_t index;
  double probability;
  FockVector pre;
  std::string word;
  FockVector post;
};

std::vector<PsiRBranch> psi_r_core(const FockVector& joint, const DualRailLayout& l) {
  auto branches = measure(joint, psi_r_basis(l));
  std::vector<PsiRBranch> out;
  for (std::size_t i = 0; i < branches.size(); ++i) {
    const std::string& word = psi_r_correction_table().at(branches[i].label);
    PsiRBranch b{branches[i].label, i, branches[i].probability, branches[i].post_state, word,
                 branches[i].post_state};
    if (branches[i].possible()) b.post = apply(psi_r_correction(word, l), b.pre);
    out.push_back(std::move(b));
  }
  return out;
}

Transcript dual_rail_transcript(const std::string& name, const FockVector& in, const DualRailLayout& l) {
  Transcript t;
  t.protocol = name;
  t.policy = SsrPolicy::ParticleNumber;
  t.input = describe(in, l.reg);
  t.reg = l.reg;
  t.target = relabel(in, {{l.at, l.b}, {l.atp, l.bp}});
  t.output_modes = {l.b, l.bp};
  return t;
}

}  // namespace

Transcript nssr_teleport_psi_r(const FockVector& input, const DualRailLayout& l) {
  const int n = l.reg.n();
  FockVector in = place_input(input, {l.at, l.atp}, n);
  require_single_particle(in);
  l.reg.require_local({l.at, l.atp, l.a, l.ap}, Party::Alice, "Bell measurement");
  l.reg.require_local({l.b, l.bp}, Party::Bob, "correction");
  FockVector res = psi_r_state(l);
  FockVector joint = wedge(in, res);
  require_physical(joint, SsrPolicy::ParticleNumber, "joint state");

  Transcript t = dual_rail_transcript("nssr-psi-r", in, l);
  t.resource = "Psi+_R(A,B,A',B')";
  for (auto& r : psi_r_core(joint, l)) {
    BranchRecord b;
    b.label = r.label;
    b.bits = bit_string(r.index, 2);
    b.correction = r.word;
    b.probability = r.probability;
    Ensemble fin;
    if (r.probability > 1e-14) {
      b.snapshots = {{"joint", Ensemble(joint)}, {"pre-correction", Ensemble(r.pre)}};
      require_physical(r.post, SsrPolicy::ParticleNumber, "corrected state");
      fin = Ensemble(r.post);
    }
    t.branches.push_back(evaluate(t, std::move(b), fin));
  }
  t.tally = {0, 2, 0, true, "1 four-mode Psi+_R state", ""};
  finalize(t);
  return t;
}

Transcript nssr_fbits_with_projection(const FockVector& input, const DualRailLayout& l) {
  const int n = l.reg.n();
  FockVector in = place_input(input, {l.at, l.atp}, n);
  require_single_particle(in);
  l.reg.require_local({l.at, l.atp, l.a, l.ap}, Party::Alice, "number and Bell measurements");
  l.reg.require_local({l.b, l.bp}, Party::Bob, "correction");
  FockVector res = wedge(bell_states(l.a, l.b, n)[BellLabel::PsiPlus], bell_states(l.ap, l.bp, n)[BellLabel::PsiPlus]);

  Transcript t = dual_rail_transcript("nssr-projected", in, l);
  t.resource = "Psi+(A,B) ^ Psi+(A',B')";
  const int width = bits_for(4 + 2);
  std::size_t fail_index = 4;
  for (const auto& nb : number_measure(res, {l.a, l.ap})) {
    if (!nb.possible()) continue;
    FockVector joint = wedge(in, nb.post_state);
    require_physical(joint, SsrPolicy::ParticleNumber, "joint state");
    if (nb.label == "1") {
      for (auto& r : psi_r_core(joint, l)) {
        BranchRecord b;
        b.label = "n=1/" + r.label;
        b.bits = bit_string(r.index, width);
        b.correction = r.word;
        b.probability = nb.probability * r.probability;
        Ensemble fin;
        if (r.probability > 1e-14) {
          b.snapshots = {{"resource-after-count", Ensemble(nb.post_state)}, {"pre-correction", Ensemble(r.pre)}};
          fin = Ensemble(r.post);
        }
        t.branches.push_back(evaluate(t, std::move(b), fin));
      }
    } else {
      BranchRecord b;
      b.label = "n=" + nb.label;
      b.bits = bit_string(fail_index++, width);
      b.correction = "abort";
      b.probability = nb.probability;
      b.snapshots = {{"resource-after-count", Ensemble(nb.post_state)}};
      t.branches.push_back(evaluate(t, std::move(b), Ensemble(joint)));
    }
  }
  t.tally = {2, width, 0, true, "2 fbits", "number projection on A, A'"};
  finalize(t);
  return t;
}

// ---------------------------------------------------------------- MME

Ensemble mme2_state(int a, int b, int n_modes) {
  BellBasis bb = bell_states(a, b, n_modes);
  return Ensemble({{0.5, bb[BellLabel::PhiPlus]}, {0.5, bb[BellLabel::PsiPlus]}});
}

Transcript mme_subsystem_swap(const FockVector& input, const Ensemble& resource, const SwapLayout& l) {
  const int n = l.reg.n();
  l.reg.require_local({l.at, l.a}, Party::Alice, "Bell measurement");
  l.reg.require_local({l.b, l.atp}, Party::Bob, "joint parity measurement on (B, ~A')");
  l.reg.require_local({l.b, l.c}, Party::Bob, "correction");
  FockVector in = place_input(input, {l.at, l.atp}, n);
  require_physical(in, SsrPolicy::Parity, "input");
  require_physical(resource, SsrPolicy::Parity, "resource");
  const int p = parity_of(in);

  // Bob's description of the resource: which Bell state sits in each parity sector.
  std::map<int, BellLabel> member_label;
  BellBasis bb = bell_states(l.a, l.b, n);
  for (const auto& [w, m] : resource.members) {
    (void)w;
    std::optional<BellLabel> found;
    for (auto lab : kBellLabels) {
      if (fidelity(bb[lab], m) > 1.0 - 1e-9) found = lab;
    }
    if (!found) throw PhysicalityError("resource member is not a Bell state on (A, B)");
    int par = is_even(*found) ? 0 : 1;
    if (member_label.count(par) && member_label[par] != *found) {
      throw PhysicalityError("resource mixes two Bell states of the same parity");
    }
    member_label[par] = *found;
  }

  Ensemble joint = wedge(in, resource);

  Transcript t;
  t.protocol = "mme-swap";
  t.policy = SsrPolicy::Parity;
  t.resource = describe(resource, l.reg);
  t.input = describe(in, l.reg);
  t.reg = l.reg;
  t.aux_mode = l.c;
  t.target = relabel(in, {{l.at, l.b}});
  t.output_modes = sorted({l.b, l.atp});

  auto outcomes = bell_measure(joint, l.at, l.a);
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (!outcomes[i].possible()) continue;
    BellLabel o = kBellLabels[i];
    auto parities = parity_measure(outcomes[i].post_state, sorted({l.b, l.atp}));
    for (const auto& pr : parities) {
      BranchRecord b;
      const int r = pr.label == "even" ? 0 : 1;
      const int m = r ^ p ^ (is_even(o) ? 0 : 1);
      b.label = to_string(o) + "/" + pr.label;
      b.bits = bell_bits(o);
      b.probability = outcomes[i].probability * pr.probability;
      b.snapshots = {{"post-bell", outcomes[i].post_state}, {"post-parity", pr.post_state}};
      Ensemble fin;
      if (pr.possible()) {
        auto it = member_label.find(m);
        if (it == member_label.end()) throw PhysicalityError("parity outcome inconsistent with the resource");
        CorrectionTag tag = correction_for(o, it->second);
        b.correction = to_string(tag);
        fin = apply(correction_unitary(tag, l.b, l.c), pr.post_state);
        require_physical(fin, SsrPolicy::Parity, "corrected state");
      }
      t.branches.push_back(evaluate(t, std::move(b), fin));
    }
  }
  t.tally = {1, 2, 0, false, "MME-2", "joint parity measurement on Bob's side"};
  finalize(t);
  return t;
}

Transcript mme_fbit_to_ebit(const FourModeLayout& l) {
  const int n = l.reg.n();
  l.reg.require_local({l.a, l.ap}, Party::Alice, "parity measurement");
  l.reg.require_local({l.b, l.bp}, Party::Bob, "parity measurement");
  Ensemble resource = wedge(mme2_state(l.a, l.b, n), bell_states(l.ap, l.bp, n)[BellLabel::PsiPlus]);

  Transcript t;
  t.protocol = "mme-fbit-to-ebit";
  t.policy = SsrPolicy::Parity;
  t.resource = "MME-2(A,B) ^ Psi+(A',B')";
  t.input = "none";
  t.reg = l.reg;
  t.output_modes = {l.a, l.b, l.ap, l.bp};
  const double r = 1.0 / std::sqrt(2.0);
  FockVector ebit = from_creation_strings(n, {{r, {l.b, l.bp}}, {r, {l.a, l.ap}}});

  for (const auto& qa : parity_measure(resource, {l.a, l.ap})) {
    if (!qa.possible()) continue;
    for (const auto& qb : parity_measure(qa.post_state, {l.b, l.bp})) {
      BranchRecord b;
      b.label = qa.label + "/" + qb.label;
      b.bits = "";
      b.correction = "none";
      b.probability = qa.probability * qb.probability;
      if (!qb.possible()) {
        t.branches.push_back(std::move(b));
        continue;
      }
      b.final_state = qb.post_state;
      b.snapshots = {{"resource", resource}, {"after-alice", qa.post_state}};
      if (qb.post_state.is_pure()) {
        const FockVector& s = qb.post_state.members[0].second;
        b.output = s;
        double e = entanglement_entropy(s, {l.a, l.ap});
        b.metrics["entropy"] = e;
        b.success = std::abs(e - 1.0) < kSuccessTolerance;
        if (b.label == "even/even") b.fidelity = fidelity(ebit, s);
      } else {
        b.metrics["entropy"] = -1.0;
      }
      t.branches.push_back(std::move(b));
    }
  }
  t.tally = {2, 0, 0, false, "MME-2 + 1 fbit", "local parity measurements"};
  finalize(t);
  return t;
}

// ---------------------------------------------------------------- qutrit

std::string to_string(QutritResource r) {
  switch (r) {
    case QutritResource::N2J1K1: return "|2;1,1>";
    case QutritResource::N3J1K2: return "|3;1,2>";
    case QutritResource::N3J2K1: return "|3;2,1>";
    case QutritResource::N4J2K2: return "|4;2,2>";
  }
  return "?";
}

FockVector qutrit_resource(QutritResource r, const QutritLayout& l) {
  return nssr_mme_member(static_cast<int>(r), l.a, l.b, l.reg.n());
}

std::vector<FockVector> qutrit_input_basis(int particles, const QutritLayout& l) {
  const int n = l.reg.n();
  const Bits sup = mask_of({l.in[0], l.in[1], l.in[2]});
  const auto& I = l.in;
  if (particles == 1) {
    return {occupied(n, I[0]).with_support(sup), occupied(n, I[1]).with_support(sup),
            occupied(n, I[2]).with_support(sup)};
  }
  if (particles == 2) {
    return {FockVector::basis(n, bit(I[0]) | bit(I[1])).with_support(sup),
            FockVector::basis(n, bit(I[0]) | bit(I[2])).with_support(sup),
            FockVector::basis(n, bit(I[1]) | bit(I[2])).with_support(sup)};
  }
  throw PhysicalityError("qutrits are encoded with one or two particles");
}

Transcript nssr_qutrit_teleport(const FockVector& input, const Ensemble& resource, const QutritLayout& l) {
  const int n = l.reg.n();
  const std::vector<int> in_modes(l.in.begin(), l.in.end());
  const std::vector<int> a_modes(l.a.begin(), l.a.end());
  const std::vector<int> b_modes(l.b.begin(), l.b.end());
  FockVector in = place_input(input, in_modes, n);
  require_physical(in, SsrPolicy::ParticleNumber, "input");
  const int m = popcount(in.terms().begin()->first);
  if (m != 1 && m != 2) throw PhysicalityError("input is not supported in the one- or two-particle sector");
  require_physical(resource, SsrPolicy::ParticleNumber, "resource");
  std::vector<int> alice_all = in_modes;
  alice_all.insert(alice_all.end(), a_modes.begin(), a_modes.end());
  l.reg.require_local(alice_all, Party::Alice, "number and Bell measurements");
  std::vector<int> bob_all = b_modes;
  bob_all.push_back(l.c);
  l.reg.require_local(bob_all, Party::Bob, "number measurement and correction");

  Transcript t;
  t.protocol = "nssr-qutrit";
  t.policy = SsrPolicy::ParticleNumber;
  t.resource = describe(resource, l.reg);
  t.input = describe(in, l.reg);
  t.reg = l.reg;
  t.aux_mode = l.c;
  std::map<int, int> out_map{{l.in[0], l.b[0]}, {l.in[1], l.b[1]}, {l.in[2], l.b[2]}};
  t.target = relabel(in, out_map);
  t.output_modes = b_modes;

  LogicalStep step;
  step.in_modes = in_modes;
  step.alice_modes = a_modes;
  step.bob_modes = b_modes;
  step.aux = l.c;
  step.in_basis = qutrit_input_basis(m, l);
  step.out_map = out_map;
  step.policy = SsrPolicy::ParticleNumber;
  const int width = bits_for(9);

  for (const auto& ja : number_measure(resource, a_modes)) {
    if (!ja.possible()) continue;
    for (const auto& kb : number_measure(ja.post_state, b_modes)) {
      if (!kb.possible()) continue;
      if (!kb.post_state.is_pure()) {
        throw PhysicalityError("mixture members with equal local particle numbers cannot be told apart");
      }
      const FockVector& r = kb.post_state.members[0].second;
      LogicalCorrectionSpec spec = correction_spec(r, step);
      FockVector joint = wedge(in, r);
      if (spec.aux_in) joint = wedge(joint, occupied(n, l.c));
      require_physical(joint, SsrPolicy::ParticleNumber, "joint state");
      auto branches = logical_teleport(joint, r, step);
      for (std::size_t i = 0; i < branches.size(); ++i) {
        auto& lb = branches[i];
        BranchRecord b;
        b.label = "j=" + ja.label + ",k=" + kb.label + "/" + lb.label;
        b.bits = bit_string(i, width);
        b.correction = lb.correction.name + (spec.aux_in != spec.aux_out ? " with C" : "");
        b.probability = ja.probability * kb.probability * lb.probability;
        Ensemble fin;
        if (lb.probability > 1e-14) {
          b.snapshots = {{"resource-member", Ensemble(r)}, {"pre-correction", Ensemble(lb.pre)}};
          require_physical(lb.post, SsrPolicy::ParticleNumber, "corrected state");
          fin = Ensemble(lb.post);
        }
        t.branches.push_back(evaluate(t, std::move(b), fin));
      }
    }
  }
  t.tally = {0, width, 0, false, t.resource, "9-outcome generalized Bell measurement"};
  finalize(t);
  return t;
}

ResourceRow resource_accounting(const Transcript& t) {
  return {t.tally.fbits, t.tally.classical_bits, t.tally.channel_modes, t.tally.gaussian_only, t.tally.note};
}

}  // namespace fermitele
