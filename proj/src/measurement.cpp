#include "fermitele/measurement.hpp"

#include <cmath>

#include "fermitele/operators.hpp"

namespace fermitele {

ProjectorSet make_projector_set(const std::vector<int>& support,
                                const std::vector<std::pair<std::string, std::vector<FockVector>>>& ranges) {
  ProjectorSet set;
  set.support = support;
  const Eigen::Index dim = Eigen::Index{1} << support.size();
  Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& [label, vecs] : ranges) {
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& v : vecs) {
      Eigen::VectorXcd x = to_local(v, support);
      p += x * x.adjoint();
    }
    total += p;
    set.labels.push_back(label);
    set.projectors.push_back(std::move(p));
  }
  set.complete = (total - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff() < 1e-12;
  validate(set);
  return set;
}

void validate(const ProjectorSet& set, double tol) {
  if (set.labels.size() != set.projectors.size()) throw MeasurementError("label/projector count mismatch");
  for (std::size_t i = 0; i < set.projectors.size(); ++i) {
    const auto& p = set.projectors[i];
    if ((p - p.adjoint()).cwiseAbs().maxCoeff() > tol || (p * p - p).cwiseAbs().maxCoeff() > tol) {
      throw MeasurementError("element '" + set.labels[i] + "' is not a projector");
    }
    for (std::size_t j = i + 1; j < set.projectors.size(); ++j) {
      if ((p * set.projectors[j]).cwiseAbs().maxCoeff() > tol) {
        throw MeasurementError("projectors '" + set.labels[i] + "' and '" + set.labels[j] +
                               "' are not orthogonal");
      }
    }
  }
}

std::vector<OutcomeBranch> measure(const FockVector& state, const ProjectorSet& set) {
  validate(set);
  const double total = std::pow(state.norm(), 2);
  if (total < kPruneThreshold) throw MeasurementError("cannot measure a zero state");
  std::vector<OutcomeBranch> out;
  for (std::size_t k = 0; k < set.projectors.size(); ++k) {
    FockVector v = apply_local(set.projectors[k], set.support, state);
    OutcomeBranch b;
    b.label = set.labels[k];
    double n2 = std::pow(v.norm(), 2);
    b.probability = n2 / total;
    b.post_state = n2 > 1e-28 ? v.normalized() : FockVector(state.n_modes());
    if (n2 <= 1e-28) b.probability = 0.0;
    out.push_back(std::move(b));
  }
  return out;
}

namespace {

template <typename F>
std::vector<EnsembleBranch> lift(const Ensemble& state, F&& per_member) {
  std::vector<EnsembleBranch> out;
  const double wsum = state.total_weight();
  for (const auto& [w, psi] : state.members) {
    std::vector<OutcomeBranch> bs = per_member(psi);
    if (out.empty()) {
      for (const auto& b : bs) out.push_back({b.label, 0.0, {}});
    }
    for (std::size_t k = 0; k < bs.size(); ++k) {
      double p = w / wsum * bs[k].probability;
      if (p <= 0.0) continue;
      out[k].probability += p;
      out[k].post_state.members.emplace_back(p, bs[k].post_state);
    }
  }
  for (auto& b : out) {
    for (auto& m : b.post_state.members) m.first /= b.probability;
  }
  return out;
}

}  // namespace

std::vector<EnsembleBranch> measure(const Ensemble& state, const ProjectorSet& set) {
  return lift(state, [&](const FockVector& psi) { return measure(psi, set); });
}

ProjectorSet bell_projectors(int a, int b, int n_modes) {
  BellBasis bb = bell_states(a, b, n_modes);
  std::vector<std::pair<std::string, std::vector<FockVector>>> ranges;
  for (auto l : kBellLabels) ranges.push_back({to_string(l), {bb[l]}});
  return make_projector_set(a < b ? std::vector<int>{a, b} : std::vector<int>{b, a}, ranges);
}

std::vector<OutcomeBranch> bell_measure(const FockVector& state, int a, int b) {
  return measure(state, bell_projectors(a, b, state.n_modes()));
}

std::vector<EnsembleBranch> bell_measure(const Ensemble& state, int a, int b) {
  return measure(state, bell_projectors(a, b, state.n_modes()));
}

ProjectorSet number_resolved_bell_projectors(int a, int b, int n_modes) {
  BellBasis bb = bell_states(a, b, n_modes);
  const Bits sup = bit(a) | bit(b);
  FockVector vac = FockVector::vacuum(n_modes, sup);
  FockVector both = from_creation_strings(n_modes, {{1.0, {a, b}}}).with_support(sup);
  return make_projector_set(a < b ? std::vector<int>{a, b} : std::vector<int>{b, a},
                            {{"0", {vac}},
                             {"11", {both}},
                             {"Psi+", {bb[BellLabel::PsiPlus]}},
                             {"Psi-", {bb[BellLabel::PsiMinus]}}});
}

ProjectorSet three_outcome_povm(int a, int b, int n_modes) {
  BellBasis bb = bell_states(a, b, n_modes);
  return make_projector_set(a < b ? std::vector<int>{a, b} : std::vector<int>{b, a},
                            {{"Psi+", {bb[BellLabel::PsiPlus]}},
                             {"Psi-", {bb[BellLabel::PsiMinus]}},
                             {"even", {bb[BellLabel::PhiPlus], bb[BellLabel::PhiMinus]}}});
}

namespace {

std::vector<OutcomeBranch> sector_measure(const FockVector& state, const std::vector<int>& modes,
                                          SsrPolicy policy) {
  std::vector<OutcomeBranch> out;
  for (const auto& lbl : sector_labels(policy, static_cast<int>(modes.size()))) {
    Projection p = project_sector(state, modes, policy, lbl);
    out.push_back({lbl.str(), p.probability, p.state});
  }
  return out;
}

}  // namespace

std::vector<OutcomeBranch> parity_measure(const FockVector& state, const std::vector<int>& modes) {
  return sector_measure(state, modes, SsrPolicy::Parity);
}

std::vector<EnsembleBranch> parity_measure(const Ensemble& state, const std::vector<int>& modes) {
  return lift(state, [&](const FockVector& psi) { return parity_measure(psi, modes); });
}

std::vector<OutcomeBranch> number_measure(const FockVector& state, const std::vector<int>& modes) {
  return sector_measure(state, modes, SsrPolicy::ParticleNumber);
}

std::vector<EnsembleBranch> number_measure(const Ensemble& state, const std::vector<int>& modes) {
  return lift(state, [&](const FockVector& psi) { return number_measure(psi, modes); });
}

double BranchSampler::uniform() {
  // 53 random mantissa bits, identical on every platform
  return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
}

std::size_t BranchSampler::draw(const std::vector<double>& probabilities) {
  double total = 0.0;
  for (double p : probabilities) total += p;
  if (probabilities.empty() || std::abs(total - 1.0) > 1e-9) {
    throw MeasurementError("branch probabilities do not sum to 1");
  }
  const double u = uniform();
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t k = 0; k < probabilities.size(); ++k) {
    if (probabilities[k] <= 0.0) continue;
    last = k;
    acc += probabilities[k];
    if (u < acc) return k;
  }
  return last;
}

std::size_t BranchSampler::draw(const std::vector<OutcomeBranch>& branches) {
  std::vector<double> p;
  p.reserve(branches.size());
  for (const auto& b : branches) p.push_back(b.probability);
  return draw(p);
}

const OutcomeBranch& sample(const std::vector<OutcomeBranch>& branches, std::uint64_t seed) {
  BranchSampler s(seed);
  return branches[s.draw(branches)];
}

}  // namespace fermitele
