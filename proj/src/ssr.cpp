#include "fermitele/ssr.hpp"

#include <cmath>
#include <map>
#include <sstream>

namespace fermitele {

std::string to_string(SsrPolicy p) {
  switch (p) {
    case SsrPolicy::None: return "none";
    case SsrPolicy::Parity: return "parity";
    case SsrPolicy::ParticleNumber: return "particle-number";
  }
  return "?";
}

SsrPolicy policy_from_string(const std::string& s) {
  if (s == "none") return SsrPolicy::None;
  if (s == "parity" || s == "P") return SsrPolicy::Parity;
  if (s == "particle-number" || s == "number" || s == "N") return SsrPolicy::ParticleNumber;
  throw SsrError("unknown SSR policy '" + s + "'");
}

std::string SectorLabel::str() const {
  if (policy == SsrPolicy::Parity) return value == 0 ? "even" : "odd";
  return std::to_string(value);
}

SectorLabel sector_of(Bits occupation, SsrPolicy policy, Bits modes) {
  const int n = popcount(occupation & modes);
  switch (policy) {
    case SsrPolicy::Parity: return {policy, n & 1};
    case SsrPolicy::ParticleNumber: return {policy, n};
    case SsrPolicy::None: break;
  }
  throw SsrError("sector_of needs a Parity or ParticleNumber policy");
}

PhysicalityReport is_physical(const FockVector& state, SsrPolicy policy) {
  PhysicalityReport r;
  if (policy == SsrPolicy::None || state.terms().empty()) return r;
  const auto& terms = state.terms();
  auto ref = terms.begin();
  const SectorLabel s0 = sector_of(ref->first, policy);
  for (auto it = std::next(ref); it != terms.end(); ++it) {
    if (sector_of(it->first, policy) != s0) r.offending.emplace_back(ref->first, it->first);
  }
  if (!r.offending.empty()) {
    r.ok = false;
    std::ostringstream os;
    os << "coherent superposition across " << to_string(policy) << " sectors: basis states 0x"
       << std::hex << r.offending.front().first << " (" << s0.str() << ") and 0x"
       << r.offending.front().second << std::dec << " ("
       << sector_of(r.offending.front().second, policy).str() << ")";
    if (r.offending.size() > 1) os << " and " << r.offending.size() - 1 << " more";
    r.diagnostic = os.str();
  }
  return r;
}

PhysicalityReport is_physical(const Ensemble& state, SsrPolicy policy) {
  for (std::size_t i = 0; i < state.members.size(); ++i) {
    auto r = is_physical(state.members[i].second, policy);
    if (!r) {
      r.diagnostic = "member " + std::to_string(i) + ": " + r.diagnostic;
      return r;
    }
  }
  return {};
}

PhysicalityReport is_locally_physical(const Ensemble& state, const std::vector<int>& modes,
                                      SsrPolicy policy, double tol) {
  PhysicalityReport r;
  if (policy == SsrPolicy::None) return r;
  DensityView rho = partial_trace(state, modes);
  for (std::size_t i = 0; i < rho.dim(); ++i) {
    for (std::size_t j = i + 1; j < rho.dim(); ++j) {
      if (std::abs(rho.matrix(i, j)) <= tol) continue;
      Bits bi = local_to_bits(i, rho.modes), bj = local_to_bits(j, rho.modes);
      if (sector_of(bi, policy) != sector_of(bj, policy)) r.offending.emplace_back(bi, bj);
    }
  }
  if (!r.offending.empty()) {
    r.ok = false;
    r.diagnostic = "reduced state carries coherence between local " + to_string(policy) +
                   " sectors (" + std::to_string(r.offending.size()) + " entries)";
  }
  return r;
}

std::vector<SectorComponent> sector_decompose(const FockVector& state, SsrPolicy policy,
                                              Bits modes) {
  if (policy == SsrPolicy::None) throw SsrError("sector_decompose needs a policy");
  const double nrm = state.norm();
  if (nrm < kPruneThreshold) throw SsrError("cannot decompose a zero state");
  std::map<SectorLabel, FockVector> bins;
  for (const auto& [occ, a] : state.terms()) {
    auto lbl = sector_of(occ, policy, modes);
    auto it = bins.try_emplace(lbl, state.n_modes(), state.support()).first;
    it->second.add(occ, a / nrm);
  }
  std::vector<SectorComponent> out;
  for (auto& [lbl, v] : bins) {
    double w = v.norm() * v.norm();
    out.push_back({w, lbl, v.normalized()});
  }
  return out;
}

Projection project_sector(const FockVector& state, const std::vector<int>& modes, SsrPolicy policy,
                          SectorLabel label) {
  if (label.policy != policy) throw SsrError("sector label does not belong to the policy");
  const Bits m = mask_of(modes);
  FockVector kept(state.n_modes(), state.support());
  for (const auto& [occ, a] : state.terms()) {
    if (sector_of(occ, policy, m) == label) kept.add(occ, a);
  }
  Projection p;
  double n2 = kept.norm() * kept.norm();
  double total = state.norm() * state.norm();
  p.probability = total > 0 ? n2 / total : 0.0;
  p.state = p.probability > 0 && n2 > kPruneThreshold * kPruneThreshold ? kept.normalized()
                                                                         : FockVector(state.n_modes());
  if (p.state.is_zero()) p.probability = 0.0;
  return p;
}

std::vector<SectorLabel> sector_labels(SsrPolicy policy, int n_modes) {
  std::vector<SectorLabel> out;
  if (policy == SsrPolicy::Parity) {
    out = {even(), odd()};
  } else if (policy == SsrPolicy::ParticleNumber) {
    for (int k = 0; k <= n_modes; ++k) out.push_back(count(k));
  } else {
    throw SsrError("no sectors without a policy");
  }
  return out;
}

}  // namespace fermitele
