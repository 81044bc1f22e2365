#include "fermitele/logical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace fermitele {

namespace {

std::vector<int> sorted_union(std::vector<int> a, const std::vector<int>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

int sector_value(const FockVector& v, SsrPolicy policy) {
  if (v.terms().empty()) throw FockError("sector of a zero vector");
  int first = popcount(v.terms().begin()->first);
  for (const auto& [occ, a] : v.terms()) {
    (void)a;
    int c = popcount(occ);
    if (policy == SsrPolicy::Parity ? ((c - first) & 1) : c != first) {
      throw SsrError("logical basis vector mixes sectors");
    }
  }
  return policy == SsrPolicy::Parity ? (first & 1) : first;
}

cplx root_of_unity(int power, int d) {
  double phase = 2.0 * std::numbers::pi * static_cast<double>(power % d) / d;
  return std::polar(1.0, phase);
}

}  // namespace

std::vector<SchmidtTerm> schmidt_terms(const FockVector& state, const std::vector<int>& alice,
                                       const std::vector<int>& bob, double tol) {
  const int n = state.n_modes();
  const Bits am = mask_of(alice);
  const Bits bm = mask_of(bob);
  std::map<Bits, int> a_seen, b_seen;
  for (const auto& [occ, amp] : state.terms()) {
    (void)amp;
    if (occ & ~(am | bm)) throw FockError("state has occupation outside the bipartition");
    a_seen[occ & am]++;
    b_seen[occ & bm]++;
  }
  std::vector<SchmidtTerm> out;
  bool direct = std::all_of(a_seen.begin(), a_seen.end(), [](auto& p) { return p.second == 1; }) &&
                std::all_of(b_seen.begin(), b_seen.end(), [](auto& p) { return p.second == 1; });
  if (direct) {
    for (const auto& [occ, amp] : state.terms()) {
      cplx c = amp * double(front_sign(occ, am));
      double r = std::abs(c);
      if (r < tol) continue;
      out.push_back({r, FockVector::basis(n, occ & am).with_support(am),
                     (FockVector::basis(n, occ & bm) * (c / r)).with_support(bm)});
    }
  } else {
    const std::size_t da = std::size_t{1} << alice.size();
    const std::size_t db = std::size_t{1} << bob.size();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(da, db);
    for (const auto& [occ, amp] : state.terms()) {
      m(bits_to_local(occ & am, alice), bits_to_local(occ & bm, bob)) = amp * double(front_sign(occ, am));
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    for (Eigen::Index x = 0; x < svd.singularValues().size(); ++x) {
      double s = svd.singularValues()(x);
      if (s < tol) continue;
      out.push_back({s, from_local(svd.matrixU().col(x), alice, n, 1e-13),
                     from_local(svd.matrixV().col(x).conjugate(), bob, n, 1e-13)});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const SchmidtTerm& a, const SchmidtTerm& b) {
    return a.coeff > b.coeff + 1e-12;
  });
  return out;
}

ProjectorSet generalized_bell_projectors(const std::vector<FockVector>& in_basis,
                                         const std::vector<FockVector>& alice_basis,
                                         const std::vector<int>& support) {
  const int d = static_cast<int>(in_basis.size());
  if (d == 0 || alice_basis.size() != in_basis.size()) throw FockError("logical bases differ in size");
  std::vector<std::pair<std::string, std::vector<FockVector>>> ranges;
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < d; ++k) {
      FockVector v = wedge(in_basis[0], alice_basis[k % d]) * norm;
      for (int x = 1; x < d; ++x) {
        v = v + wedge(in_basis[x], alice_basis[(x + k) % d]) * (root_of_unity(j * x, d) * norm);
      }
      ranges.push_back({std::to_string(j) + "," + std::to_string(k), {v.pruned()}});
    }
  }
  return make_projector_set(support, ranges);
}

LocalOperator complete_unitary(const std::vector<FockVector>& src, const std::vector<FockVector>& dst,
                               const std::vector<int>& support, SsrPolicy policy, std::string name) {
  if (src.size() != dst.size()) throw FockError("complete_unitary needs matching vector counts");
  const Eigen::Index dim = Eigen::Index{1} << support.size();
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(dim, dim);
  std::map<int, std::pair<std::vector<Eigen::VectorXcd>, std::vector<Eigen::VectorXcd>>> by_sector;
  for (std::size_t y = 0; y < src.size(); ++y) {
    int s = sector_value(src[y], policy == SsrPolicy::None ? SsrPolicy::Parity : policy);
    int t = sector_value(dst[y], policy == SsrPolicy::None ? SsrPolicy::Parity : policy);
    if (policy != SsrPolicy::None && s != t) throw SsrError("correction would change the sector");
    Eigen::VectorXcd a = to_local(src[y], support);
    Eigen::VectorXcd b = to_local(dst[y], support);
    u += b * a.adjoint();
    by_sector[s].first.push_back(a);
    by_sector[s].second.push_back(b);
  }
  // Complement each sector block: map an orthonormal basis of the unused source
  // space onto one of the unused target space.
  auto local_sector = [&](Eigen::Index i) {
    int c = popcount(static_cast<Bits>(i));
    return policy == SsrPolicy::ParticleNumber ? c : (c & 1);
  };
  std::set<int> sectors;
  for (Eigen::Index i = 0; i < dim; ++i) sectors.insert(local_sector(i));
  auto complement = [&](const std::vector<Eigen::VectorXcd>& used, const std::vector<Eigen::Index>& idx) {
    Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(dim, static_cast<Eigen::Index>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) e(idx[c], static_cast<Eigen::Index>(c)) = 1.0;
    for (const auto& v : used) e -= v * (v.adjoint() * e);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(e, Eigen::ComputeThinU);
    std::vector<Eigen::VectorXcd> out;
    for (Eigen::Index c = 0; c < svd.singularValues().size(); ++c) {
      if (svd.singularValues()(c) > 0.5) out.push_back(svd.matrixU().col(c));
    }
    return out;
  };
  for (int s : sectors) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < dim; ++i) {
      if (policy == SsrPolicy::None || local_sector(i) == s) idx.push_back(i);
    }
    std::vector<Eigen::VectorXcd> used_src, used_dst;
    if (policy == SsrPolicy::None) {
      for (auto& [k, p] : by_sector) {
        used_src.insert(used_src.end(), p.first.begin(), p.first.end());
        used_dst.insert(used_dst.end(), p.second.begin(), p.second.end());
      }
    } else if (by_sector.count(s)) {
      used_src = by_sector[s].first;
      used_dst = by_sector[s].second;
    }
    auto cs = complement(used_src, idx);
    auto cd = complement(used_dst, idx);
    if (cs.size() != cd.size()) throw FockError("cannot complete the correction unitary");
    for (std::size_t c = 0; c < cs.size(); ++c) u += cd[c] * cs[c].adjoint();
    if (policy == SsrPolicy::None) break;
  }
  LocalOperator op{support, u, std::move(name)};
  if (!is_unitary(op, 1e-10)) throw FockError("completed correction is not unitary");
  return op;
}

LocalOperator logical_correction(int j, int k, const LogicalCorrectionSpec& spec) {
  const int d = static_cast<int>(spec.bob_basis.size());
  const int n = spec.bob_basis.at(0).n_modes();
  std::vector<FockVector> src, dst;
  for (int x = 0; x < d; ++x) {
    FockVector s = spec.bob_basis[(x + k) % d];
    FockVector t = spec.out_basis[x] * root_of_unity(j * x, d);
    if (spec.aux >= 0) {
      const Bits c = bit(spec.aux);
      s = wedge(s, FockVector::basis(n, spec.aux_in ? c : 0).with_support(c));
      t = wedge(t, FockVector::basis(n, spec.aux_out ? c : 0).with_support(c));
    }
    src.push_back(s);
    dst.push_back(t);
  }
  return complete_unitary(src, dst, spec.support, spec.policy,
                          "V(" + std::to_string(j) + "," + std::to_string(k) + ")");
}

std::pair<int, int> aux_occupations(const FockVector& bob_vector, const FockVector& out_vector,
                                    SsrPolicy policy) {
  int s = sector_value(bob_vector, SsrPolicy::ParticleNumber);
  int t = sector_value(out_vector, SsrPolicy::ParticleNumber);
  if (policy == SsrPolicy::Parity) {
    if (((s - t) & 1) == 0) return {0, 0};
    return {0, 1};
  }
  if (s == t) return {0, 0};
  if (t == s + 1) return {1, 0};
  if (t == s - 1) return {0, 1};
  throw SsrError("resource and input sectors differ by more than one particle");
}

LogicalCorrectionSpec correction_spec(const FockVector& resource, const LogicalStep& step) {
  auto terms = schmidt_terms(resource, step.alice_modes, step.bob_modes);
  const std::size_t d = step.in_basis.size();
  if (terms.size() != d) {
    throw FockError("resource Schmidt rank " + std::to_string(terms.size()) + " does not match dimension " +
                    std::to_string(d));
  }
  for (const auto& t : terms) {
    if (std::abs(t.coeff - terms[0].coeff) > 1e-10) throw FockError("resource is not maximally entangled");
  }
  LogicalCorrectionSpec spec;
  spec.policy = step.policy;
  spec.aux = step.aux;
  for (const auto& t : terms) spec.bob_basis.push_back(t.bob);
  for (const auto& v : step.in_basis) spec.out_basis.push_back(relabel(v, step.out_map));
  spec.support = step.bob_modes;
  if (step.aux >= 0) {
    auto [cin, cout] = aux_occupations(spec.bob_basis[0], spec.out_basis[0], step.policy);
    spec.aux_in = cin;
    spec.aux_out = cout;
    spec.support = sorted_union(step.bob_modes, {step.aux});
  } else if (sector_value(spec.bob_basis[0], step.policy) != sector_value(spec.out_basis[0], step.policy)) {
    throw SsrError("sector change requires an auxiliary mode");
  }
  return spec;
}

std::vector<LogicalBranch> logical_teleport(const FockVector& joint, const FockVector& resource,
                                            const LogicalStep& step) {
  auto terms = schmidt_terms(resource, step.alice_modes, step.bob_modes);
  LogicalCorrectionSpec spec = correction_spec(resource, step);
  std::vector<FockVector> alice_basis;
  for (const auto& t : terms) alice_basis.push_back(t.alice);
  const std::vector<int> support = sorted_union(step.in_modes, step.alice_modes);
  ProjectorSet set = generalized_bell_projectors(step.in_basis, alice_basis, support);
  auto outcomes = measure(joint, set);
  const int d = static_cast<int>(step.in_basis.size());
  std::vector<LogicalBranch> out;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    LogicalBranch b;
    b.label = outcomes[i].label;
    b.j = static_cast<int>(i) / d;
    b.k = static_cast<int>(i) % d;
    b.probability = outcomes[i].probability;
    b.pre = outcomes[i].post_state;
    b.correction = logical_correction(b.j, b.k, spec);
    if (outcomes[i].possible()) b.post = apply(b.correction, b.pre);
    out.push_back(std::move(b));
  }
  return out;
}

std::vector<std::size_t> matching_corrections(const std::vector<FockVector>& pre,
                                              const std::vector<FockVector>& targets,
                                              const std::vector<LocalOperator>& candidates,
                                              const std::vector<int>& output_modes, double tol) {
  std::vector<std::size_t> hits;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    bool ok = true;
    for (std::size_t p = 0; p < pre.size() && ok; ++p) {
      FockVector post = apply(candidates[c], pre[p]);
      ok = fidelity(targets[p], partial_trace(post, output_modes)) >= 1.0 - tol;
    }
    if (ok) hits.push_back(c);
  }
  return hits;
}

}  // namespace fermitele
