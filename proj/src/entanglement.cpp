#include "fermitele/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

namespace fermitele {

double shannon_entropy(const std::vector<double>& p) {
  double s = 0.0;
  for (double x : p) {
    if (x > 1e-15) s -= x * std::log2(x);
  }
  return std::max(s, 0.0);
}

double von_neumann_entropy(const Eigen::MatrixXcd& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  return shannon_entropy(ev);
}

double entanglement_entropy(const FockVector& state, const std::vector<int>& side) {
  if (!state.is_normalized(1e-9)) throw FockError("entanglement_entropy needs a normalized state");
  return von_neumann_entropy(partial_trace(state, side).matrix);
}

namespace {

std::vector<int> complement_modes(int n, const std::vector<int>& alice) {
  std::vector<int> out;
  const Bits m = mask_of(alice);
  for (int i = 0; i < n; ++i) {
    if (!(m & bit(i))) out.push_back(i);
  }
  return out;
}

Eigen::VectorXcd bipartite_vector(const FockVector& s, const std::vector<int>& alice, const std::vector<int>& bob) {
  const Bits am = mask_of(alice);
  const Bits bm = mask_of(bob);
  const Eigen::Index db = Eigen::Index{1} << bob.size();
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero((Eigen::Index{1} << alice.size()) * db);
  for (const auto& [occ, amp] : s.terms()) {
    if (occ & ~(am | bm)) throw FockError("state occupies modes outside the bipartition");
    Eigen::Index a = static_cast<Eigen::Index>(bits_to_local(occ & am, alice));
    Eigen::Index b = static_cast<Eigen::Index>(bits_to_local(occ & bm, bob));
    v(a * db + b) = amp * double(front_sign(occ, am));
  }
  return v;
}

/// Entropy of entanglement of an (unnormalized) bipartite vector.
double pure_entropy(const Eigen::VectorXcd& v, Eigen::Index da, Eigen::Index db) {
  const double n2 = v.squaredNorm();
  if (n2 < 1e-300) return 0.0;
  Eigen::MatrixXcd m(da, db);
  for (Eigen::Index a = 0; a < da; ++a) {
    for (Eigen::Index b = 0; b < db; ++b) m(a, b) = v(a * db + b);
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  std::vector<double> p;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    p.push_back(svd.singularValues()(i) * svd.singularValues()(i) / n2);
  }
  return shannon_entropy(p);
}

Eigen::MatrixXcd reduce_first(const Eigen::MatrixXcd& rho, Eigen::Index da, Eigen::Index db) {
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(da, da);
  for (Eigen::Index a = 0; a < da; ++a) {
    for (Eigen::Index a2 = 0; a2 < da; ++a2) {
      for (Eigen::Index b = 0; b < db; ++b) r(a, a2) += rho(a * db + b, a2 * db + b);
    }
  }
  return r;
}

Eigen::MatrixXcd reduce_second(const Eigen::MatrixXcd& rho, Eigen::Index da, Eigen::Index db) {
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(db, db);
  for (Eigen::Index b = 0; b < db; ++b) {
    for (Eigen::Index b2 = 0; b2 < db; ++b2) {
      for (Eigen::Index a = 0; a < da; ++a) r(b, b2) += rho(a * db + b, a * db + b2);
    }
  }
  return r;
}

/// Convex-roof upper bound by multi-start descent over decomposition isometries.
double optimize_roof(const std::vector<Eigen::VectorXcd>& weighted, Eigen::Index da, Eigen::Index db,
                     const EofOptions& opt) {
  const int r = static_cast<int>(weighted.size());
  const int k = std::min(r * r, 12);
  const int np = 2 * k * r;
  auto objective = [&](const std::vector<double>& x) {
    Eigen::MatrixXcd z(k, r);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < r; ++j) z(i, j) = cplx(x[2 * (i * r + j)], x[2 * (i * r + j) + 1]);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(z.adjoint() * z);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
    Eigen::MatrixXcd u = z * es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
    double f = 0.0;
    for (int i = 0; i < k; ++i) {
      Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(weighted[0].size());
      for (int j = 0; j < r; ++j) psi += u(i, j) * weighted[j];
      f += psi.squaredNorm() * pure_entropy(psi, da, db);
    }
    return f;
  };
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double best = 1e300;
  for (int s = 0; s < opt.starts; ++s) {
    std::vector<double> x(static_cast<std::size_t>(np));
    if (s == 0) {
      // eigen-decomposition itself
      std::fill(x.begin(), x.end(), 0.0);
      for (int j = 0; j < r; ++j) x[2 * (j * r + j)] = 1.0;
    } else {
      for (auto& v : x) v = gauss(rng);
    }
    double f = objective(x);
    double step = 0.5;
    for (int it = 0; it < opt.max_iterations && step > 1e-10; ++it) {
      std::vector<double> g(x.size());
      const double h = 1e-6;
      for (std::size_t p = 0; p < x.size(); ++p) {
        auto xp = x, xm = x;
        xp[p] += h;
        xm[p] -= h;
        g[p] = (objective(xp) - objective(xm)) / (2 * h);
      }
      double gn = std::sqrt(std::inner_product(g.begin(), g.end(), g.begin(), 0.0));
      if (gn < 1e-9) break;
      bool moved = false;
      while (step > 1e-10) {
        std::vector<double> xn = x;
        for (std::size_t p = 0; p < x.size(); ++p) xn[p] -= step * g[p] / gn;
        double fn = objective(xn);
        if (fn < f - 1e-4 * step * gn) {
          x = std::move(xn);
          f = fn;
          step *= 1.5;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    best = std::min(best, f);
  }
  return best;
}

EofResult eof_raw(const Ensemble& state, const std::vector<int>& alice_in, SsrPolicy policy,
                  const EofOptions& opt) {
  const int n = state.n_modes();
  std::vector<int> alice = alice_in;
  std::sort(alice.begin(), alice.end());
  std::vector<int> bob = complement_modes(n, alice);
  if (alice.empty() || bob.empty()) throw FockError("eof_ssr needs a nontrivial bipartition");
  const Eigen::Index da = Eigen::Index{1} << alice.size();
  const Eigen::Index db = Eigen::Index{1} << bob.size();
  Eigen::MatrixXcd rho = qubit_equivalent(state, alice, bob);
  rho /= rho.trace().real();

  std::map<int, std::vector<Eigen::Index>> blocks;
  for (Eigen::Index i = 0; i < da * db; ++i) {
    int c = popcount(static_cast<Bits>(i / db)) + popcount(static_cast<Bits>(i % db));
    int key = policy == SsrPolicy::None ? 0 : policy == SsrPolicy::Parity ? (c & 1) : c;
    blocks[key].push_back(i);
  }

  EofResult res;
  res.exact = true;
  for (const auto& [key, idx] : blocks) {
    Eigen::MatrixXcd blk = Eigen::MatrixXcd::Zero(da * db, da * db);
    for (auto i : idx) {
      for (auto j : idx) blk(i, j) = rho(i, j);
    }
    const double w = blk.trace().real();
    if (w < 1e-14) continue;
    blk /= w;
    EofBlock b;
    b.sector = policy == SsrPolicy::None ? "all" : SectorLabel{policy, key}.str();
    b.weight = w;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(blk);
    std::vector<Eigen::VectorXcd> weighted;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      double l = es.eigenvalues()(i);
      if (l > 1e-12) weighted.push_back(std::sqrt(l) * es.eigenvectors().col(i));
    }
    b.rank = static_cast<int>(weighted.size());
    if (b.rank == 1) {
      b.upper = b.lower = pure_entropy(weighted[0], da, db);
      b.method = "pure";
    } else if (da == 2 && db == 2) {
      Eigen::Matrix4cd m = blk;
      b.upper = b.lower = eof_from_concurrence(concurrence(m));
      b.method = "concurrence";
    } else {
      b.upper = optimize_roof(weighted, da, db, opt);
      double sab = von_neumann_entropy(blk);
      double sa = von_neumann_entropy(reduce_first(blk, da, db));
      double sb = von_neumann_entropy(reduce_second(blk, da, db));
      b.lower = std::min(b.upper, std::max({0.0, sa - sab, sb - sab}));
      b.method = "optimizer";
      res.exact = false;
    }
    res.value += w * b.upper;
    res.lower += w * b.lower;
    res.blocks.push_back(b);
  }
  return res;
}

}  // namespace

Eigen::MatrixXcd qubit_equivalent(const Ensemble& state, const std::vector<int>& alice,
                                  const std::vector<int>& bob) {
  const Eigen::Index d = (Eigen::Index{1} << alice.size()) * (Eigen::Index{1} << bob.size());
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d, d);
  const double wsum = state.total_weight();
  for (const auto& [w, m] : state.members) {
    Eigen::VectorXcd v = bipartite_vector(m, alice, bob);
    rho += (w / wsum) * v * v.adjoint();
  }
  return rho;
}

EofResult eof_ssr(const Ensemble& state, const std::vector<int>& alice, SsrPolicy policy,
                  const EofOptions& options) {
  auto rep = is_physical(state, policy);
  if (!rep.ok) throw SsrError("eof_ssr: state violates " + to_string(policy) + ": " + rep.diagnostic);
  EofResult res = eof_raw(state, alice, policy, options);
  // A looser rule admits every decomposition of a stricter one.
  for (SsrPolicy stricter : {SsrPolicy::Parity, SsrPolicy::ParticleNumber}) {
    if (static_cast<int>(stricter) <= static_cast<int>(policy)) continue;
    if (!is_physical(state, stricter).ok) continue;
    EofResult s = eof_raw(state, alice, stricter, options);
    if (s.value < res.value) {
      res.value = s.value;
      if (s.exact) res.exact = res.exact && std::abs(res.lower - s.value) < 1e-12;
    }
  }
  res.lower = std::min(res.lower, res.value);
  return res;
}

double concurrence(const Eigen::Matrix4cd& rho) {
  Eigen::Matrix4cd yy = Eigen::Matrix4cd::Zero();
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;
  Eigen::Matrix4cd tilde = yy * rho.conjugate() * yy;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho);
  Eigen::Vector4d sq = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  Eigen::Matrix4cd s = es.eigenvectors() * sq.asDiagonal() * es.eigenvectors().adjoint();
  Eigen::Matrix4cd m = s * tilde * s;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> em((m + m.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
  std::array<double, 4> l;
  for (int i = 0; i < 4; ++i) l[i] = std::sqrt(std::max(em.eigenvalues()(i), 0.0));
  std::sort(l.begin(), l.end(), std::greater<>());
  return std::max(0.0, l[0] - l[1] - l[2] - l[3]);
}

double eof_from_concurrence(double c) {
  c = std::clamp(c, 0.0, 1.0);
  double x = (1.0 + std::sqrt(1.0 - c * c)) / 2.0;
  return shannon_entropy({x, 1.0 - x});
}

Eigen::MatrixXcd partial_transpose(const Eigen::MatrixXcd& rho, int da, int db) {
  if (rho.rows() != da * db || rho.cols() != da * db) throw FockError("partial_transpose: dimension mismatch");
  Eigen::MatrixXcd out(rho.rows(), rho.cols());
  for (int a = 0; a < da; ++a) {
    for (int b = 0; b < db; ++b) {
      for (int a2 = 0; a2 < da; ++a2) {
        for (int b2 = 0; b2 < db; ++b2) out(a * db + b, a2 * db + b2) = rho(a * db + b2, a2 * db + b);
      }
    }
  }
  return out;
}

PptResult ppt_check(const Eigen::MatrixXcd& rho, int da, int db, double tol) {
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10 || std::abs(rho.trace().real() - 1.0) > 1e-9) {
    throw FockError("ppt_check: not a density matrix");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10) throw FockError("ppt_check: not positive semidefinite");
  Eigen::MatrixXcd pt = partial_transpose(rho, da, db);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ep(pt, Eigen::EigenvaluesOnly);
  PptResult r;
  r.min_eigenvalue = ep.eigenvalues().minCoeff();
  r.separable = r.min_eigenvalue >= -tol;
  return r;
}

PptResult ppt_separable_2q(const Eigen::Matrix4cd& rho, double tol) {
  return ppt_check(Eigen::MatrixXcd(rho), 2, 2, tol);
}

double SchmidtVectorSet::total() const {
  double s = 0.0;
  for (const auto& v : vectors) s += std::accumulate(v.values.begin(), v.values.end(), 0.0);
  return s;
}

SchmidtVectorSet schmidt_vectors_ssr(const FockVector& state, const std::vector<int>& alice_in, SsrPolicy policy) {
  if (!state.is_normalized(1e-9)) throw FockError("schmidt_vectors_ssr needs a normalized state");
  auto rep = is_physical(state, policy);
  if (!rep.ok) throw SsrError("schmidt_vectors_ssr: " + rep.diagnostic);
  std::vector<int> alice = alice_in;
  std::sort(alice.begin(), alice.end());
  std::vector<int> bob = complement_modes(state.n_modes(), alice);
  const Eigen::Index da = Eigen::Index{1} << alice.size();
  const Eigen::Index db = Eigen::Index{1} << bob.size();
  Eigen::VectorXcd v = bipartite_vector(state, alice, bob);
  std::map<int, std::vector<Eigen::Index>> rows;
  for (Eigen::Index a = 0; a < da; ++a) {
    int c = popcount(static_cast<Bits>(a));
    rows[policy == SsrPolicy::None ? 0 : policy == SsrPolicy::Parity ? (c & 1) : c].push_back(a);
  }
  SchmidtVectorSet out;
  for (const auto& [key, rs] : rows) {
    Eigen::MatrixXcd m(static_cast<Eigen::Index>(rs.size()), db);
    for (std::size_t i = 0; i < rs.size(); ++i) {
      for (Eigen::Index b = 0; b < db; ++b) m(static_cast<Eigen::Index>(i), b) = v(rs[i] * db + b);
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    SchmidtVector sv{{policy, key}, {}};
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
      double s2 = svd.singularValues()(i) * svd.singularValues()(i);
      if (s2 > 1e-14) sv.values.push_back(s2);
    }
    std::sort(sv.values.begin(), sv.values.end(), std::greater<>());
    if (!sv.values.empty()) out.vectors.push_back(std::move(sv));
  }
  return out;
}

bool majorizes(std::vector<double> x, std::vector<double> y, double tol) {
  std::sort(x.begin(), x.end(), std::greater<>());
  std::sort(y.begin(), y.end(), std::greater<>());
  const std::size_t n = std::max(x.size(), y.size());
  x.resize(n, 0.0);
  y.resize(n, 0.0);
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    if (sx < sy - tol) return false;
  }
  return std::abs(sx - sy) <= 1e-9;
}

std::string to_string(Convertibility c) {
  switch (c) {
    case Convertibility::SourceToTarget: return "source->target";
    case Convertibility::TargetToSource: return "target->source";
    case Convertibility::Both: return "both";
    case Convertibility::Incomparable: return "incomparable";
  }
  return "?";
}

namespace {

std::vector<double> normalized(const std::vector<double>& v) {
  double s = std::accumulate(v.begin(), v.end(), 0.0);
  std::vector<double> out = v;
  for (auto& x : out) x /= s;
  return out;
}

bool convertible(const SchmidtVectorSet& from, const SchmidtVectorSet& to) {
  for (const auto& t : to.vectors) {
    auto it = std::find_if(from.vectors.begin(), from.vectors.end(),
                           [&](const SchmidtVector& f) { return f.sector == t.sector; });
    if (it == from.vectors.end()) return false;
    if (!majorizes(normalized(t.values), normalized(it->values))) return false;
  }
  return true;
}

}  // namespace

MajorizationResult majorization_compare(const SchmidtVectorSet& source, const SchmidtVectorSet& target) {
  MajorizationResult r;
  r.source_to_target = convertible(source, target);
  r.target_to_source = convertible(target, source);
  if (r.source_to_target && r.target_to_source) r.verdict = Convertibility::Both;
  else if (r.source_to_target) r.verdict = Convertibility::SourceToTarget;
  else if (r.target_to_source) r.verdict = Convertibility::TargetToSource;
  else r.verdict = Convertibility::Incomparable;
  return r;
}

MmeState mme_construct(int modes, SsrPolicy policy) {
  if (policy != SsrPolicy::Parity) throw SsrError("MME states are constructed for parity superselection");
  const double r = 1.0 / std::sqrt(2.0);
  auto phi = [&](int a, int b, int n) {
    return from_creation_strings(n, {{r, {}}, {r, {a, b}}}).with_support(bit(a) | bit(b));
  };
  auto psi = [&](int a, int b, int n) {
    return from_creation_strings(n, {{r, {b}}, {r, {a}}}).with_support(bit(a) | bit(b));
  };
  MmeState s;
  s.n_modes = modes;
  s.policy = policy;
  if (modes == 2) {
    s.state = Ensemble({{0.5, phi(0, 1, 2)}, {0.5, psi(0, 1, 2)}});
    s.alice = {0};
    s.bob = {1};
  } else if (modes == 4) {
    FockVector fbit = psi(2, 3, 4);
    s.state = Ensemble({{0.5, wedge(phi(0, 1, 4), fbit)}, {0.5, wedge(psi(0, 1, 4), fbit)}});
    s.alice = {0, 2};
    s.bob = {1, 3};
  } else {
    throw FockError("mme_construct supports 2 or 4 modes");
  }
  return s;
}

FockVector nssr_mme_member(int index, const std::array<int, 3>& a, const std::array<int, 3>& b, int n_modes) {
  const double s = 1.0 / std::sqrt(3.0);
  std::vector<CreationTerm> terms;
  switch (index) {
    case 0: terms = {{s, {a[0], b[0]}}, {s, {a[1], b[1]}}, {s, {a[2], b[2]}}}; break;
    case 1: terms = {{s, {a[0], b[0], b[1]}}, {s, {a[1], b[0], b[2]}}, {s, {a[2], b[1], b[2]}}}; break;
    case 2: terms = {{s, {a[0], a[1], b[0]}}, {s, {a[0], a[2], b[1]}}, {s, {a[1], a[2], b[2]}}}; break;
    case 3:
      terms = {{s, {a[0], a[1], b[0], b[1]}}, {s, {a[0], a[2], b[0], b[2]}}, {s, {a[1], a[2], b[1], b[2]}}};
      break;
    default: throw FockError("nssr_mme_member index must be 0..3");
  }
  std::vector<int> sup{a[0], a[1], a[2], b[0], b[1], b[2]};
  std::sort(sup.begin(), sup.end());
  return from_creation_strings(n_modes, terms).with_support(mask_of(sup));
}

std::vector<FockVector> nssr_mme_members(int n_modes) {
  if (n_modes != 6) throw FockError("nssr_mme_members is defined on 6 modes");
  std::vector<FockVector> out;
  for (int i = 0; i < 4; ++i) out.push_back(nssr_mme_member(i, {0, 1, 2}, {3, 4, 5}, n_modes));
  return out;
}

std::uint64_t d_ssr_max(int n) {
  if (n < 1) throw FockError("d_ssr_max needs n >= 1");
  if (n > 64) throw FockError("d_ssr_max supports n <= 64");
  const int k = n / 2;
  unsigned __int128 r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
  return static_cast<std::uint64_t>(r);
}

}  // namespace fermitele
