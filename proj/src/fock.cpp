#include "fermitele/fock.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace fermitele {

namespace {

std::atomic<int> g_mode_cap{16};

void check_register_size(int n) {
  if (n < 0 || n > mode_cap() || n > 63) {
    throw FockError("register size " + std::to_string(n) + " outside [0, " +
                    std::to_string(mode_cap()) + "]");
  }
}

Bits full_mask(int n) { return n >= 64 ? ~Bits{0} : (bit(n) - 1); }

void check_mode(const FockVector& s, int mode) {
  if (mode < 0 || mode >= s.n_modes() || !(s.support() & bit(mode))) {
    throw FockError("mode " + std::to_string(mode) + " out of range");
  }
}

void check_ascending(const std::vector<int>& modes, int n) {
  for (std::size_t i = 0; i < modes.size(); ++i) {
    if (modes[i] < 0 || modes[i] >= n) throw FockError("mode out of range");
    if (i > 0 && modes[i] <= modes[i - 1]) throw FockError("mode list must be strictly ascending");
  }
}

}  // namespace

int mode_cap() { return g_mode_cap.load(); }
void set_mode_cap(int cap) {
  if (cap < 1 || cap > 63) throw FockError("mode cap must lie in [1, 63]");
  g_mode_cap.store(cap);
}

Bits mask_of(const std::vector<int>& modes) {
  Bits m = 0;
  for (int k : modes) m |= bit(k);
  return m;
}

std::vector<int> modes_of(Bits mask) {
  std::vector<int> out;
  for (int k = 0; mask; ++k, mask >>= 1) {
    if (mask & 1) out.push_back(k);
  }
  return out;
}

int front_sign(Bits occ, Bits sub) {
  Bits moving = occ & sub;
  Bits staying = occ & ~sub;
  int swaps = 0;
  while (moving) {
    int s = __builtin_ctzll(moving);
    swaps += popcount(staying & (bit(s) - 1));
    moving &= moving - 1;
  }
  return (swaps & 1) ? -1 : 1;
}

FockVector::FockVector(int n_modes) : FockVector(n_modes, full_mask(n_modes)) {}

FockVector::FockVector(int n_modes, Bits support) : n_(n_modes), support_(support) {
  check_register_size(n_modes);
  if (support & ~full_mask(n_modes)) throw FockError("support exceeds register");
}

FockVector FockVector::vacuum(int n_modes) { return basis(n_modes, 0); }

FockVector FockVector::vacuum(int n_modes, Bits support) {
  FockVector v(n_modes, support);
  v.amps_[0] = 1.0;
  return v;
}

FockVector FockVector::basis(int n_modes, Bits occupation) {
  FockVector v(n_modes);
  if (occupation & ~full_mask(n_modes)) throw FockError("occupation exceeds register");
  v.amps_[occupation] = 1.0;
  return v;
}

cplx FockVector::amplitude(Bits occupation) const {
  auto it = amps_.find(occupation);
  return it == amps_.end() ? cplx{} : it->second;
}

void FockVector::add(Bits occupation, cplx value) {
  if (occupation & ~support_) throw FockError("occupation outside support");
  amps_[occupation] += value;
}

FockVector FockVector::pruned(double threshold) const {
  FockVector out(n_, support_);
  for (const auto& [k, a] : amps_) {
    if (std::abs(a) >= threshold) out.amps_.emplace(k, a);
  }
  return out;
}

FockVector FockVector::with_support(Bits support) const {
  FockVector out(n_, support);
  for (const auto& [k, a] : amps_) out.add(k, a);
  return out;
}

double FockVector::norm() const {
  double s = 0.0;
  for (const auto& kv : amps_) s += std::norm(kv.second);
  return std::sqrt(s);
}

bool FockVector::is_zero(double tol) const { return norm() < tol; }

bool FockVector::is_normalized(double tol) const { return std::abs(norm() - 1.0) < tol; }

FockVector FockVector::normalized() const {
  double nrm = norm();
  if (nrm < kPruneThreshold) throw FockError("cannot normalize a zero vector");
  return (*this * cplx(1.0 / nrm)).pruned();
}

FockVector FockVector::operator+(const FockVector& o) const {
  if (o.n_ != n_) throw FockError("register mismatch");
  FockVector out(n_, support_ | o.support_);
  for (const auto& [k, a] : amps_) out.add(k, a);
  for (const auto& [k, a] : o.amps_) out.add(k, a);
  return out.pruned();
}

FockVector FockVector::operator-(const FockVector& o) const { return *this + o * cplx(-1.0); }

FockVector FockVector::operator*(cplx s) const {
  FockVector out(n_, support_);
  for (const auto& [k, a] : amps_) out.amps_.emplace(k, a * s);
  return out.pruned();
}

FockVector from_creation_strings(int n_modes, const std::vector<CreationTerm>& terms) {
  FockVector out(n_modes);
  for (const auto& t : terms) {
    FockVector v = FockVector::vacuum(n_modes);
    for (auto it = t.modes.rbegin(); it != t.modes.rend(); ++it) v = create(v, *it);
    out = out + v * t.coef;
  }
  return out;
}

FockVector create(const FockVector& state, int mode) {
  check_mode(state, mode);
  FockVector out(state.n_modes(), state.support());
  for (const auto& [occ, a] : state.terms()) {
    if (occ & bit(mode)) continue;
    double sign = (popcount(occ & (bit(mode) - 1)) & 1) ? -1.0 : 1.0;
    out.add(occ | bit(mode), a * sign);
  }
  return out.pruned();
}

FockVector annihilate(const FockVector& state, int mode) {
  check_mode(state, mode);
  FockVector out(state.n_modes(), state.support());
  for (const auto& [occ, a] : state.terms()) {
    if (!(occ & bit(mode))) continue;
    double sign = (popcount(occ & (bit(mode) - 1)) & 1) ? -1.0 : 1.0;
    out.add(occ & ~bit(mode), a * sign);
  }
  return out.pruned();
}

FockVector wedge(const FockVector& a, const FockVector& b) {
  if (a.n_modes() != b.n_modes()) throw FockError("register size mismatch in wedge");
  if (a.support() & b.support()) throw FockError("overlapping registers in wedge");
  FockVector out(a.n_modes(), a.support() | b.support());
  for (const auto& [x, ax] : a.terms()) {
    for (const auto& [y, by] : b.terms()) {
      // string x then string y; count pairs (i in x, j in y) with j < i
      int swaps = 0;
      Bits yy = y;
      while (yy) {
        int j = __builtin_ctzll(yy);
        swaps += popcount(x & ~(bit(j + 1) - 1));
        yy &= yy - 1;
      }
      out.add(x | y, ax * by * ((swaps & 1) ? -1.0 : 1.0));
    }
  }
  return out.pruned();
}

cplx inner(const FockVector& a, const FockVector& b) {
  if (a.n_modes() != b.n_modes()) throw FockError("register mismatch in inner");
  cplx s{};
  const auto& small = a.size() <= b.size() ? a.terms() : b.terms();
  const bool a_small = a.size() <= b.size();
  for (const auto& [k, v] : small) {
    cplx w = a_small ? b.amplitude(k) : a.amplitude(k);
    s += a_small ? std::conj(v) * w : std::conj(w) * v;
  }
  return s;
}

FockVector relabel(const FockVector& state, const std::map<int, int>& mapping) {
  const int n = state.n_modes();
  Bits new_support = 0;
  for (int k : modes_of(state.support())) {
    auto it = mapping.find(k);
    new_support |= bit(it == mapping.end() ? k : it->second);
  }
  FockVector out(n, new_support);
  for (const auto& [occ, a] : state.terms()) {
    FockVector v = FockVector::vacuum(n, new_support);
    auto modes = modes_of(occ);
    for (auto it = modes.rbegin(); it != modes.rend(); ++it) {
      auto m = mapping.find(*it);
      v = create(v, m == mapping.end() ? *it : m->second);
    }
    if (v.is_zero()) throw FockError("relabel maps two occupied modes onto one");
    for (const auto& [o, b] : v.terms()) out.add(o, a * b);
  }
  return out.pruned();
}

int Ensemble::n_modes() const {
  if (members.empty()) throw FockError("empty ensemble");
  return members.front().second.n_modes();
}

double Ensemble::total_weight() const {
  double s = 0.0;
  for (const auto& m : members) s += m.first;
  return s;
}

bool DensityView::is_valid(double tol) const {
  if (std::abs(trace() - 1.0) > tol) return false;
  if ((matrix - matrix.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(matrix, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() > -tol;
}

Bits local_to_bits(std::size_t local, const std::vector<int>& modes) {
  Bits occ = 0;
  for (std::size_t j = 0; j < modes.size(); ++j) {
    if (local & (std::size_t{1} << j)) occ |= bit(modes[j]);
  }
  return occ;
}

std::size_t bits_to_local(Bits occ, const std::vector<int>& modes) {
  std::size_t local = 0;
  for (std::size_t j = 0; j < modes.size(); ++j) {
    if (occ & bit(modes[j])) local |= std::size_t{1} << j;
  }
  return local;
}

namespace {

void accumulate_trace(const FockVector& state, const std::vector<int>& keep, double weight,
                      Eigen::MatrixXcd& rho) {
  const Bits kmask = mask_of(keep);
  std::map<Bits, std::vector<std::pair<std::size_t, cplx>>> by_rest;
  for (const auto& [occ, a] : state.terms()) {
    by_rest[occ & ~kmask].emplace_back(bits_to_local(occ & kmask, keep),
                                       a * double(front_sign(occ, kmask)));
  }
  for (const auto& [rest, list] : by_rest) {
    for (const auto& [i, ai] : list) {
      for (const auto& [j, aj] : list) rho(i, j) += weight * ai * std::conj(aj);
    }
  }
}

}  // namespace

DensityView partial_trace(const FockVector& state, const std::vector<int>& keep) {
  return partial_trace(Ensemble(state), keep);
}

DensityView partial_trace(const Ensemble& state, const std::vector<int>& keep) {
  if (keep.empty()) throw FockError("partial_trace needs a non-empty keep set");
  const int n = state.n_modes();
  std::vector<int> sorted = keep;
  std::sort(sorted.begin(), sorted.end());
  check_ascending(sorted, n);
  const std::size_t dim = std::size_t{1} << sorted.size();
  DensityView out{sorted, Eigen::MatrixXcd::Zero(dim, dim)};
  for (const auto& [w, psi] : state.members) {
    if (psi.n_modes() != n) throw FockError("ensemble members on different registers");
    accumulate_trace(psi, sorted, w, out.matrix);
  }
  return out;
}

double fidelity(const FockVector& a, const FockVector& b) { return std::norm(inner(a, b)); }

double fidelity(const FockVector& a, const DensityView& rho) {
  Eigen::VectorXcd v = to_local(a, rho.modes);
  if (static_cast<std::size_t>(v.size()) != rho.dim()) throw FockError("dimension mismatch");
  return (v.adjoint() * rho.matrix * v)(0, 0).real();
}

Eigen::VectorXcd to_local(const FockVector& state, const std::vector<int>& modes) {
  check_ascending(modes, state.n_modes());
  const Bits m = mask_of(modes);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(std::size_t{1} << modes.size());
  for (const auto& [occ, a] : state.terms()) {
    if (occ & ~m) throw FockError("state has occupation outside the requested modes");
    v(bits_to_local(occ, modes)) = a;
  }
  return v;
}

FockVector from_local(const Eigen::VectorXcd& v, const std::vector<int>& modes, int n_modes,
                      double threshold) {
  check_ascending(modes, n_modes);
  if (static_cast<std::size_t>(v.size()) != (std::size_t{1} << modes.size())) {
    throw FockError("dimension mismatch");
  }
  FockVector out(n_modes, mask_of(modes));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) >= threshold) out.add(local_to_bits(i, modes), v(i));
  }
  return out;
}

FockVector apply_local(const Eigen::MatrixXcd& m, const std::vector<int>& modes,
                       const FockVector& state) {
  check_ascending(modes, state.n_modes());
  const std::size_t dim = std::size_t{1} << modes.size();
  if (static_cast<std::size_t>(m.rows()) != dim || static_cast<std::size_t>(m.cols()) != dim) {
    throw FockError("local matrix does not match support size");
  }
  const Bits mask = mask_of(modes);
  FockVector out(state.n_modes(), state.support() | mask);
  for (const auto& [occ, a] : state.terms()) {
    const Bits rest = occ & ~mask;
    const std::size_t col = bits_to_local(occ & mask, modes);
    const double s1 = front_sign(occ, mask);
    for (std::size_t row = 0; row < dim; ++row) {
      cplx e = m(row, col);
      if (e == cplx{}) continue;
      Bits target = local_to_bits(row, modes) | rest;
      out.add(target, e * a * s1 * double(front_sign(target, mask)));
    }
  }
  return out.pruned();
}

FockVector extract_pure(const DensityView& rho, int n_modes, double tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.matrix);
  const Eigen::Index top = rho.matrix.rows() - 1;
  double lmax = es.eigenvalues()(top);
  if (std::abs(lmax - rho.trace()) > tol) throw FockError("reduced state is not pure");
  Eigen::VectorXcd v = es.eigenvectors().col(top);
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  v *= std::abs(v(imax)) / v(imax);
  return from_local(v, rho.modes, n_modes, 1e-12);
}

std::string format_state(const FockVector& state, const std::vector<std::string>& labels) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [occ, a] : state.terms()) {
    if (!first) os << " + ";
    first = false;
    char buf[64];
    if (std::abs(a.imag()) < 1e-12) {
      std::snprintf(buf, sizeof buf, "%.6g", a.real());
    } else {
      std::snprintf(buf, sizeof buf, "(%.6g%+.6gi)", a.real(), a.imag());
    }
    os << buf << "|";
    if (occ == 0) os << "0";
    bool sep = false;
    for (int k : modes_of(occ)) {
      if (sep) os << ",";
      sep = true;
      if (k < static_cast<int>(labels.size())) {
        os << labels[k];
      } else {
        os << k;
      }
    }
    os << ">";
  }
  if (first) os << "0";
  return os.str();
}

}  // namespace fermitele
