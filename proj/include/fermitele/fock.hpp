#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace fermitele {

using cplx = std::complex<double>;
using Bits = std::uint64_t;

inline constexpr double kPruneThreshold = 1e-14;

/// Thrown for malformed arguments: out-of-range modes, overlapping registers,
/// mismatched dimensions.
class FockError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Largest register accepted by any constructor. Defaults to 16.
int mode_cap();
void set_mode_cap(int cap);

inline Bits bit(int mode) { return Bits{1} << mode; }
inline int popcount(Bits b) { return __builtin_popcountll(b); }
Bits mask_of(const std::vector<int>& modes);
std::vector<int> modes_of(Bits mask);

/// Parity of the number of transpositions needed to move the occupied modes of
/// `sub` in front of every other occupied mode of `occ`, keeping relative order.
/// Returns +1 or -1.
int front_sign(Bits occ, Bits sub);

/// Exact pure state of `n_modes` fermionic modes. Keys are occupation bitmasks
/// (bit i = mode i), values are amplitudes of the canonically ordered creation
/// string b_{i1}^dag b_{i2}^dag ... |0> with i1 < i2 < ...
///
/// `support` is the register the state lives on; modes outside it are always
/// empty. Two states can be wedged only if their supports are disjoint.
class FockVector {
 public:
  FockVector() = default;
  explicit FockVector(int n_modes);
  FockVector(int n_modes, Bits support);

  static FockVector vacuum(int n_modes);
  static FockVector vacuum(int n_modes, Bits support);
  static FockVector basis(int n_modes, Bits occupation);

  int n_modes() const { return n_; }
  Bits support() const { return support_; }
  const std::map<Bits, cplx>& terms() const { return amps_; }
  std::size_t size() const { return amps_.size(); }

  cplx amplitude(Bits occupation) const;
  /// Accumulates without pruning. Call `pruned()` afterwards.
  void add(Bits occupation, cplx value);

  FockVector pruned(double threshold = kPruneThreshold) const;
  FockVector with_support(Bits support) const;
  double norm() const;
  bool is_zero(double tol = kPruneThreshold) const;
  bool is_normalized(double tol = 1e-12) const;
  FockVector normalized() const;

  FockVector operator+(const FockVector& o) const;
  FockVector operator-(const FockVector& o) const;
  FockVector operator*(cplx s) const;
  friend FockVector operator*(cplx s, const FockVector& v) { return v * s; }

 private:
  int n_ = 0;
  Bits support_ = 0;
  std::map<Bits, cplx> amps_;
};

/// Builds sum_k coef_k * b_{m_k1}^dag b_{m_k2}^dag ... |0>. Mode lists are in the
/// written operator order, so {B, A'} means b_B^dag b_A'^dag |0>.
struct CreationTerm {
  cplx coef;
  std::vector<int> modes;
};
FockVector from_creation_strings(int n_modes, const std::vector<CreationTerm>& terms);

FockVector create(const FockVector& state, int mode);
FockVector annihilate(const FockVector& state, int mode);

/// Joint state of a on R1 followed by b on R2 (a's creation polynomial applied
/// last), canonicalized. R1 and R2 must be disjoint.
FockVector wedge(const FockVector& a, const FockVector& b);

cplx inner(const FockVector& a, const FockVector& b);

/// Moves mode k to mapping[k] for every k with mapping[k] >= 0, keeping the
/// creation-string order of the source state. Unmapped modes must be empty.
FockVector relabel(const FockVector& state, const std::map<int, int>& mapping);

/// Mixed state as a weighted list of pure members.
struct Ensemble {
  std::vector<std::pair<double, FockVector>> members;

  Ensemble() = default;
  explicit Ensemble(FockVector pure) { members.emplace_back(1.0, std::move(pure)); }
  Ensemble(std::vector<std::pair<double, FockVector>> m) : members(std::move(m)) {}

  int n_modes() const;
  double total_weight() const;
  bool is_pure() const { return members.size() == 1; }
};

/// Reduced density matrix on `modes` (ascending). Row/column index bit j is the
/// occupation of modes[j].
struct DensityView {
  std::vector<int> modes;
  Eigen::MatrixXcd matrix;

  std::size_t dim() const { return static_cast<std::size_t>(matrix.rows()); }
  double trace() const { return matrix.trace().real(); }
  double purity() const { return (matrix * matrix).trace().real(); }
  bool is_valid(double tol = 1e-10) const;
};

/// Reduced state computed after moving the traced modes behind the kept ones
/// with the corresponding sign.
DensityView partial_trace(const FockVector& state, const std::vector<int>& keep);
DensityView partial_trace(const Ensemble& state, const std::vector<int>& keep);

double fidelity(const FockVector& a, const FockVector& b);
double fidelity(const FockVector& a, const DensityView& rho);

/// Amplitude vector in the local occupation basis of `modes` for a state living
/// on those modes only.
Eigen::VectorXcd to_local(const FockVector& state, const std::vector<int>& modes);
FockVector from_local(const Eigen::VectorXcd& v, const std::vector<int>& modes, int n_modes,
                      double threshold = kPruneThreshold);
Bits local_to_bits(std::size_t local, const std::vector<int>& modes);
std::size_t bits_to_local(Bits occ, const std::vector<int>& modes);

/// Applies a matrix given in the local occupation basis of `modes` to a state on
/// the full register: the support modes are moved to the front of every
/// creation string, the matrix acts there, and the string is moved back.
FockVector apply_local(const Eigen::MatrixXcd& m, const std::vector<int>& modes,
                       const FockVector& state);

/// Pure state on `modes` when the reduced state is rank one (phase fixed so the
/// largest amplitude is real positive). Throws if the reduced state is mixed.
FockVector extract_pure(const DensityView& rho, int n_modes, double tol = 1e-9);

std::string format_state(const FockVector& state, const std::vector<std::string>& labels = {});

}  // namespace fermitele
