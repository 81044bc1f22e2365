#pragma once

#include <array>
#include <string>
#include <vector>

#include "fermitele/fock.hpp"

namespace fermitele {

/// One creation (dagger) or annihilation operator.
struct Ladder {
  int mode;
  bool dagger;
};

/// coef * op_1 op_2 ... op_k, acting right to left.
struct OpTerm {
  cplx coef;
  std::vector<Ladder> ops;
};

/// Polynomial in the mode operators.
struct FermionOp {
  std::vector<OpTerm> terms;

  static FermionOp identity(cplx c = 1.0);
  static FermionOp c(int mode);
  static FermionOp cdag(int mode);
  static FermionOp number(int mode);

  FermionOp operator*(const FermionOp& o) const;
  FermionOp operator+(const FermionOp& o) const;
  FermionOp operator-(const FermionOp& o) const;
  FermionOp operator*(cplx s) const;
  FermionOp adjoint() const;
};

FockVector apply(const FermionOp& op, const FockVector& state);

/// Matrix of `op` in the local occupation basis of `modes` (ascending). Every
/// mode used by `op` must be in `modes`.
Eigen::MatrixXcd local_matrix(const FermionOp& op, const std::vector<int>& modes);

/// Operator acting on a set of modes, stored as a dense matrix in the local
/// occupation basis of `support` and extended to larger registers by moving the
/// support modes to the front of each creation string.
struct LocalOperator {
  std::vector<int> support;
  Eigen::MatrixXcd matrix;
  std::string name;
};
using ModeUnitary = LocalOperator;

FockVector apply(const LocalOperator& op, const FockVector& state);
Ensemble apply(const LocalOperator& op, const Ensemble& state);

/// Same operator written on a larger (ascending) support.
LocalOperator embed(const LocalOperator& op, const std::vector<int>& support);
/// a * b, i.e. b acts first.
LocalOperator compose(const LocalOperator& a, const LocalOperator& b);
LocalOperator from_op(const FermionOp& op, const std::vector<int>& support, std::string name = {});
bool is_unitary(const LocalOperator& u, double tol = 1e-12);

enum class BellLabel { PhiPlus = 0, PhiMinus = 1, PsiPlus = 2, PsiMinus = 3 };
inline constexpr std::array<BellLabel, 4> kBellLabels = {BellLabel::PhiPlus, BellLabel::PhiMinus,
                                                         BellLabel::PsiPlus, BellLabel::PsiMinus};
std::string to_string(BellLabel b);
BellLabel bell_from_string(const std::string& s);
/// Two-bit code: Phi+ 00, Phi- 01, Psi+ 10, Psi- 11.
std::string bell_bits(BellLabel b);
bool is_even(BellLabel b);

struct BellBasis {
  std::array<FockVector, 4> states;
  const FockVector& operator[](BellLabel b) const { return states[static_cast<int>(b)]; }
};

/// Phi(+/-) = (1 +/- b_a^dag b_b^dag)|0>/sqrt2, Psi(+/-) = (b_b^dag +/- b_a^dag)|0>/sqrt2.
/// States live on the two-mode register {a, b} of an n-mode space.
BellBasis bell_states(int a, int b, int n_modes);

/// exp(i pi b^dag b).
ModeUnitary u_pi(int b);
FermionOp u_pi_op(int b);
/// (b_c + b_c^dag)(b_b - b_b^dag).
ModeUnitary u_parity_switch(int b, int c);
FermionOp u_parity_switch_op(int b, int c);

enum class CorrectionTag { Identity = 0, UPi = 1, UP = 2, UPUPi = 3 };
inline constexpr std::array<CorrectionTag, 4> kCorrectionTags = {
    CorrectionTag::Identity, CorrectionTag::UPi, CorrectionTag::UP, CorrectionTag::UPUPi};
std::string to_string(CorrectionTag t);

/// Stored correction for (measured outcome, shared resource).
CorrectionTag correction_for(BellLabel outcome, BellLabel resource);
/// The unitary for a tag with output mode b and auxiliary mode c. U_P U_pi
/// applies U_pi first.
ModeUnitary correction_unitary(CorrectionTag tag, int b, int c);

class OperatorError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// H = (pi/2)(u - 1) for a Hermitian involution u.
LocalOperator involution_hamiltonian(const ModeUnitary& u, double tol = 1e-12);
/// exp(-i H) by scaling and squaring.
Eigen::MatrixXcd exp_minus_i(const Eigen::MatrixXcd& h);
/// exp(-i (pi/2)(u - 1)) written as i (cos(pi/2) 1 - i sin(pi/2) u).
Eigen::MatrixXcd involution_exponential(const Eigen::MatrixXcd& u);

struct QuadraticFit {
  bool quadratic = false;
  double residual = 0.0;
  std::vector<std::pair<std::string, cplx>> coefficients;  ///< nonzero ones only
};

/// Least-squares fit of h against {1, b_i^dag b_j, b_i^dag b_j^dag, b_i b_j} on
/// the support of h.
QuadraticFit is_quadratic_generator(const LocalOperator& h, double tol = 1e-10);

}  // namespace fermitele
