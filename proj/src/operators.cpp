#include "fermitele/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

namespace fermitele {

FermionOp FermionOp::identity(cplx c) { return FermionOp{{OpTerm{c, {}}}}; }
FermionOp FermionOp::c(int mode) { return FermionOp{{OpTerm{1.0, {{mode, false}}}}}; }
FermionOp FermionOp::cdag(int mode) { return FermionOp{{OpTerm{1.0, {{mode, true}}}}}; }
FermionOp FermionOp::number(int mode) { return cdag(mode) * c(mode); }

FermionOp FermionOp::operator*(const FermionOp& o) const {
  FermionOp out;
  for (const auto& a : terms) {
    for (const auto& b : o.terms) {
      OpTerm t{a.coef * b.coef, a.ops};
      t.ops.insert(t.ops.end(), b.ops.begin(), b.ops.end());
      out.terms.push_back(std::move(t));
    }
  }
  return out;
}

FermionOp FermionOp::operator+(const FermionOp& o) const {
  FermionOp out = *this;
  out.terms.insert(out.terms.end(), o.terms.begin(), o.terms.end());
  return out;
}

FermionOp FermionOp::operator-(const FermionOp& o) const { return *this + o * cplx(-1.0); }

FermionOp FermionOp::operator*(cplx s) const {
  FermionOp out = *this;
  for (auto& t : out.terms) t.coef *= s;
  return out;
}

FermionOp FermionOp::adjoint() const {
  FermionOp out;
  for (const auto& t : terms) {
    OpTerm a{std::conj(t.coef), {}};
    for (auto it = t.ops.rbegin(); it != t.ops.rend(); ++it) a.ops.push_back({it->mode, !it->dagger});
    out.terms.push_back(std::move(a));
  }
  return out;
}

FockVector apply(const FermionOp& op, const FockVector& state) {
  FockVector out(state.n_modes(), state.support());
  for (const auto& t : op.terms) {
    FockVector v = state;
    for (auto it = t.ops.rbegin(); it != t.ops.rend() && !v.terms().empty(); ++it) {
      v = it->dagger ? create(v, it->mode) : annihilate(v, it->mode);
    }
    out = out + v * t.coef;
  }
  return out;
}

Eigen::MatrixXcd local_matrix(const FermionOp& op, const std::vector<int>& modes) {
  if (modes.empty()) throw OperatorError("empty support");
  const int n = *std::max_element(modes.begin(), modes.end()) + 1;
  const Bits mask = mask_of(modes);
  for (const auto& t : op.terms) {
    for (const auto& l : t.ops) {
      if (!(mask & bit(l.mode))) throw OperatorError("operator acts outside the support");
    }
  }
  const std::size_t dim = std::size_t{1} << modes.size();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t col = 0; col < dim; ++col) {
    FockVector v = apply(op, FockVector::basis(n, local_to_bits(col, modes)));
    for (const auto& [occ, a] : v.terms()) m(bits_to_local(occ, modes), col) = a;
  }
  return m;
}

FockVector apply(const LocalOperator& op, const FockVector& state) {
  return apply_local(op.matrix, op.support, state);
}

Ensemble apply(const LocalOperator& op, const Ensemble& state) {
  Ensemble out;
  for (const auto& [w, psi] : state.members) out.members.emplace_back(w, apply(op, psi));
  return out;
}

LocalOperator embed(const LocalOperator& op, const std::vector<int>& support) {
  if (!std::is_sorted(support.begin(), support.end())) throw OperatorError("support must be ascending");
  const Bits big = mask_of(support);
  if ((mask_of(op.support) & ~big) != 0) throw OperatorError("embedding support too small");
  if (support == op.support) return op;
  const int n = support.empty() ? 0 : support.back() + 1;
  const std::size_t dim = std::size_t{1} << support.size();
  LocalOperator out{support, Eigen::MatrixXcd::Zero(dim, dim), op.name};
  for (std::size_t col = 0; col < dim; ++col) {
    FockVector v = apply(op, FockVector::basis(n, local_to_bits(col, support)));
    for (const auto& [occ, a] : v.terms()) out.matrix(bits_to_local(occ, support), col) = a;
  }
  return out;
}

LocalOperator compose(const LocalOperator& a, const LocalOperator& b) {
  std::vector<int> sup = modes_of(mask_of(a.support) | mask_of(b.support));
  LocalOperator ea = embed(a, sup), eb = embed(b, sup);
  std::string name = a.name.empty() || b.name.empty() ? a.name + b.name : a.name + "*" + b.name;
  return {sup, ea.matrix * eb.matrix, name};
}

LocalOperator from_op(const FermionOp& op, const std::vector<int>& support, std::string name) {
  std::vector<int> s = support;
  std::sort(s.begin(), s.end());
  return {s, local_matrix(op, s), std::move(name)};
}

bool is_unitary(const LocalOperator& u, double tol) {
  const auto id = Eigen::MatrixXcd::Identity(u.matrix.rows(), u.matrix.cols());
  return (u.matrix.adjoint() * u.matrix - id).cwiseAbs().maxCoeff() < tol &&
         (u.matrix * u.matrix.adjoint() - id).cwiseAbs().maxCoeff() < tol;
}

std::string to_string(BellLabel b) {
  switch (b) {
    case BellLabel::PhiPlus: return "Phi+";
    case BellLabel::PhiMinus: return "Phi-";
    case BellLabel::PsiPlus: return "Psi+";
    case BellLabel::PsiMinus: return "Psi-";
  }
  return "?";
}

BellLabel bell_from_string(const std::string& s) {
  for (auto b : kBellLabels) {
    if (to_string(b) == s) return b;
  }
  if (s == "phi+") return BellLabel::PhiPlus;
  if (s == "phi-") return BellLabel::PhiMinus;
  if (s == "psi+") return BellLabel::PsiPlus;
  if (s == "psi-") return BellLabel::PsiMinus;
  throw OperatorError("invalid Bell label '" + s + "'");
}

std::string bell_bits(BellLabel b) {
  static const char* codes[] = {"00", "01", "10", "11"};
  return codes[static_cast<int>(b)];
}

bool is_even(BellLabel b) { return b == BellLabel::PhiPlus || b == BellLabel::PhiMinus; }

BellBasis bell_states(int a, int b, int n_modes) {
  if (a == b) throw OperatorError("Bell states need two distinct modes");
  const double r = 1.0 / std::sqrt(2.0);
  const Bits sup = bit(a) | bit(b);
  auto on_pair = [&](const FockVector& v) { return v.with_support(sup); };
  BellBasis out;
  out.states[0] = on_pair(from_creation_strings(n_modes, {{r, {}}, {r, {a, b}}}));
  out.states[1] = on_pair(from_creation_strings(n_modes, {{r, {}}, {-r, {a, b}}}));
  out.states[2] = on_pair(from_creation_strings(n_modes, {{r, {b}}, {r, {a}}}));
  out.states[3] = on_pair(from_creation_strings(n_modes, {{r, {b}}, {-r, {a}}}));
  return out;
}

FermionOp u_pi_op(int b) { return FermionOp::identity() - FermionOp::number(b) * cplx(2.0); }

ModeUnitary u_pi(int b) { return from_op(u_pi_op(b), {b}, "U_pi"); }

FermionOp u_parity_switch_op(int b, int c) {
  return (FermionOp::c(c) + FermionOp::cdag(c)) * (FermionOp::c(b) - FermionOp::cdag(b));
}

ModeUnitary u_parity_switch(int b, int c) {
  if (b == c) throw OperatorError("parity switch needs distinct output and auxiliary modes");
  return from_op(u_parity_switch_op(b, c), {b, c}, "U_P");
}

std::string to_string(CorrectionTag t) {
  switch (t) {
    case CorrectionTag::Identity: return "1";
    case CorrectionTag::UPi: return "U_pi";
    case CorrectionTag::UP: return "U_P";
    case CorrectionTag::UPUPi: return "U_P*U_pi";
  }
  return "?";
}

CorrectionTag correction_for(BellLabel outcome, BellLabel resource) {
  using C = CorrectionTag;
  // rows: outcome Phi+, Phi-, Psi+, Psi-; columns: resource in the same order
  static constexpr C table[4][4] = {
      {C::Identity, C::UPi, C::UP, C::UPUPi},
      {C::UPi, C::Identity, C::UPUPi, C::UP},
      {C::UPUPi, C::UP, C::UPi, C::Identity},
      {C::UP, C::UPUPi, C::Identity, C::UPi},
  };
  return table[static_cast<int>(outcome)][static_cast<int>(resource)];
}

ModeUnitary correction_unitary(CorrectionTag tag, int b, int c) {
  std::vector<int> sup = b < c ? std::vector<int>{b, c} : std::vector<int>{c, b};
  switch (tag) {
    case CorrectionTag::Identity:
      return {sup, Eigen::MatrixXcd::Identity(4, 4), "1"};
    case CorrectionTag::UPi:
      return embed(u_pi(b), sup);
    case CorrectionTag::UP:
      return u_parity_switch(b, c);
    case CorrectionTag::UPUPi: {
      auto u = compose(u_parity_switch(b, c), u_pi(b));
      u.name = "U_P*U_pi";
      return u;
    }
  }
  throw OperatorError("unknown correction tag");
}

LocalOperator involution_hamiltonian(const ModeUnitary& u, double tol) {
  const auto& m = u.matrix;
  const auto id = Eigen::MatrixXcd::Identity(m.rows(), m.cols());
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tol || (m * m - id).cwiseAbs().maxCoeff() > tol) {
    throw OperatorError("operator is not a Hermitian involution");
  }
  return {u.support, (std::numbers::pi / 2.0) * (m - id), "H(" + u.name + ")"};
}

Eigen::MatrixXcd exp_minus_i(const Eigen::MatrixXcd& h) {
  Eigen::MatrixXcd a = cplx(0.0, -1.0) * h;
  return a.exp();
}

Eigen::MatrixXcd involution_exponential(const Eigen::MatrixXcd& u) {
  const double half_pi = std::numbers::pi / 2.0;
  const auto id = Eigen::MatrixXcd::Identity(u.rows(), u.cols());
  // exp(-i(pi/2)(u-1)) = exp(i pi/2) * exp(-i (pi/2) u)
  return cplx(0.0, 1.0) * (std::cos(half_pi) * id - cplx(0.0, std::sin(half_pi)) * u);
}

QuadraticFit is_quadratic_generator(const LocalOperator& h, double tol) {
  const auto& s = h.support;
  std::vector<std::pair<std::string, FermionOp>> basis;
  basis.emplace_back("1", FermionOp::identity());
  for (int i : s) {
    for (int j : s) basis.emplace_back("b" + std::to_string(i) + "^dag b" + std::to_string(j),
                                     FermionOp::cdag(i) * FermionOp::c(j));
  }
  for (std::size_t x = 0; x < s.size(); ++x) {
    for (std::size_t y = x + 1; y < s.size(); ++y) {
      basis.emplace_back("b" + std::to_string(s[x]) + "^dag b" + std::to_string(s[y]) + "^dag",
                         FermionOp::cdag(s[x]) * FermionOp::cdag(s[y]));
      basis.emplace_back("b" + std::to_string(s[x]) + " b" + std::to_string(s[y]),
                         FermionOp::c(s[x]) * FermionOp::c(s[y]));
    }
  }
  const Eigen::Index dim = h.matrix.rows();
  Eigen::MatrixXcd a(dim * dim, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) {
    Eigen::MatrixXcd m = local_matrix(basis[k].second, s);
    a.col(static_cast<Eigen::Index>(k)) = Eigen::Map<Eigen::VectorXcd>(m.data(), dim * dim);
  }
  Eigen::MatrixXcd hm = h.matrix;
  Eigen::VectorXcd rhs = Eigen::Map<Eigen::VectorXcd>(hm.data(), dim * dim);
  Eigen::VectorXcd coef = a.completeOrthogonalDecomposition().solve(rhs);
  QuadraticFit fit;
  fit.residual = (a * coef - rhs).cwiseAbs().maxCoeff();
  fit.quadratic = fit.residual < tol;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    cplx c = coef(static_cast<Eigen::Index>(k));
    if (std::abs(c) > 1e-12) fit.coefficients.emplace_back(basis[k].first, c);
  }
  return fit;
}

}  // namespace fermitele
