#pragma once

// Dense Jordan-Wigner reference model. Basis index = occupation bitmask, and
// c_j picks up (-1)^(number of occupied modes below j). Shares no code with the
// library beyond reading FockVector amplitudes.

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fermitele/fock.hpp"

namespace oracle {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using Term = std::pair<cplx, std::vector<int>>;

Mat annihilator(int n, int j);
Mat creator(int n, int j);
Mat number(int n, int j);
Vec vacuum(int n);

/// sum_k coef_k * c^dag_{m_k1} c^dag_{m_k2} ... as an operator.
Mat creation_poly(int n, const std::vector<Term>& terms);
inline Vec state(int n, const std::vector<Term>& terms) { return creation_poly(n, terms) * vacuum(n); }

Vec from_fock(const fermitele::FockVector& v);

/// |x><y| on the modes `k` (ascending): C_x^dag P0 C_y with P0 the vacuum
/// projector of those modes.
Mat transition(int n, const std::vector<int>& k, unsigned x, unsigned y);
/// Operator acting as the local matrix m on the modes k.
Mat embed(int n, const std::vector<int>& k, const Mat& m);

/// rho(x, y) = <psi| (|y><x|) |psi>.
Mat reduced(const Vec& psi, int n, const std::vector<int>& keep);

/// <t|rho|t> for a local vector t.
double fidelity(const Mat& rho, const Vec& t);

}  // namespace oracle
