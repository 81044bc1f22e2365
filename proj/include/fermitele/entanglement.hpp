#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fermitele/fock.hpp"
#include "fermitele/ssr.hpp"

namespace fermitele {

/// Shannon entropy in bits of a probability vector (zeros ignored).
double shannon_entropy(const std::vector<double>& p);
/// von Neumann entropy in bits.
double von_neumann_entropy(const Eigen::MatrixXcd& rho);

/// Entropy of the reduced state on `side`. The state must be normalized.
double entanglement_entropy(const FockVector& state, const std::vector<int>& side);

/// Density matrix with the `alice` modes moved in front of the `bob` modes, as a
/// (2^|alice| x 2^|bob|)-dimensional bipartite operator: row index
/// a * 2^|bob| + b with a, b local occupation indices.
Eigen::MatrixXcd qubit_equivalent(const Ensemble& state, const std::vector<int>& alice,
                                  const std::vector<int>& bob);

struct EofBlock {
  std::string sector;
  double weight = 0.0;
  int rank = 0;
  double upper = 0.0;
  double lower = 0.0;
  std::string method;  ///< "pure", "concurrence", "optimizer"
};

struct EofResult {
  double value = 0.0;  ///< upper bound, reported as the estimate
  double lower = 0.0;
  bool exact = false;
  std::vector<EofBlock> blocks;
};

struct EofOptions {
  int starts = 32;
  int max_iterations = 400;
  std::uint64_t seed = 20240611;
};

/// Convex roof of the entanglement entropy over pure-state decompositions whose
/// members obey `policy`. `alice` is one side of the cut; the other side is
/// every remaining mode of the register.
EofResult eof_ssr(const Ensemble& state, const std::vector<int>& alice, SsrPolicy policy,
                  const EofOptions& options = {});

/// Wootters formula for a 4x4 two-qubit density matrix.
double concurrence(const Eigen::Matrix4cd& rho);
double eof_from_concurrence(double c);

struct PptResult {
  bool separable = false;
  double min_eigenvalue = 0.0;
};

/// Partial transpose on the second factor of a dA x dB bipartite matrix.
Eigen::MatrixXcd partial_transpose(const Eigen::MatrixXcd& rho, int da, int db);
PptResult ppt_check(const Eigen::MatrixXcd& rho, int da, int db, double tol = 1e-12);
/// Necessary and sufficient at 2 x 2. Throws for an invalid density matrix.
PptResult ppt_separable_2q(const Eigen::Matrix4cd& rho, double tol = 1e-12);

struct SchmidtVector {
  SectorLabel sector;
  std::vector<double> values;  ///< squared Schmidt coefficients, descending
};

struct SchmidtVectorSet {
  std::vector<SchmidtVector> vectors;
  double total() const;
};

/// One vector per occupied local sector on the `alice` side.
SchmidtVectorSet schmidt_vectors_ssr(const FockVector& state, const std::vector<int>& alice, SsrPolicy policy);

/// True iff x majorizes y (both normalized, padded with zeros).
bool majorizes(std::vector<double> x, std::vector<double> y, double tol = 1e-12);

enum class Convertibility { SourceToTarget, TargetToSource, Both, Incomparable };
std::string to_string(Convertibility c);

struct MajorizationResult {
  bool source_to_target = false;
  bool target_to_source = false;
  Convertibility verdict = Convertibility::Incomparable;
};

/// Pure-state conversion by SSR-respecting local operations: possible when every
/// sector the target occupies is occupied in the source and each normalized
/// target vector majorizes the normalized source vector of the same sector.
MajorizationResult majorization_compare(const SchmidtVectorSet& source, const SchmidtVectorSet& target);

struct MmeState {
  Ensemble state;
  int n_modes = 0;
  SsrPolicy policy = SsrPolicy::Parity;
  std::vector<int> alice;
  std::vector<int> bob;
};

/// 2 modes: (A, B). 4 modes: (A, B, A', B') with the fbit on (A', B').
MmeState mme_construct(int modes, SsrPolicy policy = SsrPolicy::Parity);

/// |n;j,k> for index 0..3 = |2;1,1>, |3;1,2>, |3;2,1>, |4;2,2>.
FockVector nssr_mme_member(int index, const std::array<int, 3>& a, const std::array<int, 3>& b, int n_modes);
/// The four states on A, A', A'' = 0, 1, 2 and B, B', B'' = 3, 4, 5.
std::vector<FockVector> nssr_mme_members(int n_modes = 6);

/// C(n, floor(n/2)).
std::uint64_t d_ssr_max(int n);

}  // namespace fermitele
