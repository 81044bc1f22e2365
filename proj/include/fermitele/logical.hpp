#pragma once

#include <map>
#include <string>
#include <vector>

#include "fermitele/fock.hpp"
#include "fermitele/measurement.hpp"
#include "fermitele/operators.hpp"
#include "fermitele/ssr.hpp"

// Teleportation of a d-dimensional logical subspace through a pure resource
// with d equal Schmidt coefficients, using the generalized Bell basis
// |B_jk> = d^{-1/2} sum_x w^{jx} |in_x> ^ |alice_{x+k}>, w = exp(2 pi i / d).

namespace fermitele {

struct SchmidtTerm {
  double coeff;
  FockVector alice;
  FockVector bob;
};

/// state = sum_x coeff_x alice_x ^ bob_x with coeff descending. Uses the
/// occupation pairing directly when every Alice and Bob occupation occurs once,
/// otherwise an SVD.
std::vector<SchmidtTerm> schmidt_terms(const FockVector& state, const std::vector<int>& alice,
                                       const std::vector<int>& bob, double tol = 1e-12);

/// Outcome labels "j,k" with j major.
ProjectorSet generalized_bell_projectors(const std::vector<FockVector>& in_basis,
                                         const std::vector<FockVector>& alice_basis,
                                         const std::vector<int>& support);

/// Unitary on `support` mapping |src_y> to |dst_y> for every y, completed
/// inside each sector of `policy` so it never mixes sectors.
LocalOperator complete_unitary(const std::vector<FockVector>& src, const std::vector<FockVector>& dst,
                               const std::vector<int>& support, SsrPolicy policy, std::string name = {});

struct LogicalCorrectionSpec {
  std::vector<FockVector> bob_basis;
  std::vector<FockVector> out_basis;
  std::vector<int> support;  ///< Bob's modes, ascending, including the auxiliary mode if any
  int aux = -1;
  int aux_in = 0;
  int aux_out = 0;
  SsrPolicy policy = SsrPolicy::Parity;
};

/// V_jk: |bob_{x+k}> ^ |c_in> -> w^{jx} |out_x> ^ |c_out>.
LocalOperator logical_correction(int j, int k, const LogicalCorrectionSpec& spec);

struct LogicalStep {
  std::vector<int> in_modes;
  std::vector<int> alice_modes;
  std::vector<int> bob_modes;
  int aux = -1;
  std::vector<FockVector> in_basis;
  std::map<int, int> out_map;  ///< input mode -> Bob mode
  SsrPolicy policy = SsrPolicy::Parity;
};

struct LogicalBranch {
  std::string label;
  int j = 0;
  int k = 0;
  double probability = 0.0;
  FockVector pre;
  LocalOperator correction;
  FockVector post;
};

/// Auxiliary occupation Bob must prepare so the output sector can be reached
/// from the resource sector, and the occupation it ends in.
std::pair<int, int> aux_occupations(const FockVector& bob_vector, const FockVector& out_vector,
                                    SsrPolicy policy);

LogicalCorrectionSpec correction_spec(const FockVector& resource, const LogicalStep& step);

/// Runs Alice's generalized Bell measurement on `joint` (input ^ resource, with
/// the auxiliary mode already prepared) and Bob's correction for each outcome.
std::vector<LogicalBranch> logical_teleport(const FockVector& joint, const FockVector& resource,
                                            const LogicalStep& step);

/// Indices of the candidates that bring every pre-correction state to its
/// target on `output_modes` with fidelity at least 1 - tol.
std::vector<std::size_t> matching_corrections(const std::vector<FockVector>& pre,
                                              const std::vector<FockVector>& targets,
                                              const std::vector<LocalOperator>& candidates,
                                              const std::vector<int>& output_modes, double tol = 1e-9);

}  // namespace fermitele
