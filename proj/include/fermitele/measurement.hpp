#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fermitele/fock.hpp"
#include "fermitele/ssr.hpp"

namespace fermitele {

class MeasurementError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct OutcomeBranch {
  std::string label;
  double probability = 0.0;
  FockVector post_state;  ///< normalized, or the zero vector when probability is 0

  bool possible(double tol = 1e-14) const { return probability > tol; }
};

struct EnsembleBranch {
  std::string label;
  double probability = 0.0;
  Ensemble post_state;  ///< member weights sum to 1 when possible

  bool possible(double tol = 1e-14) const { return probability > tol; }
};

/// Orthogonal projectors on a mode subset, in the local occupation basis of
/// `support`.
struct ProjectorSet {
  std::vector<int> support;
  std::vector<std::string> labels;
  std::vector<Eigen::MatrixXcd> projectors;
  bool complete = false;
};

/// Projectors onto the spans of the given vectors (each list orthonormal and
/// living on `support`). Completeness is detected, not declared.
ProjectorSet make_projector_set(const std::vector<int>& support,
                                const std::vector<std::pair<std::string, std::vector<FockVector>>>& ranges);

/// Throws unless every element is a Hermitian projector and the set is
/// pairwise orthogonal.
void validate(const ProjectorSet& set, double tol = 1e-12);

std::vector<OutcomeBranch> measure(const FockVector& state, const ProjectorSet& set);
std::vector<EnsembleBranch> measure(const Ensemble& state, const ProjectorSet& set);

ProjectorSet bell_projectors(int a, int b, int n_modes);
/// Outcomes in the order Phi+, Phi-, Psi+, Psi-.
std::vector<OutcomeBranch> bell_measure(const FockVector& state, int a, int b);
std::vector<EnsembleBranch> bell_measure(const Ensemble& state, int a, int b);

/// {|0><0|, |1_a 1_b><1_a 1_b|, Psi+, Psi-}: the Bell measurement restricted to
/// outcomes of definite particle number. Labels "0", "11", "Psi+", "Psi-".
ProjectorSet number_resolved_bell_projectors(int a, int b, int n_modes);
/// {Psi+, Psi-, even}; the last element has rank two.
ProjectorSet three_outcome_povm(int a, int b, int n_modes);

/// Labels "even", "odd".
std::vector<OutcomeBranch> parity_measure(const FockVector& state, const std::vector<int>& modes);
std::vector<EnsembleBranch> parity_measure(const Ensemble& state, const std::vector<int>& modes);
/// Labels "0", "1", ..., one per particle count.
std::vector<OutcomeBranch> number_measure(const FockVector& state, const std::vector<int>& modes);
std::vector<EnsembleBranch> number_measure(const Ensemble& state, const std::vector<int>& modes);

/// Draws branch indices by inverse CDF from a seeded 64-bit Mersenne twister.
class BranchSampler {
 public:
  explicit BranchSampler(std::uint64_t seed) : rng_(seed) {}
  std::size_t draw(const std::vector<double>& probabilities);
  std::size_t draw(const std::vector<OutcomeBranch>& branches);
  double uniform();

 private:
  std::mt19937_64 rng_;
};

const OutcomeBranch& sample(const std::vector<OutcomeBranch>& branches, std::uint64_t seed);

}  // namespace fermitele
