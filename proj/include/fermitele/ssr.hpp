#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fermitele/fock.hpp"

namespace fermitele {

enum class SsrPolicy { None, Parity, ParticleNumber };

std::string to_string(SsrPolicy p);
SsrPolicy policy_from_string(const std::string& s);

class SsrError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parity sectors use value 0 (even) and 1 (odd); particle-number sectors use
/// the count itself.
struct SectorLabel {
  SsrPolicy policy = SsrPolicy::Parity;
  int value = 0;

  bool operator==(const SectorLabel&) const = default;
  auto operator<=>(const SectorLabel&) const = default;
  std::string str() const;
};

inline SectorLabel even() { return {SsrPolicy::Parity, 0}; }
inline SectorLabel odd() { return {SsrPolicy::Parity, 1}; }
inline SectorLabel count(int n) { return {SsrPolicy::ParticleNumber, n}; }

/// Sector of the occupation restricted to `modes` (all bits when mask is ~0).
SectorLabel sector_of(Bits occupation, SsrPolicy policy, Bits modes = ~Bits{0});

struct PhysicalityReport {
  bool ok = true;
  std::string diagnostic;
  /// Pairs of basis states carrying amplitudes in different sectors.
  std::vector<std::pair<Bits, Bits>> offending;
  explicit operator bool() const { return ok; }
};

PhysicalityReport is_physical(const FockVector& state, SsrPolicy policy);
PhysicalityReport is_physical(const Ensemble& state, SsrPolicy policy);

/// Checks that the reduced state on `modes` carries no coherence between local
/// sectors.
PhysicalityReport is_locally_physical(const Ensemble& state, const std::vector<int>& modes,
                                      SsrPolicy policy, double tol = 1e-12);

struct SectorComponent {
  double weight;
  SectorLabel label;
  FockVector component;
};

/// Splits a state into normalized single-sector pieces, binning basis states by
/// their sector on `modes`. The original phases are kept, so
/// sum_k sqrt(weight_k) * component_k reproduces the normalized input.
std::vector<SectorComponent> sector_decompose(const FockVector& state, SsrPolicy policy,
                                              Bits modes = ~Bits{0});

struct Projection {
  double probability = 0.0;
  FockVector state;  ///< normalized; zero vector when probability is 0
};

Projection project_sector(const FockVector& state, const std::vector<int>& modes, SsrPolicy policy,
                          SectorLabel label);

/// Sector labels that can occur on `n_modes` modes under `policy`.
std::vector<SectorLabel> sector_labels(SsrPolicy policy, int n_modes);

}  // namespace fermitele
