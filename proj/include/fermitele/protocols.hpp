#pragma once

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fermitele/fock.hpp"
#include "fermitele/measurement.hpp"
#include "fermitele/operators.hpp"
#include "fermitele/ssr.hpp"

namespace fermitele {

enum class Party { Alice, Bob, Channel };
std::string to_string(Party p);

/// Raised when a protocol step would need a joint operation across parties.
class LocalityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an input or resource violates the active superselection rule.
class PhysicalityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModeSpec {
  std::string label;
  Party party;
};

struct Register {
  std::vector<ModeSpec> modes;

  int n() const { return static_cast<int>(modes.size()); }
  int index(const std::string& label) const;
  std::vector<std::string> labels() const;
  std::vector<int> party_modes(Party p) const;
  /// Throws LocalityError unless every mode in `support` belongs to `p`.
  void require_local(const std::vector<int>& support, Party p, const std::string& step) const;
};

struct ResourceTally {
  int fbits = 0;
  int classical_bits = 0;
  int channel_modes = 0;
  bool gaussian_only = true;
  std::string resource;  ///< short description of the shared state
  std::string note;
};

struct BranchRecord {
  std::string label;
  std::string bits;
  std::string correction;
  double probability = 0.0;
  std::optional<double> fidelity;  ///< absent when the protocol has no target state
  bool success = false;
  std::optional<FockVector> output;  ///< pure output on the output modes, if pure
  double aux_occupation = -1.0;      ///< <n_C> after the branch, -1 without an auxiliary mode
  double aux_purity = -1.0;
  std::map<std::string, double> metrics;
  Ensemble final_state;
  /// Intermediate states in protocol order, for inspection and tests.
  std::vector<std::pair<std::string, Ensemble>> snapshots;
};

struct Transcript {
  std::string protocol;
  SsrPolicy policy = SsrPolicy::Parity;
  std::string resource;
  std::string input;
  Register reg;
  std::vector<int> output_modes;
  int aux_mode = -1;
  std::optional<FockVector> target;
  std::vector<BranchRecord> branches;
  double success_probability = 0.0;
  /// Probability-weighted fidelity including failed branches.
  double average_fidelity = 0.0;
  ResourceTally tally;
  std::vector<std::string> notes;

  double total_probability() const;
};

inline constexpr double kSuccessTolerance = 1e-9;

/// Fills success_probability and average_fidelity from the branch list.
void finalize(Transcript& t);

/// Bits needed to send one of `outcomes` messages.
int bits_for(std::size_t outcomes);
std::string bit_string(std::size_t index, int width);

// ---------------------------------------------------------------- layouts

/// ~A, ~A', spectators S1.., A, B, C.
struct SingleModeLayout {
  Register reg;
  int at, atp;
  std::vector<int> spectators;
  int a, b, c;
  std::vector<int> input_modes() const;
};
SingleModeLayout single_mode_layout(int n_spectators = 0);

/// ~A, ~A', A, B, A', B', C.
struct TwoModeLayout {
  Register reg;
  int at, atp, a, b, ap, bp, c;
};
TwoModeLayout two_mode_layout();

/// ~A, ~A', A, B, B', C. ~A' travels through the channel to B'.
struct HybridLayout {
  Register reg;
  int at, atp, a, b, bp, c;
};
HybridLayout hybrid_layout();

/// ~A, ~A', A, B, A', B'. No auxiliary mode.
struct DualRailLayout {
  Register reg;
  int at, atp, a, b, ap, bp;
};
DualRailLayout dual_rail_layout();

/// ~A (Alice), ~A' (Bob unless stated), A (Alice), B (Bob), C (Bob).
struct SwapLayout {
  Register reg;
  int at, atp, a, b, c;
};
SwapLayout swap_layout(bool atp_with_bob = true);

/// A, B, A', B' with Alice holding A, A'.
struct FourModeLayout {
  Register reg;
  int a, b, ap, bp;
};
FourModeLayout four_mode_layout();

/// ~A ~A' ~A'' | A A' A'' | B B' B'' | C.
struct QutritLayout {
  Register reg;
  std::array<int, 3> in, a, b;
  int c;
};
QutritLayout qutrit_layout();

// ---------------------------------------------------------------- inputs

/// alpha|0> + beta b_x^dag b_y^dag |0> on the pair (x, y).
FockVector even_input(int n_modes, int x, int y, cplx alpha, cplx beta);
/// alpha b_y^dag|0> + beta b_x^dag|0> on the pair (x, y).
FockVector odd_input(int n_modes, int x, int y, cplx alpha, cplx beta);

// ---------------------------------------------------------------- protocols

Transcript teleport_single_mode(const FockVector& input, BellLabel resource, const SingleModeLayout& layout,
                                bool aux_occupied = false);
std::vector<Transcript> teleport_single_mode(const Ensemble& input, BellLabel resource,
                                             const SingleModeLayout& layout);

/// True iff every branch returns the input state on the output modes.
bool entanglement_swap_check(const Transcript& t);
bool entanglement_swap_check(const std::vector<Transcript>& runs);

/// Alice measures the occupation of ~A and Bob prepares B accordingly.
Transcript measure_and_prepare_baseline(const FockVector& input, const SingleModeLayout& layout);

Transcript teleport_two_mode(const FockVector& input, BellLabel r1, BellLabel r2, const TwoModeLayout& layout,
                             bool aux_occupied = false);
Transcript teleport_two_mode_parity_assisted(const FockVector& input, BellLabel r1, BellLabel r2,
                                             const TwoModeLayout& layout);
Transcript teleport_two_mode_hybrid(const FockVector& input, BellLabel resource, const HybridLayout& layout);

Transcript nssr_teleport_single(const FockVector& input, BellLabel resource, const SingleModeLayout& layout);
Transcript nssr_teleport_two_naive(const FockVector& input, BellLabel r1, BellLabel r2,
                                   const TwoModeLayout& layout);
/// (b_A^dag b_B'^dag + b_B^dag b_A'^dag)|0>/sqrt2.
FockVector psi_r_state(const DualRailLayout& layout);
/// Alice's four-outcome basis on (~A, ~A', A, A'), labels Phi_R+, Phi_R-, Psi_R+, Psi_R-.
ProjectorSet psi_r_basis(const DualRailLayout& layout);
Transcript nssr_teleport_psi_r(const FockVector& input, const DualRailLayout& layout);
Transcript nssr_fbits_with_projection(const FockVector& input, const DualRailLayout& layout);

/// Fermionic swap of two modes: b_x <-> b_y.
ModeUnitary mode_swap(int x, int y);
/// Correction word built from "1", "Z_B", "Z_B'", "SWAP" joined by '*'
/// (rightmost acts first).
ModeUnitary psi_r_correction(const std::string& word, const DualRailLayout& layout);
/// Stored outcome -> correction word table for the Psi_R protocol.
const std::map<std::string, std::string>& psi_r_correction_table();

/// Half Phi+ and half Psi+ on (a, b).
Ensemble mme2_state(int a, int b, int n_modes);

Transcript mme_subsystem_swap(const FockVector& input, const Ensemble& resource, const SwapLayout& layout);
Transcript mme_fbit_to_ebit(const FourModeLayout& layout);

enum class QutritResource { N2J1K1, N3J1K2, N3J2K1, N4J2K2 };
inline constexpr std::array<QutritResource, 4> kQutritResources = {
    QutritResource::N2J1K1, QutritResource::N3J1K2, QutritResource::N3J2K1, QutritResource::N4J2K2};
std::string to_string(QutritResource r);
FockVector qutrit_resource(QutritResource r, const QutritLayout& layout);
/// Basis of the one- or two-particle sector of the three input modes.
std::vector<FockVector> qutrit_input_basis(int particles, const QutritLayout& layout);
Transcript nssr_qutrit_teleport(const FockVector& input, const Ensemble& resource, const QutritLayout& layout);

struct ResourceRow {
  int fbits = 0;
  int classical_bits = 0;
  int channel_modes = 0;
  bool gaussian_only = true;
  std::string note;
};
ResourceRow resource_accounting(const Transcript& t);

}  // namespace fermitele
