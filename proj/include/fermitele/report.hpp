#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "fermitele/protocols.hpp"

namespace fermitele {

inline constexpr const char* kSchema = "fermitele/1";

/// Transcript as JSON:
///   schema, protocol, policy, resource, input,
///   register: [{label, party}], output_modes: [label], aux_mode: label | null,
///   target: string | null,
///   branches: [{label, bits, correction, probability, fidelity | null, success,
///               output | null, aux: {occupation, purity} | null, metrics: {}}],
///   success_probability, average_fidelity,
///   tally: {fbits, classical_bits, channel_modes, gaussian_only, resource, note},
///   notes: [string]
/// Reals are rounded to 12 decimals so output is stable across platforms.
nlohmann::json to_json(const Transcript& t);

/// One row per branch, header first.
std::string to_csv(const std::vector<Transcript>& runs);
std::string to_text(const Transcript& t);

struct TableCell {
  std::string row;
  std::string column;
  std::string expected;
  std::string computed;
  bool match = false;
};

struct TableReport {
  std::string title;
  std::vector<std::string> columns;
  std::vector<std::string> rows;
  std::vector<TableCell> cells;
  std::vector<std::string> notes;

  bool ok() const;
  const TableCell& cell(const std::string& row, const std::string& column) const;
};

struct NamedResource {
  std::string name;
  Ensemble state;
  std::vector<int> alice;
  std::vector<int> bob;
};

/// 2-mode MME, 1 fbit, 4-mode ebit, 4-mode MME, 2 fbits, in column order.
std::vector<NamedResource> table_iii_resources();
/// Keys mme2, fbit, ebit, mme4, fbits2, product (vacuum on four modes).
NamedResource named_resource(const std::string& key);

/// Resource costs of the one- and two-mode protocols, regenerated from runs.
TableReport table_ii();
/// EOF, subsystem swap, teleportation and Bell rows for the five resources.
TableReport table_iii();
std::vector<TableReport> emit_tables();

std::string render_text(const TableReport& t);
std::string render_csv(const TableReport& t);
nlohmann::json to_json(const TableReport& t);

}  // namespace fermitele
