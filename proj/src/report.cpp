#include "fermitele/report.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "fermitele/entanglement.hpp"
#include "fermitele/logical.hpp"

namespace fermitele {

namespace {

double r12(double x) {
  double r = std::round(x * 1e12) / 1e12;
  return r == 0.0 ? 0.0 : r;
}

std::string num(double x) {
  std::ostringstream os;
  os << std::setprecision(12) << r12(x);
  return os.str();
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

nlohmann::json to_json(const Transcript& t) {
  using nlohmann::json;
  json j;
  j["schema"] = kSchema;
  j["protocol"] = t.protocol;
  j["policy"] = to_string(t.policy);
  j["resource"] = t.resource;
  j["input"] = t.input;
  json reg = json::array();
  for (const auto& m : t.reg.modes) reg.push_back({{"label", m.label}, {"party", to_string(m.party)}});
  j["register"] = reg;
  json outm = json::array();
  for (int m : t.output_modes) outm.push_back(t.reg.modes.at(m).label);
  j["output_modes"] = outm;
  j["aux_mode"] = t.aux_mode >= 0 ? json(t.reg.modes.at(t.aux_mode).label) : json(nullptr);
  j["target"] = t.target ? json(format_state(*t.target, t.reg.labels())) : json(nullptr);
  json branches = json::array();
  for (const auto& b : t.branches) {
    json jb;
    jb["label"] = b.label;
    jb["bits"] = b.bits;
    jb["correction"] = b.correction;
    jb["probability"] = r12(b.probability);
    jb["fidelity"] = b.fidelity ? json(r12(*b.fidelity)) : json(nullptr);
    jb["success"] = b.success;
    jb["output"] = b.output ? json(format_state(*b.output, t.reg.labels())) : json(nullptr);
    jb["aux"] = b.aux_occupation >= 0.0
                    ? json{{"occupation", r12(b.aux_occupation)}, {"purity", r12(b.aux_purity)}}
                    : json(nullptr);
    json metrics = json::object();
    for (const auto& [k, v] : b.metrics) metrics[k] = r12(v);
    jb["metrics"] = metrics;
    branches.push_back(jb);
  }
  j["branches"] = branches;
  j["success_probability"] = r12(t.success_probability);
  j["average_fidelity"] = r12(t.average_fidelity);
  j["tally"] = {{"fbits", t.tally.fbits},
                {"classical_bits", t.tally.classical_bits},
                {"channel_modes", t.tally.channel_modes},
                {"gaussian_only", t.tally.gaussian_only},
                {"resource", t.tally.resource},
                {"note", t.tally.note}};
  j["notes"] = t.notes;
  return j;
}

std::string to_csv(const std::vector<Transcript>& runs) {
  std::ostringstream os;
  os << "run,protocol,policy,resource,branch,bits,correction,probability,fidelity,success,aux_occupation\n";
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto& t = runs[r];
    for (const auto& b : t.branches) {
      os << r << ',' << csv_quote(t.protocol) << ',' << to_string(t.policy) << ',' << csv_quote(t.resource) << ','
         << csv_quote(b.label) << ',' << b.bits << ',' << csv_quote(b.correction) << ',' << num(b.probability)
         << ',' << (b.fidelity ? num(*b.fidelity) : "") << ',' << (b.success ? "1" : "0") << ','
         << (b.aux_occupation >= 0 ? num(b.aux_occupation) : "") << '\n';
    }
  }
  return os.str();
}

std::string to_text(const Transcript& t) {
  std::ostringstream os;
  os << "protocol  " << t.protocol << "  (" << to_string(t.policy) << ")\n";
  os << "resource  " << t.resource << "\n";
  os << "input     " << t.input << "\n";
  os << std::left << std::setw(22) << "branch" << std::setw(7) << "bits" << std::setw(30) << "correction"
     << std::setw(14) << "probability" << std::setw(14) << "fidelity" << "ok\n";
  for (const auto& b : t.branches) {
    os << std::left << std::setw(22) << b.label << std::setw(7) << b.bits << std::setw(30) << b.correction
       << std::setw(14) << num(b.probability) << std::setw(14) << (b.fidelity ? num(*b.fidelity) : "-")
       << (b.success ? "yes" : "no") << "\n";
  }
  os << "success probability  " << num(t.success_probability) << "\n";
  os << "average fidelity     " << num(t.average_fidelity) << "\n";
  os << "tally                " << t.tally.fbits << " fbit(s), " << t.tally.classical_bits << " classical bit(s), "
     << t.tally.channel_modes << " channel mode(s), " << (t.tally.gaussian_only ? "Gaussian" : "non-Gaussian")
     << "\n";
  if (!t.tally.note.empty()) os << "note                 " << t.tally.note << "\n";
  return os.str();
}

bool TableReport::ok() const {
  return std::all_of(cells.begin(), cells.end(), [](const TableCell& c) { return c.match; });
}

const TableCell& TableReport::cell(const std::string& row, const std::string& column) const {
  for (const auto& c : cells) {
    if (c.row == row && c.column == column) return c;
  }
  throw std::out_of_range("no cell " + row + "/" + column);
}

// ---------------------------------------------------------------- Table II

namespace {

std::vector<std::pair<std::string, FockVector>> probe_inputs(int n, int x, int y) {
  return {{"even", even_input(n, x, y, cplx(0.6, 0.0), cplx(0.0, 0.8))},
          {"odd", odd_input(n, x, y, cplx(0.28, -0.96), cplx(1.0, 0.0))}};
}

void add_cell(TableReport& r, const std::string& row, const std::string& col, const std::string& expected,
              const std::string& computed, const std::string& compare_expected = {},
              const std::string& compare_computed = {}) {
  bool match = compare_expected.empty() ? expected == computed : compare_expected == compare_computed;
  r.cells.push_back({row, col, expected, computed, match});
}

std::string channel_cell(int modes) {
  if (modes == 0) return "no";
  return std::to_string(modes) + (modes == 1 ? " mode" : " modes");
}

}  // namespace

TableReport table_ii() {
  TableReport r;
  r.title = "Resources and features of the one- and two-mode teleportation protocols";
  r.columns = {"One mode", "Two modes (1 fbit)", "Two modes (2 fbits)"};
  r.rows = {"fbits", "classical bits", "quantum channel"};

  struct Column {
    std::string name;
    std::vector<Transcript> runs;
    std::array<std::string, 3> expected;
  };
  std::vector<Column> cols(3);
  cols[0].name = r.columns[0];
  cols[0].expected = {"1", "2", "no"};
  {
    auto l = single_mode_layout();
    for (auto& [k, in] : probe_inputs(l.reg.n(), l.at, l.atp)) {
      (void)k;
      cols[0].runs.push_back(teleport_single_mode(in, BellLabel::PhiPlus, l));
    }
  }
  cols[1].name = r.columns[1];
  cols[1].expected = {"1", "2", "1 mode"};
  {
    auto l = hybrid_layout();
    for (auto& [k, in] : probe_inputs(l.reg.n(), l.at, l.atp)) {
      (void)k;
      cols[1].runs.push_back(teleport_two_mode_hybrid(in, BellLabel::PhiPlus, l));
    }
  }
  cols[2].name = r.columns[2];
  cols[2].expected = {"2", "2", "no"};
  {
    auto l = two_mode_layout();
    for (auto& [k, in] : probe_inputs(l.reg.n(), l.at, l.atp)) {
      (void)k;
      cols[2].runs.push_back(teleport_two_mode_parity_assisted(in, BellLabel::PhiPlus, BellLabel::PhiPlus, l));
    }
  }
  for (const auto& c : cols) {
    bool faithful = true;
    for (const auto& t : c.runs) faithful = faithful && std::abs(t.success_probability - 1.0) < 1e-12;
    const std::string flag = faithful ? "" : " (fidelity < 1)";
    ResourceRow row = resource_accounting(c.runs.front());
    add_cell(r, "fbits", c.name, c.expected[0], std::to_string(row.fbits) + flag);
    add_cell(r, "classical bits", c.name, c.expected[1], std::to_string(row.classical_bits) + flag);
    add_cell(r, "quantum channel", c.name, c.expected[2], channel_cell(row.channel_modes) + flag);
  }
  {
    auto l = two_mode_layout();
    auto in = probe_inputs(l.reg.n(), l.at, l.atp)[0].second;
    Transcript t = teleport_two_mode(in, BellLabel::PhiPlus, BellLabel::PhiPlus, l);
    ResourceRow row = resource_accounting(t);
    r.notes.push_back("sequential two-mode variant: " + std::to_string(row.fbits) + " fbits, " +
                      std::to_string(row.classical_bits) + " bits, quantum channel " +
                      channel_cell(row.channel_modes) + ", success probability " + num(t.success_probability) +
                      "; " + row.note);
  }
  r.notes.push_back("the 2-fbit column is the parity-assisted variant and needs non-Gaussian operations");
  return r;
}

// ---------------------------------------------------------------- Table III

namespace {

}  // namespace

std::vector<NamedResource> table_iii_resources() {
  const double s = 1.0 / std::sqrt(2.0);
  std::vector<NamedResource> out;
  MmeState m2 = mme_construct(2);
  out.push_back({"2-mode MME", m2.state, m2.alice, m2.bob});
  out.push_back({"1 fbit", Ensemble(bell_states(0, 1, 2)[BellLabel::PsiPlus]), {0}, {1}});
  // modes A, B, A', B' = 0, 1, 2, 3
  FockVector ebit = from_creation_strings(4, {{s, {1, 3}}, {s, {0, 2}}});
  out.push_back({"4-mode ebit", Ensemble(ebit), {0, 2}, {1, 3}});
  MmeState m4 = mme_construct(4);
  out.push_back({"4-mode MME", m4.state, m4.alice, m4.bob});
  FockVector two = wedge(bell_states(0, 1, 4)[BellLabel::PsiPlus], bell_states(2, 3, 4)[BellLabel::PsiPlus]);
  out.push_back({"2 fbits", Ensemble(two), {0, 2}, {1, 3}});
  return out;
}

NamedResource named_resource(const std::string& key) {
  static const std::vector<std::string> keys = {"mme2", "fbit", "ebit", "mme4", "fbits2"};
  auto all = table_iii_resources();
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (keys[i] == key) return all[i];
  }
  if (key == "product") {
    return {"product", Ensemble(from_creation_strings(4, {{1.0, {}}})), {0, 2}, {1, 3}};
  }
  throw std::invalid_argument("unknown resource '" + key + "'");
}

namespace {

std::string integer_or_real(double v) {
  if (std::abs(v - std::round(v)) < 1e-6) return std::to_string(static_cast<long>(std::round(v)));
  std::ostringstream os;
  os << std::fixed << std::setprecision(6) << v;
  return os.str();
}

/// Number of matched (A_i, B_i) pairs whose reduced state swaps a mode with
/// fidelity 1, and whether a non-Gaussian parity measurement was needed.
std::pair<int, bool> swap_capacity(const NamedResource& c) {
  int count = 0;
  bool non_gaussian = false;
  for (std::size_t i = 0; i < c.alice.size(); ++i) {
    const int a = c.alice[i], b = c.bob[i];
    if (a > b) continue;
    DensityView rho = partial_trace(c.state, {a, b});
    SwapLayout sl = swap_layout(true);
    const int n = sl.reg.n();
    Ensemble members;
    bool usable = true;
    for (auto idx : {std::vector<int>{0, 3}, std::vector<int>{1, 2}}) {
      Eigen::MatrixXcd blk = Eigen::MatrixXcd::Zero(4, 4);
      for (int x : idx) {
        for (int y : idx) blk(x, y) = rho.matrix(x, y);
      }
      const double w = blk.trace().real();
      if (w < 1e-12) continue;
      blk /= w;
      if ((blk * blk).trace().real() < 1.0 - 1e-9) {
        usable = false;
        break;
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(blk);
      members.members.emplace_back(w, from_local(es.eigenvectors().col(3), {sl.a, sl.b}, n, 1e-13));
    }
    if (!usable || members.members.empty()) continue;
    bool ok = true;
    try {
      std::vector<Transcript> runs;
      if (members.is_pure()) {
        // single-mode teleportation with the pure pair
        SingleModeLayout l = single_mode_layout();
        std::optional<BellLabel> lab;
        BellBasis bb = bell_states(sl.a, sl.b, n);
        for (auto bl : kBellLabels) {
          if (fidelity(bb[bl], members.members[0].second) > 1.0 - 1e-9) lab = bl;
        }
        if (!lab) throw PhysicalityError("pair is not a Bell state");
        for (auto& [k, in] : probe_inputs(l.reg.n(), l.at, l.atp)) {
          (void)k;
          runs.push_back(teleport_single_mode(in, *lab, l));
        }
      } else {
        for (auto& [k, in] : probe_inputs(n, sl.at, sl.atp)) {
          (void)k;
          runs.push_back(mme_subsystem_swap(in, members, sl));
        }
        non_gaussian = true;
      }
      for (const auto& t : runs) ok = ok && std::abs(t.success_probability - 1.0) < 1e-12;
    } catch (const PhysicalityError&) {
      ok = false;
    }
    if (ok) ++count;
  }
  return {count, non_gaussian};
}

/// Qubits teleportable after Alice's local parity measurement: log2 of the
/// smallest Schmidt rank over the resulting branches.
std::pair<int, bool> teleport_qubits(const NamedResource& c) {
  std::size_t min_rank = SIZE_MAX;
  for (const auto& br : parity_measure(c.state, c.alice)) {
    if (!br.possible()) continue;
    for (const auto& [w, m] : br.post_state.members) {
      (void)w;
      min_rank = std::min(min_rank, schmidt_terms(m, c.alice, c.bob).size());
    }
  }
  int q = 0;
  while ((std::size_t{2} << q) <= min_rank) ++q;
  return {q, !c.state.is_pure() && q > 0};
}

}  // namespace

TableReport table_iii() {
  TableReport r;
  r.title = "Comparison of ebits, fbits and MME states";
  r.rows = {"EOF", "subsystem swap", "teleportation # of qubits", "Bell inequ. violation"};
  const std::vector<std::array<std::string, 4>> expected = {{"1", "1 mode†", "0", "No"},
                                                            {"1", "1 mode", "0", "Yes*"},
                                                            {"2", "---", "1", "Yes"},
                                                            {"2", "2 modes†", "1†", "Yes*†"},
                                                            {"2", "2 modes", "1", "Yes"}};
  auto cols = table_iii_resources();
  for (std::size_t ci = 0; ci < cols.size(); ++ci) {
    const auto& c = cols[ci];
    r.columns.push_back(c.name);
    const auto& ex = expected[ci];

    EofResult e = eof_ssr(c.state, c.alice, SsrPolicy::Parity);
    add_cell(r, "EOF", c.name, ex[0], integer_or_real(e.value));

    auto [modes, dag] = swap_capacity(c);
    std::string swap = modes == 0 ? "---" : channel_cell(modes);
    if (modes > 0 && dag) swap += "†";
    add_cell(r, "subsystem swap", c.name, ex[1], swap);

    auto [q, qdag] = teleport_qubits(c);
    add_cell(r, "teleportation # of qubits", c.name, ex[2], std::to_string(q) + (qdag ? "†" : ""));

    const int da = 1 << c.alice.size(), db = 1 << c.bob.size();
    PptResult ppt = ppt_check(qubit_equivalent(c.state, c.alice, c.bob), da, db);
    std::string bell = ppt.separable ? "No" : "Yes";
    if (!ppt.separable && !c.state.is_pure()) bell += "†";
    // '*' (two copies needed) is documentary and not regenerated.
    std::string ex_cmp = ex[3];
    if (auto p = ex_cmp.find('*'); p != std::string::npos) ex_cmp.erase(p, 1);
    add_cell(r, "Bell inequ. violation", c.name, ex[3], bell, ex_cmp, bell);
  }
  r.notes.push_back("† marks a mixed resource that needs a local parity measurement (non-Gaussian)");
  r.notes.push_back("* (two coherent copies needed) is carried over as documentation; the Bell row is "
                    "regenerated from the partial-transpose test of the qubit-equivalent state");
  r.notes.push_back("EOF is the parity-superselected entanglement of formation in bits");
  return r;
}

std::vector<TableReport> emit_tables() { return {table_ii(), table_iii()}; }

std::string render_text(const TableReport& t) {
  std::ostringstream os;
  os << t.title << "\n";
  std::size_t w0 = 28, w = 24;
  os << std::left << std::setw(static_cast<int>(w0)) << "";
  for (const auto& c : t.columns) os << std::setw(static_cast<int>(w)) << c;
  os << "\n";
  for (const auto& row : t.rows) {
    os << std::left << std::setw(static_cast<int>(w0)) << row;
    for (const auto& col : t.columns) {
      const auto& c = t.cell(row, col);
      std::string s = c.computed + (c.match ? "" : " [expected " + c.expected + "]");
      // pad by code points so the dagger does not shift columns
      std::size_t cps = 0;
      for (unsigned char ch : s) cps += (ch & 0xC0) != 0x80;
      os << s << std::string(cps < w ? w - cps : 1, ' ');
    }
    os << "\n";
  }
  for (const auto& n : t.notes) os << "  note: " << n << "\n";
  std::size_t bad = 0;
  for (const auto& c : t.cells) bad += !c.match;
  os << (bad == 0 ? "  all cells match\n" : "  MISMATCH in " + std::to_string(bad) + " cell(s)\n");
  return os.str();
}

std::string render_csv(const TableReport& t) {
  std::ostringstream os;
  os << "table,row,column,expected,computed,match\n";
  for (const auto& c : t.cells) {
    os << csv_quote(t.title) << ',' << csv_quote(c.row) << ',' << csv_quote(c.column) << ',' << csv_quote(c.expected)
       << ',' << csv_quote(c.computed) << ',' << (c.match ? "1" : "0") << '\n';
  }
  return os.str();
}

nlohmann::json to_json(const TableReport& t) {
  nlohmann::json j;
  j["title"] = t.title;
  j["columns"] = t.columns;
  j["rows"] = t.rows;
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : t.cells) {
    cells.push_back({{"row", c.row},
                     {"column", c.column},
                     {"expected", c.expected},
                     {"computed", c.computed},
                     {"match", c.match}});
  }
  j["cells"] = cells;
  j["notes"] = t.notes;
  j["ok"] = t.ok();
  return j;
}

}  // namespace fermitele
