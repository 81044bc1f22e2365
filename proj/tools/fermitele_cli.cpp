// fermitele: run teleportation scenarios and regenerate the resource tables.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "fermitele/entanglement.hpp"
#include "fermitele/measurement.hpp"
#include "fermitele/protocols.hpp"
#include "fermitele/report.hpp"

using namespace fermitele;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kUsage = 1, kPhysicality = 2, kMismatch = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  std::string scenario;
  std::string format = "text";
  std::string output;
  std::string alpha = "0.6,0";
  std::string beta = "0.8,0";
  bool random = false;
  std::optional<std::uint64_t> seed;
  int trials = 1;
  int grid = 0;
  int workers = 0;
  std::string parity = "even";
  std::string resource = "Phi+";
  std::string resource1 = "Phi+";
  std::string resource2 = "Phi+";
  bool aux_occupied = false;
  int spectators = 0;
  bool alice_holds_atp = false;
  int sample = 0;
  std::string qutrit_resource = "mix";
  int particles = 1;
  std::string state = "mme2";
  std::string policy = "parity";
  std::string source = "fbit";
  std::string target = "ebit";
};

cplx parse_complex(const std::string& s) {
  std::stringstream ss(s);
  std::string re, im;
  std::getline(ss, re, ',');
  std::getline(ss, im);
  try {
    std::size_t used = 0;
    double r = std::stod(re, &used);
    if (used != re.size()) throw std::invalid_argument(s);
    double i = 0.0;
    if (!im.empty()) {
      i = std::stod(im, &used);
      if (used != im.size()) throw std::invalid_argument(s);
    }
    return {r, i};
  } catch (const std::exception&) {
    throw UsageError("cannot parse complex number '" + s + "' (expected re,im)");
  }
}

struct Amplitudes {
  std::string tag;
  cplx alpha, beta;
};

std::vector<Amplitudes> amplitude_set(const Config& c) {
  std::vector<Amplitudes> out;
  if (c.grid > 0) {
    const double pi = std::acos(-1.0);
    for (int i = 0; i < c.grid; ++i) {
      const double theta = 0.5 * pi * (i + 0.5) / c.grid;
      for (int j = 0; j < c.grid; ++j) {
        const double phi = 2.0 * pi * j / c.grid;
        out.push_back({"grid " + std::to_string(i) + "," + std::to_string(j), std::cos(theta),
                       std::sin(theta) * std::polar(1.0, phi)});
      }
    }
    return out;
  }
  if (c.random) {
    if (!c.seed) throw UsageError("--random needs --seed");
    std::mt19937_64 rng(*c.seed);
    std::normal_distribution<double> g;
    for (int t = 0; t < c.trials; ++t) {
      cplx a(g(rng), g(rng)), b(g(rng), g(rng));
      const double n = std::sqrt(std::norm(a) + std::norm(b));
      out.push_back({"random " + std::to_string(t), a / n, b / n});
    }
    return out;
  }
  cplx a = parse_complex(c.alpha), b = parse_complex(c.beta);
  const double n = std::sqrt(std::norm(a) + std::norm(b));
  if (n == 0.0) throw UsageError("alpha and beta are both zero");
  if (std::abs(n - 1.0) > 1e-12) {
    std::cerr << "warning: (alpha, beta) has norm " << n << ", normalizing\n";
  }
  out.push_back({"explicit", a / n, b / n});
  return out;
}

/// Input on (x, y) with the requested parity; "mixed" superposes the two parities.
FockVector make_input(const Config& c, const Amplitudes& a, const std::string& parity, int n, int x, int y) {
  if (parity == "even") return even_input(n, x, y, a.alpha, a.beta);
  if (parity == "odd") return odd_input(n, x, y, a.alpha, a.beta);
  if (parity == "mixed") {
    FockVector v(n);
    v.add(0, a.alpha);
    v.add(Bits{1} << x, a.beta);
    return v;
  }
  (void)c;
  throw UsageError("--parity must be even, odd, both or mixed");
}

std::vector<std::string> parities(const Config& c) {
  if (c.parity == "both") return {"even", "odd"};
  return {c.parity};
}

BellLabel bell(const std::string& s) {
  try {
    return bell_from_string(s);
  } catch (const std::exception&) {
    throw UsageError("unknown Bell label '" + s + "' (Phi+, Phi-, Psi+, Psi-)");
  }
}

/// Runs `job` for every (amplitude, parity) pair. Grid sweeps fan out over
/// worker threads; results keep the enumeration order.
std::vector<Transcript> sweep(const Config& c,
                              const std::function<Transcript(const Amplitudes&, const std::string&)>& job) {
  std::vector<std::pair<Amplitudes, std::string>> tasks;
  for (const auto& a : amplitude_set(c)) {
    for (const auto& p : parities(c)) tasks.emplace_back(a, p);
  }
  std::vector<Transcript> out(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  unsigned w = c.workers > 0 ? static_cast<unsigned>(c.workers) : std::max(1u, std::thread::hardware_concurrency());
  if (c.grid == 0 || tasks.size() < 2) w = 1;
  w = std::min<unsigned>(w, static_cast<unsigned>(tasks.size()));
  auto run = [&](unsigned id) {
    for (std::size_t i = id; i < tasks.size(); i += w) {
      try {
        out[i] = job(tasks[i].first, tasks[i].second);
        out[i].input = tasks[i].first.tag + " " + tasks[i].second + ": " + out[i].input;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned id = 1; id < w; ++id) pool.emplace_back(run, id);
  run(0);
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

/// Replaces the enumerated branch list by `n` sampled outcomes.
void apply_sampling(const Config& c, std::vector<Transcript>& runs) {
  if (c.sample <= 0) return;
  if (!c.seed) throw UsageError("--sample needs --seed");
  for (std::size_t r = 0; r < runs.size(); ++r) {
    Transcript& t = runs[r];
    std::vector<double> p;
    for (const auto& b : t.branches) p.push_back(b.probability);
    BranchSampler sampler(*c.seed + r);
    std::map<std::size_t, int> hits;
    for (int i = 0; i < c.sample; ++i) ++hits[sampler.draw(p)];
    std::vector<BranchRecord> kept;
    for (auto [idx, n] : hits) {
      BranchRecord b = t.branches[idx];
      b.metrics["samples"] = n;
      b.probability = static_cast<double>(n) / c.sample;
      kept.push_back(std::move(b));
    }
    t.branches = std::move(kept);
    finalize(t);
    t.notes.push_back("sampled " + std::to_string(c.sample) + " shots, seed " + std::to_string(*c.seed + r));
  }
}

std::vector<Transcript> run_protocol(const Config& c) {
  const std::string& s = c.scenario;
  if (s == "teleport-single" || s == "nssr-single") {
    auto l = single_mode_layout(c.spectators);
    return sweep(c, [&](const Amplitudes& a, const std::string& p) {
      FockVector in = make_input(c, a, p, l.reg.n(), l.at, l.atp);
      if (s == "nssr-single") return nssr_teleport_single(in, bell(c.resource), l);
      return teleport_single_mode(in, bell(c.resource), l, c.aux_occupied);
    });
  }
  if (s == "teleport-two" || s == "teleport-two-parity" || s == "nssr-two-naive") {
    auto l = two_mode_layout();
    return sweep(c, [&](const Amplitudes& a, const std::string& p) {
      FockVector in = make_input(c, a, p, l.reg.n(), l.at, l.atp);
      if (s == "teleport-two") return teleport_two_mode(in, bell(c.resource1), bell(c.resource2), l, c.aux_occupied);
      if (s == "nssr-two-naive") return nssr_teleport_two_naive(in, bell(c.resource1), bell(c.resource2), l);
      return teleport_two_mode_parity_assisted(in, bell(c.resource1), bell(c.resource2), l);
    });
  }
  if (s == "teleport-hybrid") {
    auto l = hybrid_layout();
    return sweep(c, [&](const Amplitudes& a, const std::string& p) {
      return teleport_two_mode_hybrid(make_input(c, a, p, l.reg.n(), l.at, l.atp), bell(c.resource), l);
    });
  }
  if (s == "nssr-psi-r" || s == "nssr-projected") {
    auto l = dual_rail_layout();
    return sweep(c, [&](const Amplitudes& a, const std::string& p) {
      FockVector in = make_input(c, a, p, l.reg.n(), l.at, l.atp);
      return s == "nssr-psi-r" ? nssr_teleport_psi_r(in, l) : nssr_fbits_with_projection(in, l);
    });
  }
  if (s == "mme-swap") {
    auto l = swap_layout(!c.alice_holds_atp);
    Ensemble res = mme2_state(l.a, l.b, l.reg.n());
    return sweep(c, [&](const Amplitudes& a, const std::string& p) {
      return mme_subsystem_swap(make_input(c, a, p, l.reg.n(), l.at, l.atp), res, l);
    });
  }
  if (s == "mme-fbit-to-ebit") return {mme_fbit_to_ebit(four_mode_layout())};
  if (s == "nssr-qutrit") {
    auto l = qutrit_layout();
    Ensemble res;
    if (c.qutrit_resource == "mix") {
      for (auto r : kQutritResources) res.members.emplace_back(0.25, qutrit_resource(r, l));
    } else {
      bool found = false;
      for (auto r : kQutritResources) {
        if (to_string(r) == c.qutrit_resource) {
          res = Ensemble(qutrit_resource(r, l));
          found = true;
        }
      }
      if (!found) {
        throw UsageError("unknown qutrit resource '" + c.qutrit_resource + "' (2;1,1 3;1,2 3;2,1 4;2,2 mix)");
      }
    }
    if (c.particles != 1 && c.particles != 2) throw UsageError("--particles must be 1 or 2");
    auto basis = qutrit_input_basis(c.particles, l);
    std::vector<FockVector> inputs;
    if (c.random) {
      if (!c.seed) throw UsageError("--random needs --seed");
      std::mt19937_64 rng(*c.seed);
      std::normal_distribution<double> g;
      for (int t = 0; t < c.trials; ++t) {
        FockVector v(l.reg.n());
        double norm = 0.0;
        std::vector<cplx> z;
        for (std::size_t k = 0; k < basis.size(); ++k) {
          z.emplace_back(g(rng), g(rng));
          norm += std::norm(z.back());
        }
        for (std::size_t k = 0; k < basis.size(); ++k) v = v + basis[k] * (z[k] / std::sqrt(norm));
        inputs.push_back(v);
      }
    } else {
      inputs = basis;
      FockVector v(l.reg.n());
      for (const auto& b : basis) v = v + b * cplx(1.0 / std::sqrt(static_cast<double>(basis.size())), 0.0);
      inputs.push_back(v);
    }
    std::vector<Transcript> out;
    for (const auto& in : inputs) out.push_back(nssr_qutrit_teleport(in, res, l));
    return out;
  }
  throw UsageError("unknown scenario '" + s + "'");
}

std::string fmt(double x) {
  double r = std::round(x * 1e12) / 1e12;
  std::ostringstream os;
  os << std::setprecision(12) << (r == 0.0 ? 0.0 : r);
  return os.str();
}

json summary(const std::vector<Transcript>& runs) {
  double ps = 0.0, fs = 0.0, pmin = 1.0;
  for (const auto& t : runs) {
    ps += t.success_probability;
    fs += t.average_fidelity;
    pmin = std::min(pmin, t.success_probability);
  }
  const double n = static_cast<double>(runs.size());
  json j = {{"runs", runs.size()},
            {"success_probability_mean", std::round(ps / n * 1e12) / 1e12},
            {"success_probability_min", std::round(pmin * 1e12) / 1e12},
            {"average_fidelity_mean", std::round(fs / n * 1e12) / 1e12}};
  const auto& t = runs.front().tally;
  j["tally"] = {{"fbits", t.fbits},
                {"classical_bits", t.classical_bits},
                {"channel_modes", t.channel_modes},
                {"gaussian_only", t.gaussian_only}};
  return j;
}

std::string render_runs(const Config& c, const std::vector<Transcript>& runs) {
  if (c.format == "json") {
    json j = {{"schema", kSchema}, {"scenario", c.scenario}};
    j["runs"] = json::array();
    for (const auto& t : runs) j["runs"].push_back(to_json(t));
    j["summary"] = summary(runs);
    return j.dump(2) + "\n";
  }
  if (c.format == "csv") return to_csv(runs);
  std::string out;
  for (const auto& t : runs) out += to_text(t) + "\n";
  json s = summary(runs);
  out += "runs " + std::to_string(runs.size()) + ", mean success probability " +
         fmt(s["success_probability_mean"].get<double>()) + ", mean fidelity " +
         fmt(s["average_fidelity_mean"].get<double>()) + "\n";
  return out;
}

std::string render_tables(const Config& c, const std::vector<TableReport>& tables) {
  if (c.format == "json") {
    json j = {{"schema", kSchema}, {"scenario", "tables"}, {"tables", json::array()}};
    bool ok = true;
    for (const auto& t : tables) {
      j["tables"].push_back(to_json(t));
      ok = ok && t.ok();
    }
    j["ok"] = ok;
    return j.dump(2) + "\n";
  }
  std::string out;
  for (std::size_t i = 0; i < tables.size(); ++i) {
    if (c.format == "csv") {
      std::string s = render_csv(tables[i]);
      out += i == 0 ? s : s.substr(s.find('\n') + 1);
    } else {
      out += render_text(tables[i]) + "\n";
    }
  }
  return out;
}

std::string run_eof(const Config& c) {
  NamedResource r = named_resource(c.state);
  SsrPolicy pol = policy_from_string(c.policy);
  EofResult e = eof_ssr(r.state, r.alice, pol);
  if (c.format == "json") {
    json j = {{"schema", kSchema}, {"scenario", "eof"},       {"state", r.name},
              {"policy", to_string(pol)}, {"value", std::round(e.value * 1e9) / 1e9},
              {"lower", std::round(e.lower * 1e9) / 1e9}, {"exact", e.exact}};
    j["blocks"] = json::array();
    for (const auto& b : e.blocks) {
      j["blocks"].push_back({{"sector", b.sector},
                             {"weight", std::round(b.weight * 1e12) / 1e12},
                             {"rank", b.rank},
                             {"upper", std::round(b.upper * 1e9) / 1e9},
                             {"lower", std::round(b.lower * 1e9) / 1e9},
                             {"method", b.method}});
    }
    return j.dump(2) + "\n";
  }
  std::ostringstream os;
  if (c.format == "csv") {
    os << "state,policy,sector,weight,rank,upper,lower,method\n";
    for (const auto& b : e.blocks) {
      os << c.state << ',' << to_string(pol) << ',' << b.sector << ',' << fmt(b.weight) << ',' << b.rank << ','
         << fmt(b.upper) << ',' << fmt(b.lower) << ',' << b.method << '\n';
    }
    return os.str();
  }
  os << "EOF(" << r.name << ", " << to_string(pol) << ") = " << std::setprecision(9) << e.value
     << (e.exact ? "" : "  (upper bound; lower bound " + fmt(e.lower) + ")") << "\n";
  for (const auto& b : e.blocks) {
    os << "  sector " << b.sector << "  weight " << fmt(b.weight) << "  rank " << b.rank << "  " << b.method
       << "  " << fmt(b.upper) << "\n";
  }
  return os.str();
}

std::string run_majorize(const Config& c) {
  auto pure = [](const std::string& key) {
    NamedResource r = named_resource(key);
    if (!r.state.is_pure()) throw UsageError("'" + key + "' is not a pure state");
    return std::make_pair(r, r.state.members.front().second);
  };
  auto [rs, vs] = pure(c.source);
  auto [rt, vt] = pure(c.target);
  SsrPolicy pol = policy_from_string(c.policy);
  SchmidtVectorSet s = schmidt_vectors_ssr(vs, rs.alice, pol);
  SchmidtVectorSet t = schmidt_vectors_ssr(vt, rt.alice, pol);
  MajorizationResult m = majorization_compare(s, t);
  auto vec_json = [](const SchmidtVectorSet& v) {
    json a = json::array();
    for (const auto& x : v.vectors) {
      json vals = json::array();
      for (double y : x.values) vals.push_back(std::round(y * 1e12) / 1e12);
      a.push_back({{"sector", x.sector.str()}, {"values", vals}});
    }
    return a;
  };
  if (c.format == "json") {
    json j = {{"schema", kSchema},          {"scenario", "majorize"},
              {"source", c.source},         {"target", c.target},
              {"policy", to_string(pol)},   {"source_vectors", vec_json(s)},
              {"target_vectors", vec_json(t)}, {"verdict", to_string(m.verdict)}};
    return j.dump(2) + "\n";
  }
  if (c.format == "csv") {
    return "source,target,policy,verdict\n" + c.source + "," + c.target + "," + to_string(pol) + "," +
           to_string(m.verdict) + "\n";
  }
  std::ostringstream os;
  auto show = [&](const char* name, const SchmidtVectorSet& v) {
    os << name;
    for (const auto& x : v.vectors) {
      os << "  " << x.sector.str() << ":(";
      for (std::size_t i = 0; i < x.values.size(); ++i) os << (i ? ", " : "") << fmt(x.values[i]);
      os << ")";
    }
    os << "\n";
  };
  show("source", s);
  show("target", t);
  os << "verdict " << to_string(m.verdict) << "\n";
  return os.str();
}

void emit(const Config& c, const std::string& text) {
  std::string path = c.output;
  if (path.empty()) {
    if (const char* dir = std::getenv("FERMITELE_OUTPUT_DIR"); dir && *dir) {
      const std::string ext = c.format == "json" ? ".json" : c.format == "csv" ? ".csv" : ".txt";
      std::filesystem::create_directories(dir);
      path = (std::filesystem::path(dir) / (c.scenario + ext)).string();
    }
  }
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fermionic teleportation scenarios under superselection rules"};
  app.require_subcommand(1);
  Config c;

  auto common = [&](CLI::App* s) {
    s->add_option("--format", c.format, "json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}));
    s->add_option("--output,-o", c.output, "output file (default: stdout, or $FERMITELE_OUTPUT_DIR/<scenario>)");
  };
  auto inputs = [&](CLI::App* s) {
    s->add_option("--alpha", c.alpha, "amplitude alpha as re,im");
    s->add_option("--beta", c.beta, "amplitude beta as re,im");
    s->add_flag("--random", c.random, "random amplitudes (needs --seed)");
    s->add_option("--seed", c.seed, "seed for --random and --sample");
    s->add_option("--trials", c.trials, "number of random inputs")->check(CLI::PositiveNumber);
    s->add_option("--grid", c.grid, "K x K magnitude-phase sweep")->check(CLI::PositiveNumber);
    s->add_option("--workers", c.workers, "threads for grid sweeps (default: hardware)");
    s->add_option("--parity", c.parity, "input parity: even, odd, both, mixed");
    s->add_option("--sample", c.sample, "sample N outcomes instead of enumerating")->check(CLI::PositiveNumber);
  };

  struct Sub {
    const char* name;
    const char* help;
  };
  const std::vector<Sub> protocol_subs = {
      {"teleport-single", "one-mode teleportation with one fbit"},
      {"teleport-two", "two-mode teleportation, two sequential single-mode steps"},
      {"teleport-two-parity", "two-mode teleportation with a parity-assisted correction"},
      {"teleport-hybrid", "one fbit plus one channel mode"},
      {"nssr-single", "one-mode protocol under particle-number superselection"},
      {"nssr-two-naive", "two sequential one-mode steps under particle-number superselection"},
      {"nssr-psi-r", "four-mode Psi_R resource under particle-number superselection"},
      {"nssr-projected", "two fbits with a number projection"},
      {"mme-swap", "subsystem swap with the two-mode MME state"},
  };
  for (const auto& sub : protocol_subs) {
    CLI::App* s = app.add_subcommand(sub.name, sub.help);
    common(s);
    inputs(s);
    const std::string n = sub.name;
    if (n == "teleport-single" || n == "nssr-single" || n == "teleport-hybrid") {
      s->add_option("--resource", c.resource, "Bell resource: Phi+, Phi-, Psi+, Psi-");
    }
    if (n == "teleport-single") s->add_option("--spectators", c.spectators, "extra Alice modes before A");
    if (n == "teleport-single" || n == "teleport-two") s->add_flag("--aux-occupied", c.aux_occupied);
    if (n == "teleport-two" || n == "teleport-two-parity" || n == "nssr-two-naive") {
      s->add_option("--resource1", c.resource1, "Bell resource on (A, B)");
      s->add_option("--resource2", c.resource2, "Bell resource on (A', B')");
    }
    if (n == "mme-swap") s->add_flag("--alice-holds-partner", c.alice_holds_atp, "give ~A' to Alice (rejected)");
  }
  CLI::App* fe = app.add_subcommand("mme-fbit-to-ebit", "convert the four-mode MME state into an ebit");
  common(fe);
  CLI::App* qt = app.add_subcommand("nssr-qutrit", "qutrit teleportation with |n;j,k> resources");
  common(qt);
  qt->add_option("--resource", c.qutrit_resource, "2;1,1, 3;1,2, 3;2,1, 4;2,2 or mix");
  qt->add_option("--particles", c.particles, "input particle number (1 or 2)");
  qt->add_flag("--random", c.random, "random superposition inputs (needs --seed)");
  qt->add_option("--seed", c.seed);
  qt->add_option("--trials", c.trials)->check(CLI::PositiveNumber);
  CLI::App* tb = app.add_subcommand("tables", "regenerate the resource comparison tables");
  common(tb);
  CLI::App* ef = app.add_subcommand("eof", "superselected entanglement of formation");
  common(ef);
  ef->add_option("--state", c.state, "mme2, mme4, fbit, ebit, fbits2");
  ef->add_option("--policy", c.policy, "none, parity, number");
  CLI::App* mj = app.add_subcommand("majorize", "pure-state convertibility by majorization");
  common(mj);
  mj->add_option("--source", c.source, "fbit, ebit, product, fbits2");
  mj->add_option("--target", c.target, "fbit, ebit, product, fbits2");
  mj->add_option("--policy", c.policy, "none, parity, number");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }
  c.scenario = app.get_subcommands().front()->get_name();

  try {
    if (c.scenario == "tables") {
      auto tables = emit_tables();
      emit(c, render_tables(c, tables));
      for (const auto& t : tables) {
        if (!t.ok()) {
          std::cerr << "error: table regression mismatch in '" << t.title << "'\n";
          return kMismatch;
        }
      }
      return kOk;
    }
    if (c.scenario == "eof") {
      emit(c, run_eof(c));
      return kOk;
    }
    if (c.scenario == "majorize") {
      emit(c, run_majorize(c));
      return kOk;
    }
    auto runs = run_protocol(c);
    apply_sampling(c, runs);
    emit(c, render_runs(c, runs));
    return kOk;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const PhysicalityError& e) {
    std::cerr << "physicality violation: " << e.what() << "\n";
    return kPhysicality;
  } catch (const LocalityError& e) {
    std::cerr << "locality violation: " << e.what() << "\n";
    return kPhysicality;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
}
