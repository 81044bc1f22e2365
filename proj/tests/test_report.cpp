#include <doctest.h>

#include "fermitele/report.hpp"
#include "support.hpp"

using namespace fermitele;

TEST_SUITE("report") {
  TEST_CASE("transcript JSON carries the schema and the documented keys") {
    auto l = single_mode_layout();
    Transcript t = teleport_single_mode(even_input(l.reg.n(), l.at, l.atp, 0.6, 0.8), BellLabel::PhiPlus, l);
    auto j = to_json(t);
    CHECK(j["schema"] == "fermitele/1");
    for (const char* key : {"protocol", "policy", "resource", "input", "register", "output_modes", "aux_mode", "target",
                            "branches", "success_probability", "average_fidelity", "tally", "notes"}) {
      CHECK(j.contains(key));
    }
    REQUIRE(j["branches"].size() == 4);
    for (const char* key : {"label", "bits", "correction", "probability", "fidelity", "success", "output", "aux", "metrics"}) {
      CHECK(j["branches"][0].contains(key));
    }
    CHECK(j["tally"]["fbits"] == 1);
    CHECK(j.dump() == to_json(t).dump());
  }

  TEST_CASE("CSV has one header and one row per branch") {
    auto l = two_mode_layout();
    Transcript t = teleport_two_mode(odd_input(l.reg.n(), l.at, l.atp, 0.6, 0.8), BellLabel::PhiPlus,
                                     BellLabel::PhiPlus, l);
    std::string csv = to_csv({t});
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 17);
    CHECK(csv.rfind("run,protocol", 0) == 0);
  }

  TEST_CASE("text rendering lists every branch") {
    auto l = single_mode_layout();
    Transcript t = nssr_teleport_single(odd_input(l.reg.n(), l.at, l.atp, 0.6, 0.8), BellLabel::PsiPlus, l);
    std::string s = to_text(t);
    CHECK(s.find("success probability  0.5") != std::string::npos);
    CHECK(s.find("Psi-") != std::string::npos);
  }

  TEST_CASE("resource table II regenerates") {
    TableReport r = table_ii();
    CHECK(r.ok());
    CHECK(r.cell("fbits", "One mode").computed == "1");
    CHECK(r.cell("quantum channel", "Two modes (1 fbit)").computed == "1 mode");
    CHECK(r.cell("fbits", "Two modes (2 fbits)").computed == "2");
    CHECK(r.cell("classical bits", "Two modes (2 fbits)").computed == "2");
  }

  TEST_CASE("table III rows computed from live calls") {
    TableReport r = table_iii();
    CHECK(r.cells.size() == 20);
    CHECK(r.cell("subsystem swap", "2-mode MME").computed == "1 mode†");
    CHECK(r.cell("subsystem swap", "4-mode ebit").computed == "---");
    CHECK(r.cell("subsystem swap", "2 fbits").computed == "2 modes");
    CHECK(r.cell("teleportation # of qubits", "4-mode MME").computed == "1†");
    CHECK(r.cell("Bell inequ. violation", "2-mode MME").computed == "No");
    CHECK(r.cell("EOF", "4-mode MME").computed == "2");
    CHECK(r.cell("EOF", "4-mode ebit").computed == "1");
    CHECK_THROWS_AS(r.cell("EOF", "nope"), std::out_of_range);
  }

  TEST_CASE("rendered tables flag mismatches") {
    TableReport r;
    r.title = "t";
    r.columns = {"c"};
    r.rows = {"r"};
    r.cells = {{"r", "c", "1", "2", false}};
    CHECK_FALSE(r.ok());
    CHECK(render_text(r).find("[expected 1]") != std::string::npos);
    CHECK(render_csv(r).find("t,r,c,1,2,0") != std::string::npos);
    CHECK(to_json(r)["ok"] == false);
  }

  TEST_CASE("named resources") {
    CHECK(named_resource("fbit").name == "1 fbit");
    CHECK(named_resource("product").state.is_pure());
    CHECK_THROWS_AS(named_resource("nothing"), std::invalid_argument);
  }
}
