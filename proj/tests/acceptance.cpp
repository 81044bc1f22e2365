// Acceptance runner: one PASS/FAIL line per criterion. Pass criterion ids as
// arguments to run a subset.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <string>

#include "checks.hpp"

int main(int argc, char** argv) {
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  int failed = 0;
  for (const auto& c : checks::all()) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    checks::Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool pass = v.pass;
    std::string timing = std::to_string(secs).substr(0, 5) + " s";
    if (c.budget_seconds > 0 && secs > c.budget_seconds) {
      pass = false;
      timing += " over budget of " + std::to_string(static_cast<int>(c.budget_seconds)) + " s";
    }
    std::printf("%s criterion %d: %s (%s) - %s\n", pass ? "PASS" : "FAIL", c.id, c.title, timing.c_str(),
                v.detail.c_str());
    failed += !pass;
  }
  return failed == 0 ? 0 : 1;
}
