#include <doctest.h>

#include "properties.hpp"

namespace {

void check(const props::Outcome& o) {
  INFO(o.name << ": " << o.first_failure);
  CHECK(o.cases >= props::kCases);
  CHECK(o.failures == 0);
}

}  // namespace

TEST_SUITE("properties") {
  TEST_CASE("anticommutation relations") { check(props::anticommutation(101, props::kCases)); }
  TEST_CASE("wedge antisymmetry") { check(props::wedge_antisymmetry(202, props::kCases)); }
  TEST_CASE("branch completeness") { check(props::branch_completeness(303, props::kCases)); }
  TEST_CASE("superselection physicality of every intermediate state") { check(props::ssr_physicality(404, props::kCases)); }
  TEST_CASE("auxiliary mode separability") { check(props::aux_separability(505, props::kCases)); }
  TEST_CASE("auxiliary mode reuse without reset") { check(props::no_reset_reuse(606, props::kCases)); }
}
