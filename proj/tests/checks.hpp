#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "fermitele/operators.hpp"

namespace checks {

struct Verdict {
  bool pass = false;
  std::string detail;
};

/// Rows: outcome Phi+, Phi-, Psi+, Psi-. Columns: resource in the same order.
using TagTable = std::array<std::array<fermitele::CorrectionTag, 4>, 4>;
const TagTable& transcribed_table_one();

/// Corrections from {1, U_pi, U_P, U_P U_pi} that restore the input for the
/// given (outcome, resource), found with the dense reference model.
std::vector<fermitele::CorrectionTag> oracle_corrections(fermitele::BellLabel outcome,
                                                         fermitele::BellLabel resource);

Verdict criterion_1();
Verdict criterion_2();
Verdict criterion_3();
Verdict criterion_4();
Verdict criterion_5();
Verdict criterion_6();
Verdict criterion_7();
Verdict criterion_8();
Verdict criterion_9();
Verdict criterion_10();
Verdict criterion_11();

struct Criterion {
  int id;
  const char* title;
  double budget_seconds;  ///< 0 = no runtime bound
  std::function<Verdict()> run;
};
const std::vector<Criterion>& all();

}  // namespace checks
