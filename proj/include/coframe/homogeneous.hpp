#pragma once

#include <vector>

#include "coframe/exterior.hpp"

namespace coframe {

// Shared coframe instances for the SU(3) and SU(2) left-invariant framings.
// Structure tables are hard-coded exact rationals; the d^2 = 0 check at
// construction is the integrity gate.
CoframePtr su3_coframe(bool with_radial);
CoframePtr su2_coframe();

enum class InvariantSpace { TCP2, EH };

// The invariant 2-forms on the principal orbit, extended by dr ^ theta terms:
// 10 forms for T*CP^2 (including sigma2 = th5^th7 + th8^th6 and
// sigma3 = th5^th8 + th6^th7), 6 forms for Eguchi-Hanson.
std::vector<Form> invariant_two_forms(InvariantSpace space);

// sigma2 / sigma3 over the SU(3) coframe with radial label.
Form sigma2_form();
Form sigma3_form();

}  // namespace coframe
