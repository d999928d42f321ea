#pragma once

#include "semsyn/formula.hpp"
#include "semsyn/letter.hpp"

namespace semsyn {

/// One-step progression: what remains of f after reading `letter`.
Formula af(Formula f, const Letter& letter);

/// Exact satisfaction of f on stem . loop^omega.
bool eval_lasso(Formula f, const LassoWord& w);

}  // namespace semsyn
