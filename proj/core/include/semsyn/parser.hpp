#pragma once

#include <string_view>

#include "semsyn/formula.hpp"

namespace semsyn {

/// Parses LTL text into a simplified NNF formula.
///
/// Grammar (loosest to tightest): `<->`, `->`, `|`, `&`, the binary temporal
/// operators `U R W`, then the unary operators `! X F G`. Binary operators are
/// right-associative. `a W b` is rewritten to `(a U b) | G a`.
/// Throws ParseError on malformed input.
Formula parse_ltl(std::string_view text);

}  // namespace semsyn
