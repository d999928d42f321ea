#pragma once

#include <cstdint>

#include "semsyn/formula.hpp"
#include "semsyn/letter.hpp"

namespace semsyn {

/// Maximum number of abstracted variables enumerated exactly; above this,
/// trueness is estimated from kTruenessSamples assignments seeded by the
/// formula's structural hash.
inline constexpr int kTruenessExactCap = 20;
inline constexpr int kTruenessSamples = 4096;

/// Fraction of satisfying assignments after abstracting every maximal
/// temporal subformula as a variable. A subformula and its negation share one
/// variable, so trueness(f) + trueness(negate(f)) == 1.
double trueness(Formula f);

enum class Quantifier : std::uint8_t { Forall, Exists };

/// Fraction of owner assignments for which f holds under all (Forall) or
/// some (Exists) opponent assignment. Temporal placeholders belong to the
/// owner; propositions missing from the partition belong to the opponent.
double quantified_trueness(Formula f, const Partition& p, Player owner, Quantifier q);

/// Inductive controllability. Literals score 1 when owned and 0 otherwise,
/// constants 1, unary operators pass their operand through and n-ary/binary
/// operators average their operands.
double controllability(Formula f, const Partition& p, Player owner);

struct SyntacticMeasures {
  std::uint64_t temporalOps = 0;
  std::uint64_t height = 0;
  std::uint64_t size = 0;
  std::uint64_t topDisjuncts = 1;
};

/// Counts over the formula read as a tree (shared nodes counted per use).
SyntacticMeasures syntactic_measures(Formula f);

}  // namespace semsyn
