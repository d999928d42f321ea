#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace semsyn {

/// Interned proposition identifier. Names are global to the process.
using PropId = std::uint32_t;

PropId intern_prop(std::string_view name);
const std::string& prop_name(PropId id);

enum class Op : std::uint8_t {
  True,
  False,
  Prop,
  NegProp,
  And,
  Or,
  Next,
  Until,
  Release,
  Finally,
  Globally,
};

struct FormulaNode;

/// Handle to a hash-consed LTL node in negation normal form.
///
/// Two handles compare equal iff the formulas are structurally identical.
/// Every formula is built through the smart constructors below, which apply
/// the fixed simplification rule set, so any handle is already simplified.
class Formula {
 public:
  Formula() = default;

  Op op() const;
  PropId prop() const;
  std::span<const Formula> kids() const;
  const Formula& kid(std::size_t i) const { return kids()[i]; }
  const Formula& lhs() const { return kids()[0]; }
  const Formula& rhs() const { return kids()[1]; }

  /// Dense creation-order id. Not stable across processes.
  std::uint32_t id() const;
  /// Structural 64-bit hash; stable across runs and thread interleavings.
  std::uint64_t shash() const;

  bool is_true() const { return op() == Op::True; }
  bool is_false() const { return op() == Op::False; }
  bool is_const() const { return is_true() || is_false(); }
  bool is_literal() const { return op() == Op::Prop || op() == Op::NegProp; }
  bool is_temporal() const;
  bool valid() const { return node_ != nullptr; }

  const FormulaNode* node() const { return node_; }

  friend bool operator==(Formula a, Formula b) { return a.node_ == b.node_; }
  friend bool operator!=(Formula a, Formula b) { return a.node_ != b.node_; }

 private:
  friend class FormulaTable;
  explicit Formula(const FormulaNode* n) : node_(n) {}
  const FormulaNode* node_ = nullptr;
};

/// Canonical total order used for sorting And/Or children. Depends only on
/// structure and proposition names, never on creation order.
bool canon_less(Formula a, Formula b);

struct FormulaHash {
  std::size_t operator()(Formula f) const noexcept { return std::hash<const void*>{}(f.node()); }
};

Formula tt();
Formula ff();
Formula prop(PropId p);
Formula prop(std::string_view name);
Formula neg_prop(PropId p);
Formula make_and(std::vector<Formula> kids);
Formula make_or(std::vector<Formula> kids);
Formula make_and(Formula a, Formula b);
Formula make_or(Formula a, Formula b);
Formula make_next(Formula f);
Formula make_finally(Formula f);
Formula make_globally(Formula f);
Formula make_until(Formula a, Formula b);
Formula make_release(Formula a, Formula b);

/// NNF of the negation of f.
Formula negate(Formula f);

/// Rebuilds f bottom-up through the smart constructors.
Formula simplify(Formula f);

/// Replaces propositions according to `subst` (returning an invalid handle
/// keeps the proposition) and re-simplifies.
Formula substitute(Formula f, const std::function<Formula(PropId, bool negated)>& subst);

/// Subsumption-free DNF over literals and maximal temporal subformulas
/// (CNF if the DNF exceeds `maxTerms`; f itself if both do). Preserves the
/// meaning of f and bounds the number of distinct progression results.
Formula boolean_normal_form(Formula f, std::size_t maxTerms = 256);

/// Fully parenthesized canonical text accepted by parse_ltl.
std::string to_string(Formula f);

/// Propositions occurring in f, sorted by id.
std::vector<PropId> props_of(Formula f);

/// Number of distinct nodes in the hash-consing table.
std::size_t formula_table_size();

}  // namespace semsyn
