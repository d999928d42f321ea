#include "semsyn/formula.hpp"

#include <algorithm>
#include <deque>
#include <iterator>
#include <mutex>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace semsyn {

struct FormulaNode {
  Op op;
  PropId prop;
  std::uint32_t id;
  std::uint64_t shash;
  std::vector<Formula> kids;
};

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class PropTable {
 public:
  PropId intern(std::string_view name) {
    std::lock_guard lock(mu_);
    auto it = ids_.find(std::string(name));
    if (it != ids_.end()) return it->second;
    auto id = static_cast<PropId>(names_.size());
    names_.emplace_back(name);
    ids_.emplace(std::string(name), id);
    hashes_.push_back(fnv1a(name));
    return id;
  }
  const std::string& name(PropId id) {
    std::lock_guard lock(mu_);
    return names_.at(id);
  }
  std::uint64_t hash(PropId id) {
    std::lock_guard lock(mu_);
    return hashes_.at(id);
  }

 private:
  std::mutex mu_;
  std::deque<std::string> names_;
  std::vector<std::uint64_t> hashes_;
  std::unordered_map<std::string, PropId> ids_;
};

PropTable& props() {
  static PropTable table;
  return table;
}

struct Key {
  Op op;
  PropId prop;
  std::vector<const FormulaNode*> kids;
  bool operator==(const Key&) const = default;
};

struct KeyHash {
  std::size_t operator()(const Key& k) const noexcept {
    std::uint64_t h = mix(static_cast<std::uint64_t>(k.op) * 131 + k.prop);
    for (auto* p : k.kids) h = mix(h ^ reinterpret_cast<std::uintptr_t>(p));
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

class FormulaTable {
 public:
  static FormulaTable& get() {
    static FormulaTable table;
    return table;
  }

  Formula intern(Op op, PropId prop, std::vector<Formula> kids) {
    Key key{op, prop, {}};
    key.kids.reserve(kids.size());
    for (auto k : kids) key.kids.push_back(k.node());
    std::uint64_t h = mix(static_cast<std::uint64_t>(op) + 0x51ULL);
    if (op == Op::Prop || op == Op::NegProp) h = mix(h ^ props().hash(prop));
    for (auto k : kids) h = mix(h * 31 ^ k.shash());

    std::lock_guard lock(mu_);
    auto it = index_.find(key);
    if (it != index_.end()) return Formula(it->second);
    auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back(FormulaNode{op, prop, id, h, std::move(kids)});
    const FormulaNode* node = &nodes_.back();
    index_.emplace(std::move(key), node);
    return Formula(node);
  }

  std::size_t size() {
    std::lock_guard lock(mu_);
    return nodes_.size();
  }

 private:
  std::mutex mu_;
  std::deque<FormulaNode> nodes_;
  std::unordered_map<Key, const FormulaNode*, KeyHash> index_;
};

PropId intern_prop(std::string_view name) { return props().intern(name); }
const std::string& prop_name(PropId id) { return props().name(id); }

Op Formula::op() const { return node_->op; }
PropId Formula::prop() const { return node_->prop; }
std::span<const Formula> Formula::kids() const { return node_->kids; }
std::uint32_t Formula::id() const { return node_->id; }
std::uint64_t Formula::shash() const { return node_->shash; }

bool Formula::is_temporal() const {
  switch (op()) {
    case Op::Next:
    case Op::Until:
    case Op::Release:
    case Op::Finally:
    case Op::Globally:
      return true;
    default:
      return false;
  }
}

bool canon_less(Formula a, Formula b) {
  if (a == b) return false;
  if (a.shash() != b.shash()) return a.shash() < b.shash();
  if (a.op() != b.op()) return a.op() < b.op();
  if (a.is_literal()) return prop_name(a.prop()) < prop_name(b.prop());
  auto ka = a.kids();
  auto kb = b.kids();
  if (ka.size() != kb.size()) return ka.size() < kb.size();
  for (std::size_t i = 0; i < ka.size(); ++i) {
    if (ka[i] != kb[i]) return canon_less(ka[i], kb[i]);
  }
  return false;
}

Formula tt() {
  static const Formula f = FormulaTable::get().intern(Op::True, 0, {});
  return f;
}

Formula ff() {
  static const Formula f = FormulaTable::get().intern(Op::False, 0, {});
  return f;
}

Formula prop(PropId p) { return FormulaTable::get().intern(Op::Prop, p, {}); }
Formula prop(std::string_view name) { return prop(intern_prop(name)); }
Formula neg_prop(PropId p) { return FormulaTable::get().intern(Op::NegProp, p, {}); }

namespace {

// Shared body of make_and / make_or. `absorbing` is ff for And, tt for Or.
Formula make_junction(Op op, std::vector<Formula> kids) {
  const bool is_and = op == Op::And;
  const Formula unit = is_and ? tt() : ff();
  const Formula zero = is_and ? ff() : tt();
  const Op dual = is_and ? Op::Or : Op::And;

  std::vector<Formula> flat;
  flat.reserve(kids.size());
  for (auto k : kids) {
    if (k == unit) continue;
    if (k == zero) return zero;
    if (k.op() == op) {
      for (auto kk : k.kids()) flat.push_back(kk);
    } else {
      flat.push_back(k);
    }
  }
  std::sort(flat.begin(), flat.end(), canon_less);
  flat.erase(std::unique(flat.begin(), flat.end()), flat.end());

  // complementary literals
  {
    std::unordered_set<std::uint64_t> seen;
    for (auto k : flat) {
      if (!k.is_literal()) continue;
      std::uint64_t key = (static_cast<std::uint64_t>(k.prop()) << 1) | (k.op() == Op::NegProp ? 1 : 0);
      if (seen.contains(key ^ 1)) return zero;
      seen.insert(key);
    }
  }

  // absorption: x & (x | y) = x, (x | y) & (x | y | z) = x | y, and duals
  std::vector<char> drop(flat.size(), 0);
  for (std::size_t i = 0; i < flat.size(); ++i) {
    if (flat[i].op() != dual) continue;
    auto ki = flat[i].kids();
    for (std::size_t j = 0; j < flat.size() && !drop[i]; ++j) {
      if (i == j) continue;
      const Formula d = flat[j];
      if (d.op() == dual) {
        auto kj = d.kids();
        if (kj.size() < ki.size() && std::includes(ki.begin(), ki.end(), kj.begin(), kj.end(), canon_less)) {
          drop[i] = 1;
        }
      } else if (std::binary_search(ki.begin(), ki.end(), d, canon_less)) {
        drop[i] = 1;
      }
    }
  }
  std::vector<Formula> kept;
  kept.reserve(flat.size());
  for (std::size_t i = 0; i < flat.size(); ++i) {
    if (!drop[i]) kept.push_back(flat[i]);
  }

  if (kept.empty()) return unit;
  if (kept.size() == 1) return kept.front();
  return FormulaTable::get().intern(op, 0, std::move(kept));
}

}  // namespace

Formula make_and(std::vector<Formula> kids) { return make_junction(Op::And, std::move(kids)); }
Formula make_or(std::vector<Formula> kids) { return make_junction(Op::Or, std::move(kids)); }
Formula make_and(Formula a, Formula b) { return make_and(std::vector<Formula>{a, b}); }
Formula make_or(Formula a, Formula b) { return make_or(std::vector<Formula>{a, b}); }

Formula make_next(Formula f) {
  if (f.is_const()) return f;
  if (f.op() == Op::And || f.op() == Op::Or) {
    std::vector<Formula> kids;
    kids.reserve(f.kids().size());
    for (auto k : f.kids()) kids.push_back(make_next(k));
    return f.op() == Op::And ? make_and(std::move(kids)) : make_or(std::move(kids));
  }
  return FormulaTable::get().intern(Op::Next, 0, {f});
}

Formula make_finally(Formula f) {
  if (f.is_const()) return f;
  if (f.op() == Op::Finally) return f;
  // F G F x = G F x
  if (f.op() == Op::Globally && f.kid(0).op() == Op::Finally) return f;
  return FormulaTable::get().intern(Op::Finally, 0, {f});
}

Formula make_globally(Formula f) {
  if (f.is_const()) return f;
  if (f.op() == Op::Globally) return f;
  // G F G x = F G x
  if (f.op() == Op::Finally && f.kid(0).op() == Op::Globally) return f;
  return FormulaTable::get().intern(Op::Globally, 0, {f});
}

Formula make_until(Formula a, Formula b) {
  if (b.is_const()) return b;
  if (a.is_false()) return b;
  if (a.is_true()) return make_finally(b);
  if (a == b) return a;
  return FormulaTable::get().intern(Op::Until, 0, {a, b});
}

Formula make_release(Formula a, Formula b) {
  if (b.is_const()) return b;
  if (a.is_true()) return b;
  if (a.is_false()) return make_globally(b);
  if (a == b) return a;
  return FormulaTable::get().intern(Op::Release, 0, {a, b});
}

namespace {

template <typename Fn>
Formula rebuild(Formula f, std::unordered_map<Formula, Formula, FormulaHash>& memo, Fn&& leaf) {
  if (auto it = memo.find(f); it != memo.end()) return it->second;
  Formula r;
  switch (f.op()) {
    case Op::True:
    case Op::False:
      r = f;
      break;
    case Op::Prop:
    case Op::NegProp:
      r = leaf(f);
      break;
    case Op::And:
    case Op::Or: {
      std::vector<Formula> kids;
      kids.reserve(f.kids().size());
      for (auto k : f.kids()) kids.push_back(rebuild(k, memo, leaf));
      r = f.op() == Op::And ? make_and(std::move(kids)) : make_or(std::move(kids));
      break;
    }
    case Op::Next:
      r = make_next(rebuild(f.kid(0), memo, leaf));
      break;
    case Op::Finally:
      r = make_finally(rebuild(f.kid(0), memo, leaf));
      break;
    case Op::Globally:
      r = make_globally(rebuild(f.kid(0), memo, leaf));
      break;
    case Op::Until:
      r = make_until(rebuild(f.lhs(), memo, leaf), rebuild(f.rhs(), memo, leaf));
      break;
    case Op::Release:
      r = make_release(rebuild(f.lhs(), memo, leaf), rebuild(f.rhs(), memo, leaf));
      break;
  }
  memo.emplace(f, r);
  return r;
}

Formula negate_impl(Formula f, std::unordered_map<Formula, Formula, FormulaHash>& memo) {
  if (auto it = memo.find(f); it != memo.end()) return it->second;
  Formula r;
  switch (f.op()) {
    case Op::True:
      r = ff();
      break;
    case Op::False:
      r = tt();
      break;
    case Op::Prop:
      r = neg_prop(f.prop());
      break;
    case Op::NegProp:
      r = prop(f.prop());
      break;
    case Op::And:
    case Op::Or: {
      std::vector<Formula> kids;
      for (auto k : f.kids()) kids.push_back(negate_impl(k, memo));
      r = f.op() == Op::And ? make_or(std::move(kids)) : make_and(std::move(kids));
      break;
    }
    case Op::Next:
      r = make_next(negate_impl(f.kid(0), memo));
      break;
    case Op::Finally:
      r = make_globally(negate_impl(f.kid(0), memo));
      break;
    case Op::Globally:
      r = make_finally(negate_impl(f.kid(0), memo));
      break;
    case Op::Until:
      r = make_release(negate_impl(f.lhs(), memo), negate_impl(f.rhs(), memo));
      break;
    case Op::Release:
      r = make_until(negate_impl(f.lhs(), memo), negate_impl(f.rhs(), memo));
      break;
  }
  memo.emplace(f, r);
  return r;
}

void print(Formula f, std::string& out) {
  switch (f.op()) {
    case Op::True:
      out += "true";
      return;
    case Op::False:
      out += "false";
      return;
    case Op::Prop:
      out += prop_name(f.prop());
      return;
    case Op::NegProp:
      out += '!';
      out += prop_name(f.prop());
      return;
    case Op::And:
    case Op::Or: {
      out += '(';
      bool first = true;
      for (auto k : f.kids()) {
        if (!first) out += f.op() == Op::And ? " & " : " | ";
        first = false;
        print(k, out);
      }
      out += ')';
      return;
    }
    case Op::Next:
    case Op::Finally:
    case Op::Globally:
      out += f.op() == Op::Next ? "(X " : f.op() == Op::Finally ? "(F " : "(G ";
      print(f.kid(0), out);
      out += ')';
      return;
    case Op::Until:
    case Op::Release:
      out += '(';
      print(f.lhs(), out);
      out += f.op() == Op::Until ? " U " : " R ";
      print(f.rhs(), out);
      out += ')';
      return;
  }
}

}  // namespace

Formula negate(Formula f) {
  std::unordered_map<Formula, Formula, FormulaHash> memo;
  return negate_impl(f, memo);
}

Formula simplify(Formula f) {
  std::unordered_map<Formula, Formula, FormulaHash> memo;
  return rebuild(f, memo, [](Formula leaf) { return leaf; });
}

Formula substitute(Formula f, const std::function<Formula(PropId, bool)>& subst) {
  std::unordered_map<Formula, Formula, FormulaHash> memo;
  return rebuild(f, memo, [&](Formula leaf) {
    Formula r = subst(leaf.prop(), leaf.op() == Op::NegProp);
    return r.valid() ? r : leaf;
  });
}

namespace {

using Clause = std::vector<Formula>;

bool by_node(Formula a, Formula b) { return a.node() < b.node(); }

// Drops clauses that contain another clause; keeps the result sorted.
void drop_supersets(std::vector<Clause>& cs) {
  std::sort(cs.begin(), cs.end(), [](const Clause& a, const Clause& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), by_node);
  });
  cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
  std::vector<Clause> kept;
  for (auto& c : cs) {
    bool sup = std::any_of(kept.begin(), kept.end(), [&](const Clause& k) {
      return std::includes(c.begin(), c.end(), k.begin(), k.end(), by_node);
    });
    if (!sup) kept.push_back(std::move(c));
  }
  cs = std::move(kept);
}

// Two-level form with `outer` on top (Or for DNF, And for CNF). Returns false
// when the clause count exceeds `cap`.
bool two_level(Formula f, Op outer, std::size_t cap, std::vector<Clause>& out) {
  const Op inner = outer == Op::Or ? Op::And : Op::Or;
  const bool unitIsEmptyClause = outer == Op::Or ? f.is_true() : f.is_false();
  out.clear();
  if (f.is_const()) {
    if (unitIsEmptyClause) out.push_back({});
    return true;
  }
  if (f.op() == outer) {
    for (Formula k : f.kids()) {
      std::vector<Clause> sub;
      if (!two_level(k, outer, cap, sub)) return false;
      out.insert(out.end(), std::make_move_iterator(sub.begin()), std::make_move_iterator(sub.end()));
    }
    drop_supersets(out);
    return out.size() <= cap;
  }
  if (f.op() == inner) {
    out.push_back({});
    for (Formula k : f.kids()) {
      std::vector<Clause> sub, next;
      if (!two_level(k, outer, cap, sub)) return false;
      for (const Clause& a : out) {
        for (const Clause& b : sub) {
          Clause m;
          std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(m), by_node);
          bool complementary = false;
          for (std::size_t i = 0; i < m.size() && !complementary; ++i) {
            if (m[i].op() != Op::Prop) continue;
            for (Formula g : m)
              if (g.op() == Op::NegProp && g.prop() == m[i].prop()) complementary = true;
          }
          if (!complementary) next.push_back(std::move(m));
        }
        if (next.size() > 4 * cap) return false;
      }
      drop_supersets(next);
      if (next.size() > cap) return false;
      out = std::move(next);
    }
    return true;
  }
  out.push_back({f});
  return true;
}

Formula from_two_level(const std::vector<Clause>& cs, Op outer) {
  std::vector<Formula> parts;
  for (const Clause& c : cs) parts.push_back(outer == Op::Or ? make_and(c) : make_or(c));
  return outer == Op::Or ? make_or(std::move(parts)) : make_and(std::move(parts));
}

}  // namespace

Formula boolean_normal_form(Formula f, std::size_t maxTerms) {
  if (f.op() != Op::And && f.op() != Op::Or) return f;
  std::vector<Clause> cs;
  if (two_level(f, Op::Or, maxTerms, cs)) return from_two_level(cs, Op::Or);
  if (two_level(f, Op::And, maxTerms, cs)) return from_two_level(cs, Op::And);
  return f;
}

std::string to_string(Formula f) {
  std::string out;
  print(f, out);
  return out;
}

std::vector<PropId> props_of(Formula f) {
  std::vector<PropId> out;
  std::unordered_set<const FormulaNode*> seen;
  std::vector<Formula> stack{f};
  while (!stack.empty()) {
    Formula g = stack.back();
    stack.pop_back();
    if (!seen.insert(g.node()).second) continue;
    if (g.is_literal()) out.push_back(g.prop());
    for (auto k : g.kids()) stack.push_back(k);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::size_t formula_table_size() { return FormulaTable::get().size(); }

}  // namespace semsyn
