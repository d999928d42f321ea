#include "semsyn/automaton.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <ostream>
#include <set>

#include "semsyn/errors.hpp"
#include "semsyn/progression.hpp"

namespace semsyn {

const char* atom_kind_name(AtomKind k) {
  switch (k) {
    case AtomKind::Safety:
      return "safety";
    case AtomKind::CoSafety:
      return "cosafety";
    case AtomKind::GSuffix:
      return "G-suffix";
    case AtomKind::FSuffix:
      return "F-suffix";
  }
  return "?";
}

namespace {

bool fragment_check(Formula f, Op allowed, Op allowedUnary) {
  switch (f.op()) {
    case Op::True:
    case Op::False:
    case Op::Prop:
    case Op::NegProp:
      return true;
    case Op::And:
    case Op::Or:
    case Op::Next:
      break;
    default:
      if (f.op() != allowed && f.op() != allowedUnary) return false;
  }
  for (Formula k : f.kids())
    if (!fragment_check(k, allowed, allowedUnary)) return false;
  return true;
}

// Satisfaction does not depend on any finite prefix.
bool prefix_independent(Formula f) {
  switch (f.op()) {
    case Op::Globally:
      return f.lhs().op() == Op::Finally;
    case Op::Finally:
      return f.lhs().op() == Op::Globally;
    case Op::And:
    case Op::Or:
      return std::all_of(f.kids().begin(), f.kids().end(), prefix_independent);
    default:
      return false;
  }
}

class Decomposer {
 public:
  explicit Decomposer(Formula original) : original_(original) {}

  Decomposition run() {
    Decomposition d;
    d.skeleton = rec(original_);
    d.atoms = std::move(atoms_);
    return d;
  }

 private:
  Formula atom(AtomKind kind, Formula root, Formula body) {
    if (auto it = byRoot_.find(root); it != byRoot_.end()) return prop(atoms_[it->second].placeholder);
    auto idx = static_cast<std::uint32_t>(atoms_.size());
    PropId ph = intern_prop("#" + std::to_string(idx));
    atoms_.push_back(Atom{kind, root, body, ph});
    byRoot_.emplace(root, idx);
    return prop(ph);
  }

  [[noreturn]] void reject(Formula offending) const {
    throw UnsupportedError(to_string(original_), to_string(offending));
  }

  // Splits the junction `f` into prefix-independent kids and the rest.
  static std::pair<std::vector<Formula>, std::vector<Formula>> split_independent(Formula f) {
    std::vector<Formula> ind, rest;
    for (Formula k : f.kids()) (prefix_independent(k) ? ind : rest).push_back(k);
    return {ind, rest};
  }

  Formula rec(Formula f) {
    if (f.is_const()) return f;
    if (is_syntactic_cosafety(f)) return atom(AtomKind::CoSafety, f, f);
    if (is_syntactic_safety(f)) return atom(AtomKind::Safety, f, f);
    switch (f.op()) {
      case Op::And:
      case Op::Or: {
        std::vector<Formula> kids;
        for (Formula k : f.kids()) kids.push_back(rec(k));
        return f.op() == Op::And ? make_and(std::move(kids)) : make_or(std::move(kids));
      }
      case Op::Globally: {
        Formula body = f.lhs();
        if (is_syntactic_cosafety(body)) return atom(AtomKind::GSuffix, f, body);
        if (prefix_independent(body)) return rec(body);
        if (body.op() == Op::And) {
          std::vector<Formula> parts;
          for (Formula k : body.kids()) parts.push_back(make_globally(k));
          return rec(make_and(std::move(parts)));
        }
        if (body.op() == Op::Or) {
          // G (x | p) == G x | p for prefix-independent p
          auto [ind, rest] = split_independent(body);
          if (!ind.empty() && !rest.empty()) return rec(make_or(make_globally(make_or(rest)), make_or(ind)));
        }
        reject(f);
      }
      case Op::Finally: {
        Formula body = f.lhs();
        if (is_syntactic_safety(body)) return atom(AtomKind::FSuffix, f, body);
        if (prefix_independent(body)) return rec(body);
        if (body.op() == Op::Or) {
          std::vector<Formula> parts;
          for (Formula k : body.kids()) parts.push_back(make_finally(k));
          return rec(make_or(std::move(parts)));
        }
        if (body.op() == Op::And) {
          // F (x & p) == F x & p for prefix-independent p
          auto [ind, rest] = split_independent(body);
          if (!ind.empty() && !rest.empty()) return rec(make_and(make_finally(make_and(rest)), make_and(ind)));
        }
        reject(f);
      }
      case Op::Next:
        if (prefix_independent(f.lhs())) return rec(f.lhs());
        reject(f);
      default:
        break;
    }
    reject(f);
  }

  Formula original_;
  std::vector<Atom> atoms_;
  std::unordered_map<Formula, std::uint32_t, FormulaHash> byRoot_;
};

using Term = std::uint64_t;

void minimize(std::vector<Term>& terms) {
  std::sort(terms.begin(), terms.end(), [](Term a, Term b) {
    int pa = std::popcount(a), pb = std::popcount(b);
    return pa != pb ? pa < pb : a < b;
  });
  terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
  std::vector<Term> out;
  for (Term t : terms) {
    bool subsumed = std::any_of(out.begin(), out.end(), [t](Term s) { return (s & t) == s; });
    if (!subsumed) out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  terms = std::move(out);
}

constexpr std::size_t kMaxDisjuncts = 64;

std::vector<Term> dnf(Formula f, const std::unordered_map<PropId, std::uint32_t>& atomOf) {
  switch (f.op()) {
    case Op::True:
      return {0};
    case Op::False:
      return {};
    case Op::Prop: {
      std::uint32_t a = atomOf.at(f.prop());
      if (a >= 64) throw ResourceError("more than 64 atoms in the acceptance condition");
      return {Term{1} << a};
    }
    case Op::Or: {
      std::vector<Term> out;
      for (Formula k : f.kids()) {
        auto t = dnf(k, atomOf);
        out.insert(out.end(), t.begin(), t.end());
      }
      minimize(out);
      return out;
    }
    case Op::And: {
      std::vector<Term> acc{0};
      for (Formula k : f.kids()) {
        auto t = dnf(k, atomOf);
        std::vector<Term> next;
        for (Term x : acc)
          for (Term y : t) next.push_back(x | y);
        minimize(next);
        if (next.size() > 16 * kMaxDisjuncts) throw ResourceError("acceptance DNF too large");
        acc = std::move(next);
      }
      return acc;
    }
    default:
      throw std::logic_error("non-monotone skeleton");
  }
}

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

std::uint64_t hash_state(const AutState& s) {
  std::uint64_t h = s.skeleton.id();
  for (const Slot& sl : s.slots) {
    h = mix(h, sl.atom);
    h = mix(h, sl.cur.id());
    h = mix(h, sl.pend.id());
  }
  for (auto r : s.rr) h = mix(h, r);
  for (auto r : s.iar) h = mix(h, r + 1000);
  return h;
}

Formula strip_unary(Formula f, Op op) { return f.op() == op ? f.lhs() : f; }

// Drops `part` from the junction `f` if it is one of its kids.
Formula without_kid(Formula f, Formula part, Op junction) {
  if (f.op() != junction) return f;
  std::vector<Formula> kids;
  for (Formula k : f.kids())
    if (k != part) kids.push_back(k);
  if (kids.size() == f.kids().size()) return f;
  return junction == Op::Or ? make_or(std::move(kids)) : make_and(std::move(kids));
}

}  // namespace

bool is_syntactic_safety(Formula f) { return fragment_check(f, Op::Release, Op::Globally); }
bool is_syntactic_cosafety(Formula f) { return fragment_check(f, Op::Until, Op::Finally); }

Decomposition decompose(Formula f) { return Decomposer(f).run(); }

std::uint32_t iar_step(std::vector<std::uint8_t>& iar, const std::vector<char>& good, const std::vector<char>& bad) {
  const std::size_t k = iar.size();
  std::size_t pB = 0, pG = 0;
  for (std::size_t pos = 1; pos <= k; ++pos) {
    const auto id = iar[pos - 1];
    if (bad[id]) {
      if (!pB) pB = pos;
    } else if (good[id] && !pG) {
      pG = pos;
    }
  }
  std::uint32_t priority;
  if (pB && (!pG || pB < pG)) priority = static_cast<std::uint32_t>(2 * pB - 1);
  else if (pG) priority = static_cast<std::uint32_t>(2 * pG);
  else priority = static_cast<std::uint32_t>(2 * k + 1);
  if (pB) std::stable_partition(iar.begin(), iar.end(), [&](std::uint8_t id) { return !bad[id]; });
  return priority;
}

Automaton::Automaton(Formula f, Partition p) : formula_(f), part_(std::move(p)), dec_(decompose(f)) {
  if (part_.width() > 62) throw ResourceError("too many propositions");
  for (std::uint32_t i = 0; i < dec_.atoms.size(); ++i) atomOf_.emplace(dec_.atoms[i].placeholder, i);

  AutState init;
  init.skeleton = dec_.skeleton;
  if (!init.skeleton.is_const()) {
    for (std::uint32_t i = 0; i < dec_.atoms.size(); ++i) {
      const Atom& a = dec_.atoms[i];
      switch (a.kind) {
        case AtomKind::Safety:
        case AtomKind::CoSafety:
          init.slots.push_back({i, a.root, tt()});
          break;
        case AtomKind::GSuffix:
          init.slots.push_back({i, tt(), tt()});
          break;
        case AtomKind::FSuffix:
          init.slots.push_back({i, ff(), ff()});
          break;
      }
    }
    const std::vector<RabinPair>* prsp = nullptr;
    try {
      prsp = &pairs_of(init.skeleton);
    } catch (const ResourceError& e) {
      throw UnsupportedError(to_string(f), e.what());
    }
    const auto& prs = *prsp;
    if (prs.size() > kMaxDisjuncts)
      throw UnsupportedError(to_string(f), "acceptance condition with " + std::to_string(prs.size()) + " disjuncts");
    init.rr.assign(prs.size(), 0);
    for (std::size_t i = 0; i < prs.size(); ++i) init.iar.push_back(static_cast<std::uint8_t>(i));
  }
  intern(std::move(init));
}

const std::vector<RabinPair>& Automaton::pairs_of(Formula skeleton) {
  if (auto it = pairCache_.find(skeleton); it != pairCache_.end()) return *it->second;
  Formula acc = substitute(skeleton, [&](PropId p, bool) -> Formula {
    auto it = atomOf_.find(p);
    if (it == atomOf_.end()) return Formula();
    switch (dec_.atoms[it->second].kind) {
      case AtomKind::Safety:
        return tt();
      case AtomKind::CoSafety:
        return ff();
      default:
        return Formula();
    }
  });
  auto out = std::make_unique<std::vector<RabinPair>>();
  for (Term t : dnf(acc, atomOf_)) {
    RabinPair rp;
    for (std::uint32_t a = 0; a < 64; ++a) {
      if (!((t >> a) & 1U)) continue;
      if (dec_.atoms[a].kind == AtomKind::GSuffix) {
        rp.good |= Term{1} << a;
        rp.goods.push_back(a);
      } else {
        rp.bad |= Term{1} << a;
      }
    }
    out->push_back(std::move(rp));
  }
  return *pairCache_.emplace(skeleton, std::move(out)).first->second;
}

const std::vector<RabinPair>& Automaton::pairs(StateId s) {
  static const std::vector<RabinPair> none;
  if (is_terminal(s)) return none;
  return pairs_of(states_[s].skeleton);
}

StateId Automaton::intern(AutState st) {
  const std::uint64_t h = hash_state(st);
  auto& bucket = index_[h];
  for (StateId id : bucket)
    if (states_[id] == st) return id;
  auto id = static_cast<StateId>(states_.size());
  std::uint64_t mask = 0;
  if (!st.skeleton.is_const()) {
    std::set<PropId> used;
    for (const Slot& sl : st.slots) {
      for (PropId p : props_of(sl.cur)) used.insert(p);
      for (PropId p : props_of(sl.pend)) used.insert(p);
      for (PropId p : props_of(dec_.atoms[sl.atom].body)) used.insert(p);
    }
    for (std::size_t i = 0; i < part_.num_env(); ++i)
      if (used.count(part_.env()[i])) mask |= std::uint64_t{1} << i;
    for (std::size_t i = 0; i < part_.num_sys(); ++i)
      if (used.count(part_.sys()[i])) mask |= std::uint64_t{1} << (part_.num_env() + i);
  }
  states_.push_back(std::move(st));
  relevant_.push_back(mask);
  cache_.emplace_back();
  bucket.push_back(id);
  return id;
}

Transition Automaton::successor(StateId s, std::uint64_t letter) {
  const std::uint64_t key = letter & relevant_[s];
  if (auto it = cache_[s].find(key); it != cache_[s].end()) return it->second;
  const std::uint64_t nEnv = part_.num_env();
  Transition t = step(s, part_.letter(key & ((std::uint64_t{1} << nEnv) - 1), key >> nEnv));
  cache_[s].emplace(key, t);
  return t;
}

Transition Automaton::step(StateId sid, const Letter& l, StepEvents* ev) {
  const AutState s = states_[sid];
  if (s.skeleton.is_const()) return {sid, s.skeleton.is_true() ? 0U : 1U};
  auto af = [](Formula f, const Letter& l) { return boolean_normal_form(semsyn::af(f, l)); };

  std::vector<Slot> next;
  std::unordered_map<PropId, bool> decided;
  std::uint64_t fired = 0, restarted = 0;
  for (const Slot& slot : s.slots) {
    const Atom& a = dec_.atoms[slot.atom];
    const Term bit = slot.atom < 64 ? (Term{1} << slot.atom) : 0;
    Formula P, N;
    switch (a.kind) {
      case AtomKind::Safety:
      case AtomKind::CoSafety:
        P = af(slot.cur, l);
        if (ev) ev->raw.emplace_back(slot.atom, P);
        if (P.is_const()) decided.emplace(a.placeholder, P.is_true());
        else next.push_back({slot.atom, P, tt()});
        continue;
      case AtomKind::GSuffix:
        if (slot.cur.is_true()) {
          P = af(a.body, l);
          N = af(slot.pend, l);
        } else {
          P = af(slot.cur, l);
          N = af(make_and(slot.pend, a.body), l);
        }
        if (ev) ev->raw.emplace_back(slot.atom, P);
        if (P.is_false() || N.is_false()) {
          decided.emplace(a.placeholder, false);
        } else if (P.is_true()) {
          fired |= bit;
          if (ev) ev->fired.push_back(slot.atom);
          next.push_back({slot.atom, N, tt()});
        } else {
          next.push_back({slot.atom, P, N});
        }
        continue;
      case AtomKind::FSuffix:
        if (slot.cur.is_false()) {
          P = af(a.body, l);
          N = af(slot.pend, l);
        } else {
          P = af(slot.cur, l);
          N = af(make_or(slot.pend, a.body), l);
        }
        if (ev) ev->raw.emplace_back(slot.atom, P);
        if (P.is_true() || N.is_true()) {
          decided.emplace(a.placeholder, true);
        } else if (P.is_false()) {
          restarted |= bit;
          if (ev) ev->restarted.push_back(slot.atom);
          next.push_back({slot.atom, N, ff()});
        } else {
          next.push_back({slot.atom, P, N});
        }
        continue;
    }
  }

  if (ev) {
    for (auto [ph, v] : decided) ev->decided.emplace_back(atomOf_.at(ph), v);
    std::sort(ev->decided.begin(), ev->decided.end());
  }

  AutState out;
  out.skeleton = s.skeleton;
  if (!decided.empty()) {
    out.skeleton = substitute(s.skeleton, [&](PropId p, bool neg) -> Formula {
      auto it = decided.find(p);
      if (it == decided.end()) return Formula();
      return (it->second != neg) ? tt() : ff();
    });
  }

  std::uint32_t priority;
  const auto& oldPairs = pairs_of(s.skeleton);
  if (ev) {
    ev->good.assign(oldPairs.size(), 0);
    ev->bad.assign(oldPairs.size(), 0);
  }
  if (out.skeleton.is_const()) {
    priority = out.skeleton.is_true() ? 0 : 1;
    if (ev) ev->skeletonChanged = true;
  } else if (out.skeleton != s.skeleton) {
    if (ev) ev->skeletonChanged = true;
    auto live = props_of(out.skeleton);
    for (const Slot& sl : next)
      if (std::binary_search(live.begin(), live.end(), dec_.atoms[sl.atom].placeholder)) out.slots.push_back(sl);
    const auto& prs = pairs_of(out.skeleton);
    out.rr.assign(prs.size(), 0);
    for (std::size_t i = 0; i < prs.size(); ++i) out.iar.push_back(static_cast<std::uint8_t>(i));
    priority = static_cast<std::uint32_t>(2 * prs.size() + 1);
  } else {
    out.slots = std::move(next);
    out.rr = s.rr;
    out.iar = s.iar;
    std::vector<char> good(oldPairs.size(), 0), bad(oldPairs.size(), 0);
    for (std::size_t i = 0; i < oldPairs.size(); ++i) {
      const RabinPair& rp = oldPairs[i];
      bad[i] = (rp.bad & restarted) != 0;
      if (rp.goods.empty()) {
        good[i] = 1;
        continue;
      }
      auto& r = out.rr[i];
      while ((fired >> rp.goods[r]) & 1U) {
        if (++r == rp.goods.size()) {
          r = 0;
          good[i] = 1;
          break;
        }
      }
    }
    priority = iar_step(out.iar, good, bad);
    if (ev) {
      ev->good = good;
      ev->bad = bad;
    }
  }
  return {intern(std::move(out)), priority};
}

Formula Automaton::master(StateId s) const {
  const AutState& st = states_[s];
  if (st.skeleton.is_const()) return st.skeleton;
  return substitute(st.skeleton, [&](PropId p, bool) -> Formula {
    auto it = atomOf_.find(p);
    if (it == atomOf_.end()) return Formula();
    const Atom& a = dec_.atoms[it->second];
    if (a.omega()) return a.root;
    for (const Slot& sl : st.slots)
      if (sl.atom == it->second) return sl.cur;
    return a.root;
  });
}

Formula Automaton::progress_label(const Slot& slot) const {
  const Atom& a = dec_.atoms[slot.atom];
  switch (a.kind) {
    case AtomKind::Safety:
      return strip_unary(slot.cur, Op::Globally);
    case AtomKind::CoSafety:
      return strip_unary(slot.cur, Op::Finally);
    case AtomKind::GSuffix:
      if (slot.cur.is_true() || slot.cur == a.body) return strip_unary(a.body, Op::Finally);
      return without_kid(slot.cur, a.body, Op::Or);
    case AtomKind::FSuffix:
      if (slot.cur.is_false() || slot.cur == a.body) return strip_unary(a.body, Op::Globally);
      return without_kid(slot.cur, a.body, Op::And);
  }
  return slot.cur;
}

std::vector<std::pair<std::uint32_t, Formula>> Automaton::progress(StateId s) const {
  std::vector<std::pair<std::uint32_t, Formula>> out;
  for (const Slot& sl : states_[s].slots) out.emplace_back(sl.atom, progress_label(sl));
  return out;
}

std::uint64_t Automaton::letter_index(const Letter& l) const {
  std::uint64_t idx = 0;
  for (std::size_t i = 0; i < part_.num_env(); ++i)
    if (l.holds(part_.env()[i])) idx |= std::uint64_t{1} << i;
  for (std::size_t i = 0; i < part_.num_sys(); ++i)
    if (l.holds(part_.sys()[i])) idx |= std::uint64_t{1} << (part_.num_env() + i);
  return idx;
}

bool accepts_lasso(Automaton& a, const LassoWord& w) {
  StateId s = a.initial();
  for (const Letter& l : w.stem) s = a.successor(s, a.letter_index(l)).target;
  std::vector<std::uint64_t> loopIdx;
  for (const Letter& l : w.loop) loopIdx.push_back(a.letter_index(l));
  std::map<std::pair<StateId, std::size_t>, std::size_t> seen;
  std::vector<std::uint32_t> prios;
  std::size_t pos = 0;
  while (true) {
    auto key = std::make_pair(s, pos);
    if (auto it = seen.find(key); it != seen.end()) {
      std::uint32_t m = *std::min_element(prios.begin() + static_cast<std::ptrdiff_t>(it->second), prios.end());
      return m % 2 == 0;
    }
    seen.emplace(key, prios.size());
    Transition t = a.successor(s, loopIdx[pos]);
    prios.push_back(t.priority);
    s = t.target;
    pos = (pos + 1) % loopIdx.size();
  }
}

bool accepts_lasso(Formula f, const LassoWord& w) {
  Automaton a(f, Partition(props_of(f), {}));
  return accepts_lasso(a, w);
}

namespace {

std::vector<StateId> reachable(Automaton& a, std::size_t maxStates) {
  std::vector<StateId> order{a.initial()};
  std::set<StateId> seen{a.initial()};
  for (std::size_t i = 0; i < order.size() && order.size() < maxStates; ++i) {
    for (std::uint64_t l = 0; l < a.num_letters(); ++l) {
      StateId t = a.successor(order[i], l).target;
      if (seen.insert(t).second) order.push_back(t);
    }
  }
  return order;
}

std::string letter_text(const Partition& p, std::uint64_t l) {
  std::string out;
  auto add = [&](PropId id, bool v) {
    if (!out.empty()) out += '&';
    if (!v) out += '!';
    out += prop_name(id);
  };
  for (std::size_t i = 0; i < p.num_env(); ++i) add(p.env()[i], (l >> i) & 1U);
  for (std::size_t i = 0; i < p.num_sys(); ++i) add(p.sys()[i], (l >> (p.num_env() + i)) & 1U);
  return out.empty() ? "t" : out;
}

std::string label_text(Automaton& a, StateId s) {
  std::string out = to_string(a.master(s)) + " ;";
  for (auto& [atom, f] : a.progress(s)) out += " #" + std::to_string(atom) + ":" + to_string(f);
  return out;
}

}  // namespace

void write_hoa(Automaton& a, std::ostream& out, std::size_t maxStates) {
  auto states = reachable(a, maxStates);
  std::uint32_t maxPrio = 1;
  for (StateId s : states)
    for (std::uint64_t l = 0; l < a.num_letters(); ++l) maxPrio = std::max(maxPrio, a.successor(s, l).priority);
  const auto& p = a.partition();
  out << "HOA: v1\nStates: " << states.size() << "\nStart: " << a.initial() << "\nAP: " << p.width();
  for (PropId id : p.env()) out << " \"" << prop_name(id) << '"';
  for (PropId id : p.sys()) out << " \"" << prop_name(id) << '"';
  out << "\nacc-name: parity min even " << (maxPrio + 1) << "\n--BODY--\n";
  for (StateId s : states) {
    out << "State: " << s << " \"" << label_text(a, s) << "\"\n";
    for (std::uint64_t l = 0; l < a.num_letters(); ++l) {
      Transition t = a.successor(s, l);
      out << "  [" << letter_text(p, l) << "] " << t.target << " {" << t.priority << "}\n";
    }
  }
  out << "--END--\n";
}

void write_aut_dot(Automaton& a, std::ostream& out, std::size_t maxStates) {
  auto states = reachable(a, maxStates);
  out << "digraph automaton {\n  rankdir=LR;\n";
  for (StateId s : states) out << "  q" << s << " [shape=box,label=\"" << label_text(a, s) << "\"];\n";
  for (StateId s : states) {
    std::map<std::pair<StateId, std::uint32_t>, std::vector<std::uint64_t>> grouped;
    for (std::uint64_t l = 0; l < a.num_letters(); ++l) {
      Transition t = a.successor(s, l);
      grouped[{t.target, t.priority}].push_back(l);
    }
    for (auto& [key, letters] : grouped) {
      out << "  q" << s << " -> q" << key.first << " [label=\"" << letters.size() << " letters / " << key.second
          << "\"];\n";
    }
  }
  out << "}\n";
}

}  // namespace semsyn
