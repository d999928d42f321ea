#include "semsyn/measures.hpp"

#include <algorithm>
#include <bit>
#include <random>
#include <unordered_map>
#include <vector>

namespace semsyn {

namespace {

constexpr std::uint64_t kPattern[6] = {
    0xAAAAAAAAAAAAAAAAULL, 0xCCCCCCCCCCCCCCCCULL, 0xF0F0F0F0F0F0F0F0ULL,
    0xFF00FF00FF00FF00ULL, 0xFFFF0000FFFF0000ULL, 0xFFFFFFFF00000000ULL,
};

// Propositional skeleton of a formula. Leaves are literals or temporal
// placeholders; a placeholder and its negation map to one variable.
struct Abstraction {
  struct Node {
    enum Kind : std::uint8_t { Const, Var, And, Or } kind;
    bool value = false;  // Const payload, or negation flag for Var
    std::uint32_t var = 0;
    std::vector<std::uint32_t> kids;
  };
  std::vector<Node> nodes;  // children precede parents; root is last
  std::vector<Formula> vars;
  std::vector<char> temporal;

  explicit Abstraction(Formula f) { build(f); }

  std::uint64_t eval_word(const std::vector<std::uint64_t>& varWords, std::vector<std::uint64_t>& scratch) const {
    scratch.resize(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const Node& n = nodes[i];
      switch (n.kind) {
        case Node::Const:
          scratch[i] = n.value ? ~0ULL : 0ULL;
          break;
        case Node::Var:
          scratch[i] = n.value ? ~varWords[n.var] : varWords[n.var];
          break;
        case Node::And: {
          std::uint64_t w = ~0ULL;
          for (auto k : n.kids) w &= scratch[k];
          scratch[i] = w;
          break;
        }
        case Node::Or: {
          std::uint64_t w = 0;
          for (auto k : n.kids) w |= scratch[k];
          scratch[i] = w;
          break;
        }
      }
    }
    return scratch.back();
  }

 private:
  std::uint32_t var_of(Formula key, bool isTemporal) {
    auto it = varIndex_.find(key);
    if (it != varIndex_.end()) return it->second;
    auto v = static_cast<std::uint32_t>(vars.size());
    vars.push_back(key);
    temporal.push_back(isTemporal);
    varIndex_.emplace(key, v);
    return v;
  }

  std::uint32_t build(Formula f) {
    if (auto it = memo_.find(f); it != memo_.end()) return it->second;
    Node n;
    switch (f.op()) {
      case Op::True:
      case Op::False:
        n.kind = Node::Const;
        n.value = f.is_true();
        break;
      case Op::Prop:
      case Op::NegProp:
        n.kind = Node::Var;
        n.var = var_of(prop(f.prop()), false);
        n.value = f.op() == Op::NegProp;
        break;
      case Op::And:
      case Op::Or:
        n.kind = f.op() == Op::And ? Node::And : Node::Or;
        for (Formula k : f.kids()) n.kids.push_back(build(k));
        break;
      default: {
        Formula neg = negate(f);
        Formula key = canon_less(neg, f) ? neg : f;
        n.kind = Node::Var;
        n.var = var_of(key, true);
        n.value = key != f;
        break;
      }
    }
    auto idx = static_cast<std::uint32_t>(nodes.size());
    nodes.push_back(std::move(n));
    memo_.emplace(f, idx);
    return idx;
  }

  std::unordered_map<Formula, std::uint32_t, FormulaHash> memo_;
  std::unordered_map<Formula, std::uint32_t, FormulaHash> varIndex_;
};

// Fills varWords for the exhaustive table word `w`: variable j is bit j of the
// assignment index.
void table_word(std::size_t nvars, std::uint64_t w, std::vector<std::uint64_t>& varWords) {
  varWords.resize(nvars);
  for (std::size_t j = 0; j < nvars; ++j) {
    varWords[j] = j < 6 ? kPattern[j] : (((w >> (j - 6)) & 1U) ? ~0ULL : 0ULL);
  }
}

// Full truth table over `order` (order[j] = abstraction var used as bit j).
std::vector<std::uint64_t> truth_table(const Abstraction& a, const std::vector<std::uint32_t>& order) {
  const std::size_t v = order.size();
  const std::uint64_t words = v < 6 ? 1 : (std::uint64_t{1} << (v - 6));
  const std::uint64_t valid = v < 6 ? ((std::uint64_t{1} << (std::uint64_t{1} << v)) - 1) : ~0ULL;
  std::vector<std::uint64_t> out(words);
  std::vector<std::uint64_t> bitWords, varWords(a.vars.size()), scratch;
  for (std::uint64_t w = 0; w < words; ++w) {
    table_word(v, w, bitWords);
    for (std::size_t j = 0; j < v; ++j) varWords[order[j]] = bitWords[j];
    out[w] = a.eval_word(varWords, scratch) & valid;
  }
  return out;
}

double trueness_uncached(Formula f) {
  if (f.is_true()) return 1.0;
  if (f.is_false()) return 0.0;
  Abstraction a(f);
  const std::size_t v = a.vars.size();
  if (v <= static_cast<std::size_t>(kTruenessExactCap)) {
    std::vector<std::uint32_t> order(v);
    for (std::size_t j = 0; j < v; ++j) order[j] = static_cast<std::uint32_t>(j);
    std::uint64_t count = 0;
    for (auto w : truth_table(a, order)) count += std::popcount(w);
    return static_cast<double>(count) / static_cast<double>(std::uint64_t{1} << v);
  }
  std::mt19937_64 rng(f.shash());
  std::vector<std::uint64_t> varWords(v), scratch;
  std::uint64_t count = 0;
  for (int w = 0; w < kTruenessSamples / 64; ++w) {
    for (auto& x : varWords) x = rng();
    count += std::popcount(a.eval_word(varWords, scratch));
  }
  return static_cast<double>(count) / kTruenessSamples;
}

bool block_all(const std::vector<std::uint64_t>& t, std::uint64_t start, std::uint64_t len) {
  if (len >= 64) {
    for (std::uint64_t w = start / 64; w < (start + len) / 64; ++w)
      if (t[w] != ~0ULL) return false;
    return true;
  }
  const std::uint64_t mask = ((std::uint64_t{1} << len) - 1) << (start % 64);
  return (t[start / 64] & mask) == mask;
}

bool block_any(const std::vector<std::uint64_t>& t, std::uint64_t start, std::uint64_t len) {
  if (len >= 64) {
    for (std::uint64_t w = start / 64; w < (start + len) / 64; ++w)
      if (t[w] != 0) return true;
    return false;
  }
  const std::uint64_t mask = ((std::uint64_t{1} << len) - 1) << (start % 64);
  return (t[start / 64] & mask) != 0;
}

}  // namespace

double trueness(Formula f) {
  thread_local std::unordered_map<const FormulaNode*, double> cache;
  if (auto it = cache.find(f.node()); it != cache.end()) return it->second;
  double t = trueness_uncached(f);
  cache.emplace(f.node(), t);
  return t;
}

double quantified_trueness(Formula f, const Partition& p, Player owner, Quantifier q) {
  if (f.is_true()) return 1.0;
  if (f.is_false()) return 0.0;
  Abstraction a(f);
  std::vector<std::uint32_t> opp, own;
  for (std::uint32_t j = 0; j < a.vars.size(); ++j) {
    bool owned = a.temporal[j] || p.owner(a.vars[j].prop()) == owner;
    (owned ? own : opp).push_back(j);
  }
  const std::size_t m = opp.size(), o = own.size();
  auto satisfied = [q](bool all, bool any) { return q == Quantifier::Forall ? all : any; };

  if (m + o <= static_cast<std::size_t>(kTruenessExactCap)) {
    std::vector<std::uint32_t> order = opp;
    order.insert(order.end(), own.begin(), own.end());
    auto table = truth_table(a, order);
    const std::uint64_t block = std::uint64_t{1} << m;
    std::uint64_t count = 0;
    for (std::uint64_t ow = 0; ow < (std::uint64_t{1} << o); ++ow) {
      const std::uint64_t start = ow * block;
      if (q == Quantifier::Forall ? block_all(table, start, block) : block_any(table, start, block)) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(std::uint64_t{1} << o);
  }

  // Sampled owner assignments; opponent side exhaustive when small, else sampled.
  std::mt19937_64 rng(f.shash() ^ (static_cast<std::uint64_t>(owner) << 1 | static_cast<std::uint64_t>(q)));
  constexpr int kOwnerSamples = 1024;
  const bool oppExact = m <= 12;
  const std::uint64_t oppWords = oppExact ? (m < 6 ? 1 : (std::uint64_t{1} << (m - 6))) : 4;
  const std::uint64_t oppValid = (oppExact && m < 6) ? ((std::uint64_t{1} << (std::uint64_t{1} << m)) - 1) : ~0ULL;
  std::vector<std::uint64_t> varWords(a.vars.size()), scratch, bitWords;
  int count = 0;
  for (int s = 0; s < kOwnerSamples; ++s) {
    for (auto j : own) varWords[j] = (rng() & 1U) ? ~0ULL : 0ULL;
    bool all = true, any = false;
    for (std::uint64_t w = 0; w < oppWords; ++w) {
      if (oppExact) {
        table_word(m, w, bitWords);
        for (std::size_t i = 0; i < m; ++i) varWords[opp[i]] = bitWords[i];
      } else {
        for (auto j : opp) varWords[j] = rng();
      }
      std::uint64_t r = a.eval_word(varWords, scratch) & oppValid;
      all = all && r == oppValid;
      any = any || r != 0;
    }
    if (satisfied(all, any)) ++count;
  }
  return static_cast<double>(count) / kOwnerSamples;
}

double controllability(Formula f, const Partition& p, Player owner) {
  std::unordered_map<Formula, double, FormulaHash> memo;
  auto rec = [&](auto&& self, Formula g) -> double {
    switch (g.op()) {
      case Op::True:
      case Op::False:
        return 1.0;
      case Op::Prop:
      case Op::NegProp:
        return p.owner(g.prop()) == owner ? 1.0 : 0.0;
      default:
        break;
    }
    if (auto it = memo.find(g); it != memo.end()) return it->second;
    double sum = 0;
    for (Formula k : g.kids()) sum += self(self, k);
    double r = sum / static_cast<double>(g.kids().size());
    memo.emplace(g, r);
    return r;
  };
  return rec(rec, f);
}

SyntacticMeasures syntactic_measures(Formula f) {
  thread_local std::unordered_map<const FormulaNode*, SyntacticMeasures> cache;
  auto rec = [&](auto&& self, Formula g) -> SyntacticMeasures {
    if (auto it = cache.find(g.node()); it != cache.end()) return it->second;
    SyntacticMeasures m;
    m.size = 1;
    m.temporalOps = g.is_temporal() ? 1 : 0;
    for (Formula k : g.kids()) {
      SyntacticMeasures c = self(self, k);
      m.size += c.size;
      m.temporalOps += c.temporalOps;
      m.height = std::max(m.height, c.height + 1);
    }
    m.topDisjuncts = g.op() == Op::Or ? g.kids().size() : 1;
    cache.emplace(g.node(), m);
    return m;
  };
  return rec(rec, f);
}

}  // namespace semsyn
