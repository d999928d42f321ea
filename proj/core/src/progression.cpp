#include "semsyn/progression.hpp"

#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace semsyn {

namespace {

Formula af_rec(Formula f, const Letter& l, std::unordered_map<Formula, Formula, FormulaHash>& memo) {
  switch (f.op()) {
    case Op::True:
    case Op::False:
      return f;
    case Op::Prop:
      return l.holds(f.prop()) ? tt() : ff();
    case Op::NegProp:
      return l.holds(f.prop()) ? ff() : tt();
    default:
      break;
  }
  if (auto it = memo.find(f); it != memo.end()) return it->second;
  Formula r;
  switch (f.op()) {
    case Op::And:
    case Op::Or: {
      std::vector<Formula> kids;
      kids.reserve(f.kids().size());
      for (Formula k : f.kids()) kids.push_back(af_rec(k, l, memo));
      r = f.op() == Op::And ? make_and(std::move(kids)) : make_or(std::move(kids));
      break;
    }
    case Op::Next:
      r = f.lhs();
      break;
    case Op::Finally:
      r = make_or(af_rec(f.lhs(), l, memo), f);
      break;
    case Op::Globally:
      r = make_and(af_rec(f.lhs(), l, memo), f);
      break;
    case Op::Until:
      r = make_or(af_rec(f.rhs(), l, memo), make_and(af_rec(f.lhs(), l, memo), f));
      break;
    case Op::Release:
      r = make_and(af_rec(f.rhs(), l, memo), make_or(af_rec(f.lhs(), l, memo), f));
      break;
    default:
      r = f;
  }
  memo.emplace(f, r);
  return r;
}

// Truth of every subformula at every lasso position, as one bool vector each.
class LassoEval {
 public:
  explicit LassoEval(const LassoWord& w) : w_(w), n_(w.stem.size() + w.loop.size()) {}

  const std::vector<char>& eval(Formula f) {
    if (auto it = memo_.find(f); it != memo_.end()) return it->second;
    std::vector<char> v(n_, 0);
    switch (f.op()) {
      case Op::True:
        v.assign(n_, 1);
        break;
      case Op::False:
        break;
      case Op::Prop:
      case Op::NegProp:
        for (std::size_t i = 0; i < n_; ++i) v[i] = letter(i).holds(f.prop()) == (f.op() == Op::Prop);
        break;
      case Op::And:
        v.assign(n_, 1);
        for (Formula k : f.kids()) {
          const auto& kv = eval(k);
          for (std::size_t i = 0; i < n_; ++i) v[i] = v[i] && kv[i];
        }
        break;
      case Op::Or:
        for (Formula k : f.kids()) {
          const auto& kv = eval(k);
          for (std::size_t i = 0; i < n_; ++i) v[i] = v[i] || kv[i];
        }
        break;
      case Op::Next: {
        const auto kv = eval(f.lhs());
        for (std::size_t i = 0; i < n_; ++i) v[i] = kv[succ(i)];
        break;
      }
      case Op::Finally:
      case Op::Globally:
      case Op::Until:
      case Op::Release: {
        const bool least = f.op() == Op::Finally || f.op() == Op::Until;
        std::vector<char> a, b;
        if (f.op() == Op::Until || f.op() == Op::Release) {
          a = eval(f.lhs());
          b = eval(f.rhs());
        } else {
          b = eval(f.lhs());
          a.assign(n_, f.op() == Op::Finally ? 1 : 0);
        }
        // F b == tt U b, G b == ff R b
        v.assign(n_, least ? 0 : 1);
        for (bool changed = true; changed;) {
          changed = false;
          for (std::size_t ii = n_; ii-- > 0;) {
            char nv = least ? (b[ii] || (a[ii] && v[succ(ii)])) : (b[ii] && (a[ii] || v[succ(ii)]));
            if (nv != v[ii]) {
              v[ii] = nv;
              changed = true;
            }
          }
        }
        break;
      }
    }
    return memo_.emplace(f, std::move(v)).first->second;
  }

 private:
  const Letter& letter(std::size_t i) const {
    return i < w_.stem.size() ? w_.stem[i] : w_.loop[i - w_.stem.size()];
  }
  std::size_t succ(std::size_t i) const { return i + 1 < n_ ? i + 1 : w_.stem.size(); }

  const LassoWord& w_;
  std::size_t n_;
  std::unordered_map<Formula, std::vector<char>, FormulaHash> memo_;
};

}  // namespace

Formula af(Formula f, const Letter& letter) {
  std::unordered_map<Formula, Formula, FormulaHash> memo;
  return af_rec(f, letter, memo);
}

bool eval_lasso(Formula f, const LassoWord& w) {
  if (w.loop.empty()) throw std::invalid_argument("lasso loop must be nonempty");
  LassoEval ev(w);
  return ev.eval(f)[0] != 0;
}

}  // namespace semsyn
