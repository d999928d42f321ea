#include "semsyn/parser.hpp"

#include <cctype>
#include <memory>
#include <string>
#include <vector>

#include "semsyn/errors.hpp"

namespace semsyn {

namespace {

enum class Tok { Ident, True, False, Not, And, Or, Implies, Iff, X, F, G, U, R, W, LParen, RParen, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
      std::string word(s.substr(start, i - start));
      Tok kind = Tok::Ident;
      if (word == "true") kind = Tok::True;
      else if (word == "false") kind = Tok::False;
      else if (word == "X") kind = Tok::X;
      else if (word == "F") kind = Tok::F;
      else if (word == "G") kind = Tok::G;
      else if (word == "U") kind = Tok::U;
      else if (word == "R") kind = Tok::R;
      else if (word == "W") kind = Tok::W;
      out.push_back({kind, std::move(word), start});
      continue;
    }
    switch (c) {
      case '0':
        out.push_back({Tok::False, "0", start});
        ++i;
        continue;
      case '1':
        out.push_back({Tok::True, "1", start});
        ++i;
        continue;
      case '!':
        out.push_back({Tok::Not, "!", start});
        ++i;
        continue;
      case '&':
        out.push_back({Tok::And, "&", start});
        ++i;
        continue;
      case '|':
        out.push_back({Tok::Or, "|", start});
        ++i;
        continue;
      case '(':
        out.push_back({Tok::LParen, "(", start});
        ++i;
        continue;
      case ')':
        out.push_back({Tok::RParen, ")", start});
        ++i;
        continue;
      case '-':
        if (s.substr(i, 2) == "->") {
          out.push_back({Tok::Implies, "->", start});
          i += 2;
          continue;
        }
        break;
      case '<':
        if (s.substr(i, 3) == "<->") {
          out.push_back({Tok::Iff, "<->", start});
          i += 3;
          continue;
        }
        break;
      default:
        break;
    }
    throw ParseError("unknown token '" + std::string(1, c) + "'", start);
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

// Parse tree before NNF conversion; negation and implications are still explicit.
struct Ast {
  enum Kind { Lit, Const, Not, And, Or, Implies, Iff, X, F, G, U, R, W } kind;
  std::string name;
  bool value = false;
  std::unique_ptr<Ast> a, b;
};

using AstPtr = std::unique_ptr<Ast>;

AstPtr node(Ast::Kind k, AstPtr a = nullptr, AstPtr b = nullptr) {
  auto n = std::make_unique<Ast>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  AstPtr parse() {
    auto e = iff();
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  Token next() { return toks_[pos_++]; }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError("syntax error: " + msg, peek().pos); }

  AstPtr iff() {
    auto lhs = implies();
    if (peek().kind == Tok::Iff) {
      next();
      return node(Ast::Iff, std::move(lhs), iff());
    }
    return lhs;
  }

  AstPtr implies() {
    auto lhs = disj();
    if (peek().kind == Tok::Implies) {
      next();
      return node(Ast::Implies, std::move(lhs), implies());
    }
    return lhs;
  }

  AstPtr disj() {
    auto lhs = conj();
    if (peek().kind == Tok::Or) {
      next();
      return node(Ast::Or, std::move(lhs), disj());
    }
    return lhs;
  }

  AstPtr conj() {
    auto lhs = binary_temporal();
    if (peek().kind == Tok::And) {
      next();
      return node(Ast::And, std::move(lhs), conj());
    }
    return lhs;
  }

  AstPtr binary_temporal() {
    auto lhs = unary();
    Ast::Kind k;
    switch (peek().kind) {
      case Tok::U:
        k = Ast::U;
        break;
      case Tok::R:
        k = Ast::R;
        break;
      case Tok::W:
        k = Ast::W;
        break;
      default:
        return lhs;
    }
    next();
    return node(k, std::move(lhs), binary_temporal());
  }

  AstPtr unary() {
    switch (peek().kind) {
      case Tok::Not:
        next();
        return node(Ast::Not, unary());
      case Tok::X:
        next();
        return node(Ast::X, unary());
      case Tok::F:
        next();
        return node(Ast::F, unary());
      case Tok::G:
        next();
        return node(Ast::G, unary());
      default:
        return atom();
    }
  }

  AstPtr atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Ident: {
        auto n = node(Ast::Lit);
        n->name = next().text;
        return n;
      }
      case Tok::True:
      case Tok::False: {
        auto n = node(Ast::Const);
        n->value = next().kind == Tok::True;
        return n;
      }
      case Tok::LParen: {
        next();
        auto e = iff();
        if (peek().kind != Tok::RParen) fail("expected ')'");
        next();
        return e;
      }
      case Tok::End:
        fail("unexpected end of input");
      default:
        fail("unexpected '" + t.text + "'");
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

Formula to_nnf(const Ast& n, bool neg) {
  switch (n.kind) {
    case Ast::Lit: {
      PropId p = intern_prop(n.name);
      return neg ? neg_prop(p) : prop(p);
    }
    case Ast::Const:
      return (n.value != neg) ? tt() : ff();
    case Ast::Not:
      return to_nnf(*n.a, !neg);
    case Ast::And:
      return neg ? make_or(to_nnf(*n.a, true), to_nnf(*n.b, true)) : make_and(to_nnf(*n.a, false), to_nnf(*n.b, false));
    case Ast::Or:
      return neg ? make_and(to_nnf(*n.a, true), to_nnf(*n.b, true)) : make_or(to_nnf(*n.a, false), to_nnf(*n.b, false));
    case Ast::Implies:
      // a -> b == !a | b
      return neg ? make_and(to_nnf(*n.a, false), to_nnf(*n.b, true)) : make_or(to_nnf(*n.a, true), to_nnf(*n.b, false));
    case Ast::Iff: {
      Formula a = to_nnf(*n.a, false), na = to_nnf(*n.a, true);
      Formula b = to_nnf(*n.b, false), nb = to_nnf(*n.b, true);
      if (neg) return make_or(make_and(a, nb), make_and(na, b));
      return make_or(make_and(a, b), make_and(na, nb));
    }
    case Ast::X:
      return make_next(to_nnf(*n.a, neg));
    case Ast::F:
      return neg ? make_globally(to_nnf(*n.a, true)) : make_finally(to_nnf(*n.a, false));
    case Ast::G:
      return neg ? make_finally(to_nnf(*n.a, true)) : make_globally(to_nnf(*n.a, false));
    case Ast::U:
      return neg ? make_release(to_nnf(*n.a, true), to_nnf(*n.b, true)) : make_until(to_nnf(*n.a, false), to_nnf(*n.b, false));
    case Ast::R:
      return neg ? make_until(to_nnf(*n.a, true), to_nnf(*n.b, true)) : make_release(to_nnf(*n.a, false), to_nnf(*n.b, false));
    case Ast::W: {
      // a W b == (a U b) | G a
      Formula pos = make_or(make_until(to_nnf(*n.a, false), to_nnf(*n.b, false)), make_globally(to_nnf(*n.a, false)));
      return neg ? negate(pos) : pos;
    }
  }
  return ff();
}

}  // namespace

Formula parse_ltl(std::string_view text) {
  Parser p(lex(text));
  auto ast = p.parse();
  return to_nnf(*ast, false);
}

}  // namespace semsyn
