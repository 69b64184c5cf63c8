#pragma once

// Recursive-descent parsers for the textual surfaces: terms, formulas,
// sequents (classical and intuitionistic), Lambek types and MLL formulas.
// ASCII is canonical; the unicode connectives are accepted as input aliases.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ttl/formula.hpp"
#include "ttl/sequent.hpp"
#include "ttl/term.hpp"

namespace ttl {

// --------------------------------------------------------------------------
// Lambek and MLL surface types (the translations consume these).

struct LambekType;
using LambekPtr = std::shared_ptr<const LambekType>;

struct LambekType {
  enum class Tag { Lit, Product, Under, Over } tag;  // Under = A\B, Over = B/A
  std::string lit;
  LambekPtr l, r;

  static LambekPtr literal(std::string s) {
    return std::make_shared<LambekType>(LambekType{Tag::Lit, std::move(s), nullptr, nullptr});
  }
  static LambekPtr mk(Tag t, LambekPtr a, LambekPtr b) {
    return std::make_shared<LambekType>(LambekType{t, {}, std::move(a), std::move(b)});
  }
};

struct LambekSequent {
  std::vector<LambekPtr> antecedent;
  LambekPtr succedent;
};

struct MllFormula;
using MllPtr = std::shared_ptr<const MllFormula>;

struct MllFormula {
  enum class Tag { Lit, Tensor, Par } tag;
  std::string lit;
  bool negated = false;
  MllPtr l, r;

  static MllPtr literal(std::string s, bool neg) {
    return std::make_shared<MllFormula>(MllFormula{Tag::Lit, std::move(s), neg, nullptr, nullptr});
  }
  static MllPtr mk(Tag t, MllPtr a, MllPtr b) {
    return std::make_shared<MllFormula>(MllFormula{t, {}, false, std::move(a), std::move(b)});
  }
};

inline MllPtr mll_dual(const MllPtr& f) {
  switch (f->tag) {
    case MllFormula::Tag::Lit:
      return MllFormula::literal(f->lit, !f->negated);
    case MllFormula::Tag::Tensor:
      return MllFormula::mk(MllFormula::Tag::Par, mll_dual(f->r), mll_dual(f->l));
    case MllFormula::Tag::Par:
      return MllFormula::mk(MllFormula::Tag::Tensor, mll_dual(f->r), mll_dual(f->l));
  }
  throw Error(Error::Kind::Internal, "bad mll formula");
}

inline bool mll_equal(const MllPtr& a, const MllPtr& b) {
  if (a->tag != b->tag) return false;
  if (a->tag == MllFormula::Tag::Lit) return a->lit == b->lit && a->negated == b->negated;
  return mll_equal(a->l, b->l) && mll_equal(a->r, b->r);
}

inline std::string print_mll(const MllPtr& f, bool paren = false) {
  switch (f->tag) {
    case MllFormula::Tag::Lit:
      return (f->negated ? "~" : "") + f->lit;
    case MllFormula::Tag::Tensor:
    case MllFormula::Tag::Par: {
      std::string op = f->tag == MllFormula::Tag::Tensor ? " * " : " | ";
      std::string body = print_mll(f->l, true) + op + print_mll(f->r, true);
      return paren ? "(" + body + ")" : body;
    }
  }
  return "?";
}

inline std::string print_lambek(const LambekPtr& t, bool paren = false) {
  switch (t->tag) {
    case LambekType::Tag::Lit:
      return t->lit;
    case LambekType::Tag::Product:
      return paren ? "(" + print_lambek(t->l, true) + " . " + print_lambek(t->r, true) + ")"
                   : print_lambek(t->l, true) + " . " + print_lambek(t->r, true);
    case LambekType::Tag::Under:
      return paren ? "(" + print_lambek(t->l, true) + " \\ " + print_lambek(t->r, true) + ")"
                   : print_lambek(t->l, true) + " \\ " + print_lambek(t->r, true);
    case LambekType::Tag::Over:
      return paren ? "(" + print_lambek(t->l, true) + " / " + print_lambek(t->r, true) + ")"
                   : print_lambek(t->l, true) + " / " + print_lambek(t->r, true);
  }
  return "?";
}

// --------------------------------------------------------------------------
// Lexer.

namespace detail {

struct Tok {
  enum class Kind {
    Name, LBracket, RBracket, LParen, RParen, LBrace, RBrace, Caret, Under,
    Dot, Comma, Star, Bar, Tilde, Lolli, Turnstile, Backslash, Slash,
    DoubleColon, Colon, Equals, End
  } kind;
  std::string text;
  size_t pos = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { next(); }

  const Tok& peek() const { return tok_; }
  Tok take() {
    Tok t = tok_;
    next();
    return t;
  }
  bool at(Tok::Kind k) const { return tok_.kind == k; }
  Tok expect(Tok::Kind k, const char* what) {
    if (tok_.kind != k)
      throw Error(Error::Kind::ParseError,
                  std::string("expected ") + what + " near '" + tok_.text + "' at offset " +
                      std::to_string(tok_.pos));
    return take();
  }

 private:
  static bool name_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '\'';
  }

  bool eat_alias(std::string_view utf8, Tok::Kind k, const char* ascii) {
    if (src_.substr(i_, utf8.size()) == utf8) {
      tok_ = {k, std::string(ascii), i_};
      i_ += utf8.size();
      return true;
    }
    return false;
  }

  void next() {
    while (i_ < src_.size()) {
      char c = src_[i_];
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        ++i_;
        continue;
      }
      if (c == '#') {
        while (i_ < src_.size() && src_[i_] != '\n') ++i_;
        continue;
      }
      break;
    }
    if (i_ >= src_.size()) {
      tok_ = {Tok::Kind::End, "", i_};
      return;
    }
    size_t start = i_;
    char c = src_[i_];
    switch (c) {
      case '[': tok_ = {Tok::Kind::LBracket, "[", start}; ++i_; return;
      case ']': tok_ = {Tok::Kind::RBracket, "]", start}; ++i_; return;
      case '(': tok_ = {Tok::Kind::LParen, "(", start}; ++i_; return;
      case ')': tok_ = {Tok::Kind::RParen, ")", start}; ++i_; return;
      case '{': tok_ = {Tok::Kind::LBrace, "{", start}; ++i_; return;
      case '}': tok_ = {Tok::Kind::RBrace, "}", start}; ++i_; return;
      case '^': tok_ = {Tok::Kind::Caret, "^", start}; ++i_; return;
      case '.': tok_ = {Tok::Kind::Dot, ".", start}; ++i_; return;
      case ',': tok_ = {Tok::Kind::Comma, ",", start}; ++i_; return;
      case '*': tok_ = {Tok::Kind::Star, "*", start}; ++i_; return;
      case '~': tok_ = {Tok::Kind::Tilde, "~", start}; ++i_; return;
      case '\\': tok_ = {Tok::Kind::Backslash, "\\", start}; ++i_; return;
      case '/': tok_ = {Tok::Kind::Slash, "/", start}; ++i_; return;
      case '=': tok_ = {Tok::Kind::Equals, "=", start}; ++i_; return;
      default: break;
    }
    if (c == '|') {
      if (i_ + 1 < src_.size() && src_[i_ + 1] == '-') {
        tok_ = {Tok::Kind::Turnstile, "|-", start};
        i_ += 2;
      } else {
        tok_ = {Tok::Kind::Bar, "|", start};
        ++i_;
      }
      return;
    }
    if (c == '-') {
      if (i_ + 1 < src_.size() && src_[i_ + 1] == 'o') {
        tok_ = {Tok::Kind::Lolli, "-o", start};
        i_ += 2;
        return;
      }
      throw Error(Error::Kind::ParseError, "stray '-' at offset " + std::to_string(start));
    }
    if (c == ':') {
      if (i_ + 1 < src_.size() && src_[i_ + 1] == ':') {
        tok_ = {Tok::Kind::DoubleColon, "::", start};
        i_ += 2;
      } else {
        tok_ = {Tok::Kind::Colon, ":", start};
        ++i_;
      }
      return;
    }
    if (c == '_') {
      tok_ = {Tok::Kind::Under, "_", start};
      ++i_;
      return;
    }
    // Unicode aliases.
    if (eat_alias("⊗", Tok::Kind::Star, "*")) return;       // ⊗
    if (eat_alias("⅋", Tok::Kind::Bar, "|")) return;        // ⅋
    if (eat_alias("⊸", Tok::Kind::Lolli, "-o")) return;     // ⊸
    if (eat_alias("⊢", Tok::Kind::Turnstile, "|-")) return; // ⊢
    if (eat_alias("▷", Tok::Kind::DoubleColon, "::")) return;  // ▷
    if (eat_alias("·", Tok::Kind::Dot, ".")) return;        // ·
    if (src_.substr(i_, 3) == "⊥") {                        // ⊥
      tok_ = {Tok::Kind::Name, "bot", start};
      i_ += 3;
      return;
    }
    if (name_char(c)) {
      size_t end = i_;
      while (end < src_.size() && name_char(src_[end])) ++end;
      tok_ = {Tok::Kind::Name, std::string(src_.substr(i_, end - i_)), start};
      i_ = end;
      return;
    }
    throw Error(Error::Kind::ParseError,
                "unexpected character '" + std::string(1, c) + "' at offset " +
                    std::to_string(start));
  }

  std::string_view src_;
  size_t i_ = 0;
  Tok tok_;
};

}  // namespace detail

// --------------------------------------------------------------------------
// Term parsing: [a b]^i_j . (w) . []^i_j ; "1" is the empty product.

namespace detail {

// A bare index is a plain name; machine-minted "_k" names must be braced
// ("{_5}") so the leading underscore cannot be mistaken for the upper/lower
// separator of atoms and edges.
inline Index parse_index_name(Lexer& lx) {
  std::string name;
  if (lx.at(Tok::Kind::Under)) {
    lx.take();
    name = "_";
  }
  name += lx.expect(Tok::Kind::Name, "index name").text;
  return Index(name);
}

inline Index parse_index(Lexer& lx) {
  if (lx.at(Tok::Kind::LBrace)) {
    lx.take();
    Index i = parse_index_name(lx);
    lx.expect(Tok::Kind::RBrace, "}");
    return i;
  }
  Tok t = lx.expect(Tok::Kind::Name, "index name");
  return Index(t.text);
}

inline PseudoTerm parse_pseudo_term(Lexer& lx) {
  PseudoTerm p;
  bool first = true;
  for (;;) {
    if (!first) {
      if (!lx.at(Tok::Kind::Dot)) break;
      lx.take();
    }
    first = false;
    if (lx.at(Tok::Kind::LBracket)) {
      lx.take();
      Word w;
      while (lx.at(Tok::Kind::Name)) w.push_back(lx.take().text);
      lx.expect(Tok::Kind::RBracket, "]");
      lx.expect(Tok::Kind::Caret, "^ (edge endpoints)");
      Index up = parse_index(lx);
      lx.expect(Tok::Kind::Under, "_");
      Index low = parse_index(lx);
      p.add_edge(std::move(w), up, low);
    } else if (lx.at(Tok::Kind::LParen)) {
      lx.take();
      Word w;
      while (lx.at(Tok::Kind::Name)) w.push_back(lx.take().text);
      lx.expect(Tok::Kind::RParen, ")");
      p.add_loop(std::move(w));
    } else if (lx.at(Tok::Kind::Name) && lx.peek().text == "1") {
      lx.take();  // unit factor
    } else {
      throw Error(Error::Kind::ParseError, "expected a term factor near '" + lx.peek().text + "'");
    }
    if (lx.at(Tok::Kind::Dot)) continue;
    break;
  }
  return p;
}

}  // namespace detail

inline TensorTerm parse_term(std::string_view text) {
  detail::Lexer lx(text);
  PseudoTerm p = detail::parse_pseudo_term(lx);
  if (!lx.at(detail::Tok::Kind::End))
    throw Error(Error::Kind::ParseError, "trailing input after term: '" + lx.peek().text + "'");
  return TensorTerm::normalize(p);
}

// --------------------------------------------------------------------------
// Formula parsing.
//   precedence: ~  >  * = | (left assoc, mixing needs parens)  >  -o (right)

namespace detail {

inline std::vector<Index> parse_index_block(Lexer& lx) {
  std::vector<Index> out;
  if (lx.at(Tok::Kind::LBrace)) {
    lx.take();
    while (lx.at(Tok::Kind::Name) || lx.at(Tok::Kind::Under)) out.push_back(parse_index_name(lx));
    lx.expect(Tok::Kind::RBrace, "}");
  } else {
    out.push_back(Index(lx.expect(Tok::Kind::Name, "index name").text));
  }
  return out;
}

inline SFormulaPtr parse_formula_expr(Lexer& lx);

inline SFormulaPtr parse_formula_primary(Lexer& lx) {
  if (lx.at(Tok::Kind::LParen)) {
    lx.take();
    SFormulaPtr f = parse_formula_expr(lx);
    lx.expect(Tok::Kind::RParen, ")");
    return f;
  }
  if (lx.at(Tok::Kind::Tilde)) {
    lx.take();
    SFormulaPtr f = parse_formula_primary(lx);
    return SFormula::mk(SFormula::Tag::Neg, f, nullptr);
  }
  Tok name = lx.expect(Tok::Kind::Name, "literal");
  Atom a;
  if (name.text == "bot") {
    a.lit = kUnitLiteral;
    a.negated = true;
  } else {
    a.lit = name.text;
    a.negated = false;
  }
  if (lx.at(Tok::Kind::Caret)) {
    lx.take();
    a.upper = parse_index_block(lx);
  }
  if (lx.at(Tok::Kind::Under)) {
    lx.take();
    a.lower = parse_index_block(lx);
  }
  return SFormula::atom(std::move(a));
}

inline SFormulaPtr parse_formula_binary(Lexer& lx) {
  SFormulaPtr f = parse_formula_primary(lx);
  std::optional<Tok::Kind> op;
  while (lx.at(Tok::Kind::Star) || lx.at(Tok::Kind::Bar)) {
    Tok t = lx.take();
    if (op && *op != t.kind)
      throw Error(Error::Kind::ParseError, "mixing * and | requires parentheses");
    op = t.kind;
    SFormulaPtr rhs = parse_formula_primary(lx);
    f = SFormula::mk(t.kind == Tok::Kind::Star ? SFormula::Tag::Tensor : SFormula::Tag::Par, f,
                     rhs);
  }
  return f;
}

inline SFormulaPtr parse_formula_expr(Lexer& lx) {
  SFormulaPtr f = parse_formula_binary(lx);
  if (lx.at(Tok::Kind::Lolli)) {
    lx.take();
    SFormulaPtr rhs = parse_formula_expr(lx);  // right associative
    return SFormula::mk(SFormula::Tag::Lolli, f, rhs);
  }
  return f;
}

}  // namespace detail

inline SFormulaPtr parse_surface_formula(std::string_view text) {
  detail::Lexer lx(text);
  SFormulaPtr f = detail::parse_formula_expr(lx);
  if (!lx.at(detail::Tok::Kind::End))
    throw Error(Error::Kind::ParseError, "trailing input after formula: '" + lx.peek().text + "'");
  return f;
}

inline Formula parse_formula(std::string_view text) {
  Formula f = desugar(parse_surface_formula(text));
  if (auto bad = formula_ill_formed(f)) throw Error(Error::Kind::IllFormed, *bad);
  return f;
}

// --------------------------------------------------------------------------
// Sequents: classical "|- A, B"; intuitionistic "A, B |- C" converts to
// |- ~A, ~B, C.

struct ParsedSequent {
  Sequent classical;
  bool intuitionistic = false;
  std::vector<SFormulaPtr> antecedent;  // surface forms when intuitionistic
  SFormulaPtr succedent;
};

inline ParsedSequent parse_sequent_full(std::string_view text) {
  detail::Lexer lx(text);
  ParsedSequent out;
  if (lx.at(detail::Tok::Kind::Turnstile)) {
    lx.take();
    while (!lx.at(detail::Tok::Kind::End)) {
      out.classical.formulas.push_back(desugar(detail::parse_formula_expr(lx)));
      if (lx.at(detail::Tok::Kind::Comma)) {
        lx.take();
        continue;
      }
      break;
    }
  } else {
    out.intuitionistic = true;
    for (;;) {
      out.antecedent.push_back(detail::parse_formula_expr(lx));
      if (lx.at(detail::Tok::Kind::Comma)) {
        lx.take();
        continue;
      }
      break;
    }
    lx.expect(detail::Tok::Kind::Turnstile, "|-");
    out.succedent = detail::parse_formula_expr(lx);
    for (const auto& a : out.antecedent) out.classical.formulas.push_back(dual(desugar(a)));
    out.classical.formulas.push_back(desugar(out.succedent));
  }
  if (!lx.at(detail::Tok::Kind::End))
    throw Error(Error::Kind::ParseError, "trailing input after sequent: '" + lx.peek().text + "'");
  for (const auto& f : out.classical.formulas)
    if (auto bad = formula_ill_formed(f)) throw Error(Error::Kind::IllFormed, *bad);
  return out;
}

inline Sequent parse_sequent(std::string_view text) { return parse_sequent_full(text).classical; }

// Intuitionistic Γ ⊢ A as classical ⊢ ~Γ, A.
inline Sequent to_classical(const std::vector<Formula>& antecedent, const Formula& succedent) {
  Sequent s;
  for (const auto& a : antecedent) s.formulas.push_back(dual(a));
  s.formulas.push_back(succedent);
  return s;
}

// --------------------------------------------------------------------------
// Lambek types and sequents:  np, s, A \ B, B / A, A . B  and  "A, B |- C".

namespace detail {

inline LambekPtr parse_lambek_expr(Lexer& lx);

inline LambekPtr parse_lambek_primary(Lexer& lx) {
  if (lx.at(Tok::Kind::LParen)) {
    lx.take();
    LambekPtr t = parse_lambek_expr(lx);
    lx.expect(Tok::Kind::RParen, ")");
    return t;
  }
  Tok name = lx.expect(Tok::Kind::Name, "Lambek literal");
  return LambekType::literal(name.text);
}

inline LambekPtr parse_lambek_product(Lexer& lx) {
  LambekPtr t = parse_lambek_primary(lx);
  while (lx.at(Tok::Kind::Dot)) {
    lx.take();
    t = LambekType::mk(LambekType::Tag::Product, t, parse_lambek_primary(lx));
  }
  return t;
}

inline LambekPtr parse_lambek_expr(Lexer& lx) {
  LambekPtr t = parse_lambek_product(lx);
  while (lx.at(Tok::Kind::Backslash) || lx.at(Tok::Kind::Slash)) {
    Tok op = lx.take();
    LambekPtr rhs = parse_lambek_product(lx);
    t = LambekType::mk(
        op.kind == Tok::Kind::Backslash ? LambekType::Tag::Under : LambekType::Tag::Over, t, rhs);
  }
  return t;
}

}  // namespace detail

inline LambekSequent parse_lambek_sequent(std::string_view text) {
  detail::Lexer lx(text);
  LambekSequent s;
  if (!lx.at(detail::Tok::Kind::Turnstile)) {
    for (;;) {
      s.antecedent.push_back(detail::parse_lambek_expr(lx));
      if (lx.at(detail::Tok::Kind::Comma)) {
        lx.take();
        continue;
      }
      break;
    }
  }
  lx.expect(detail::Tok::Kind::Turnstile, "|-");
  s.succedent = detail::parse_lambek_expr(lx);
  if (!lx.at(detail::Tok::Kind::End))
    throw Error(Error::Kind::ParseError, "trailing input after Lambek sequent");
  return s;
}

// --------------------------------------------------------------------------
// MLL formulas and sequents (formula syntax without indices).

namespace detail {

inline MllPtr parse_mll_expr(Lexer& lx);

inline MllPtr parse_mll_primary(Lexer& lx) {
  if (lx.at(Tok::Kind::LParen)) {
    lx.take();
    MllPtr f = parse_mll_expr(lx);
    lx.expect(Tok::Kind::RParen, ")");
    return f;
  }
  if (lx.at(Tok::Kind::Tilde)) {
    lx.take();
    MllPtr f = parse_mll_primary(lx);
    return mll_dual(f);
  }
  Tok name = lx.expect(Tok::Kind::Name, "MLL literal");
  return MllFormula::literal(name.text, false);
}

inline MllPtr parse_mll_expr(Lexer& lx) {
  MllPtr f = parse_mll_primary(lx);
  std::optional<Tok::Kind> op;
  while (lx.at(Tok::Kind::Star) || lx.at(Tok::Kind::Bar)) {
    Tok t = lx.take();
    if (op && *op != t.kind)
      throw Error(Error::Kind::ParseError, "mixing * and | requires parentheses");
    op = t.kind;
    f = MllFormula::mk(t.kind == Tok::Kind::Star ? MllFormula::Tag::Tensor : MllFormula::Tag::Par,
                       f, parse_mll_primary(lx));
  }
  return f;
}

}  // namespace detail

inline MllPtr parse_mll_formula(std::string_view text) {
  detail::Lexer lx(text);
  MllPtr f = detail::parse_mll_expr(lx);
  if (!lx.at(detail::Tok::Kind::End))
    throw Error(Error::Kind::ParseError, "trailing input after MLL formula");
  return f;
}

inline std::vector<MllPtr> parse_mll_sequent(std::string_view text) {
  detail::Lexer lx(text);
  lx.expect(detail::Tok::Kind::Turnstile, "|-");
  std::vector<MllPtr> out;
  for (;;) {
    out.push_back(detail::parse_mll_expr(lx));
    if (lx.at(detail::Tok::Kind::Comma)) {
      lx.take();
      continue;
    }
    break;
  }
  if (!lx.at(detail::Tok::Kind::End))
    throw Error(Error::Kind::ParseError, "trailing input after MLL sequent");
  return out;
}

// --------------------------------------------------------------------------
// Valuation fixture lines:  p^{i}_{j} = [a]^i_j , [b c]^i_j

struct ValuationLine {
  Atom atom;
  std::vector<TensorTerm> terms;
};

inline std::optional<ValuationLine> parse_valuation_line(std::string_view text) {
  detail::Lexer lx(text);
  if (lx.at(detail::Tok::Kind::End)) return std::nullopt;
  ValuationLine out;
  SFormulaPtr f = detail::parse_formula_primary(lx);
  if (f->tag != SFormula::Tag::Atom)
    throw Error(Error::Kind::ParseError, "valuation line must start with an atom");
  out.atom = f->a;
  lx.expect(detail::Tok::Kind::Equals, "=");
  for (;;) {
    PseudoTerm p = detail::parse_pseudo_term(lx);
    out.terms.push_back(TensorTerm::normalize(p));
    if (lx.at(detail::Tok::Kind::Comma)) {
      lx.take();
      continue;
    }
    break;
  }
  if (!lx.at(detail::Tok::Kind::End))
    throw Error(Error::Kind::ParseError, "trailing input after valuation line");
  return out;
}

}  // namespace ttl
