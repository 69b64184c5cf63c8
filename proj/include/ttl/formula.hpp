#pragma once

// Classical tensor formulas: atoms with index lists, tensor and par, with
// duality as a defined operation.  The unit 1^i_j and counit bot^j_i are the
// positive and negated faces of the builtin literal "1".  Intuitionistic
// formulas are a parsed surface (A -o B desugars to ~A | B); the induction
// defining intuitionistic index polarities lives on that surface.

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ttl/core.hpp"

namespace ttl {

constexpr const char* kUnitLiteral = "1";

struct Atom {
  std::string lit;
  bool negated = false;
  std::vector<Index> upper;
  std::vector<Index> lower;

  bool operator==(const Atom& o) const {
    return lit == o.lit && negated == o.negated && upper == o.upper && lower == o.lower;
  }
};

class Formula {
 public:
  enum class Conn { Tensor, Par };

  Formula() = default;

  static Formula atom(Atom a) {
    Formula f;
    f.n_ = std::make_shared<Node>(Node{std::move(a), Conn::Tensor, {}, {}});
    return f;
  }
  static Formula unit(Index i, Index j) { return atom({kUnitLiteral, false, {i}, {j}}); }
  // bot^j_i = dual(1^i_j)
  static Formula counit(Index j, Index i) { return atom({kUnitLiteral, true, {j}, {i}}); }
  static Formula tensor(Formula a, Formula b) { return binary(Conn::Tensor, std::move(a), std::move(b)); }
  static Formula par(Formula a, Formula b) { return binary(Conn::Par, std::move(a), std::move(b)); }

  bool is_atom() const { return n_->a.has_value(); }
  const Atom& as_atom() const { return *n_->a; }
  Conn conn() const { return n_->conn; }
  const Formula& left() const { return n_->l; }
  const Formula& right() const { return n_->r; }

  bool is_unit() const { return is_atom() && n_->a->lit == kUnitLiteral && !n_->a->negated; }
  bool is_counit() const { return is_atom() && n_->a->lit == kUnitLiteral && n_->a->negated; }

  bool operator==(const Formula& o) const {
    if (n_ == o.n_) return true;
    if (is_atom() != o.is_atom()) return false;
    if (is_atom()) return as_atom() == o.as_atom();
    return conn() == o.conn() && left() == o.left() && right() == o.right();
  }
  bool operator!=(const Formula& o) const { return !(*this == o); }

  explicit operator bool() const { return n_ != nullptr; }

 private:
  struct Node {
    std::optional<Atom> a;
    Conn conn;
    Formula l, r;
  };

  static Formula binary(Conn c, Formula a, Formula b) {
    Formula f;
    f.n_ = std::make_shared<Node>(Node{std::nullopt, c, std::move(a), std::move(b)});
    return f;
  }

  std::shared_ptr<const Node> n_;
};

inline Formula dual(const Formula& f) {
  if (f.is_atom()) {
    Atom a = f.as_atom();
    Atom d;
    d.lit = a.lit;
    d.negated = !a.negated;
    d.upper.assign(a.lower.rbegin(), a.lower.rend());
    d.lower.assign(a.upper.rbegin(), a.upper.rend());
    return Formula::atom(std::move(d));
  }
  if (f.conn() == Formula::Conn::Tensor) return Formula::par(dual(f.right()), dual(f.left()));
  return Formula::tensor(dual(f.right()), dual(f.left()));
}

template <typename Fn>
inline void for_each_atom(const Formula& f, Fn&& fn) {
  if (f.is_atom()) {
    fn(f.as_atom());
    return;
  }
  for_each_atom(f.left(), fn);
  for_each_atom(f.right(), fn);
}

struct OccurrenceCounts {
  std::map<Index, int> upper;
  std::map<Index, int> lower;
};

inline void count_occurrences(const Formula& f, OccurrenceCounts& oc) {
  for_each_atom(f, [&](const Atom& a) {
    for (const auto& i : a.upper) oc.upper[i]++;
    for (const auto& i : a.lower) oc.lower[i]++;
  });
}

struct FormulaBoundary {
  std::set<Index> upper_free;
  std::set<Index> lower_free;
  std::set<Index> bound;
};

inline std::optional<std::string> formula_ill_formed(const Formula& f) {
  std::optional<std::string> bad;
  for_each_atom(f, [&](const Atom& a) {
    if (bad) return;
    std::set<Index> seen;
    for (const auto& i : a.upper)
      if (!seen.insert(i).second) bad = "atom " + a.lit + " repeats index " + i.name();
    for (const auto& i : a.lower)
      if (!seen.insert(i).second) bad = "atom " + a.lit + " repeats index " + i.name();
  });
  if (bad) return bad;
  OccurrenceCounts oc;
  count_occurrences(f, oc);
  for (const auto& [i, n] : oc.upper)
    if (n > 1) return "index " + i.name() + " has " + std::to_string(n) + " upper occurrences";
  for (const auto& [i, n] : oc.lower)
    if (n > 1) return "index " + i.name() + " has " + std::to_string(n) + " lower occurrences";
  return std::nullopt;
}

inline FormulaBoundary free_boundary(const Formula& f) {
  OccurrenceCounts oc;
  count_occurrences(f, oc);
  FormulaBoundary b;
  for (const auto& [i, n] : oc.upper) {
    (void)n;
    if (oc.lower.count(i))
      b.bound.insert(i);
    else
      b.upper_free.insert(i);
  }
  for (const auto& [i, n] : oc.lower) {
    (void)n;
    if (!oc.upper.count(i)) b.lower_free.insert(i);
  }
  return b;
}

inline bool occurs_in(const Formula& f, const Index& i) {
  bool found = false;
  for_each_atom(f, [&](const Atom& a) {
    for (const auto& k : a.upper)
      if (k == i) found = true;
    for (const auto& k : a.lower)
      if (k == i) found = true;
  });
  return found;
}

// Replaces every occurrence of `old_index` at the given polarity.  Callers
// guarantee it denotes a single free occurrence (see reparam_formula).
inline Formula substitute_polar(const Formula& f, Polarity pol, Index old_index, Index new_index) {
  if (f.is_atom()) {
    Atom a = f.as_atom();
    auto& side = pol == Polarity::Upper ? a.upper : a.lower;
    for (auto& i : side)
      if (i == old_index) i = new_index;
    return Formula::atom(std::move(a));
  }
  Formula l = substitute_polar(f.left(), pol, old_index, new_index);
  Formula r = substitute_polar(f.right(), pol, old_index, new_index);
  return f.conn() == Formula::Conn::Tensor ? Formula::tensor(l, r) : Formula::par(l, r);
}

// A^{[new/old]} (upper) / A_{[new/old]} (lower).
inline Formula reparam_formula(const Formula& f, Polarity pol, Index old_index, Index new_index) {
  FormulaBoundary b = free_boundary(f);
  const std::set<Index>& side = pol == Polarity::Upper ? b.upper_free : b.lower_free;
  if (!side.count(old_index))
    throw Error(Error::Kind::NotFree,
                "index " + old_index.name() + " is not free " + to_string(pol) + " in the formula");
  if (occurs_in(f, new_index))
    throw Error(Error::Kind::WouldBind, "index " + new_index.name() + " already occurs in the formula");
  return substitute_polar(f, pol, old_index, new_index);
}

inline int complexity_formula(const Formula& f) {
  if (f.is_atom()) return 1;
  return complexity_formula(f.left()) + complexity_formula(f.right()) + 1;
}

// Renames every index by the map (both polarities), leaving unmapped names
// alone.  Used for canonical forms and instantiation, where the caller owns
// well-formedness.
inline Formula rename_indices(const Formula& f, const std::map<Index, Index>& m) {
  if (f.is_atom()) {
    Atom a = f.as_atom();
    for (auto& i : a.upper) {
      auto it = m.find(i);
      if (it != m.end()) i = it->second;
    }
    for (auto& i : a.lower) {
      auto it = m.find(i);
      if (it != m.end()) i = it->second;
    }
    return Formula::atom(std::move(a));
  }
  Formula l = rename_indices(f.left(), m);
  Formula r = rename_indices(f.right(), m);
  return f.conn() == Formula::Conn::Tensor ? Formula::tensor(l, r) : Formula::par(l, r);
}

// Canonical representative of the alpha class: bound indices renumbered
// "%1", "%2", ... in leftmost-innermost traversal order.
inline Formula alpha_canonical(const Formula& f) {
  FormulaBoundary b = free_boundary(f);
  std::map<Index, Index> m;
  int next = 0;
  for_each_atom(f, [&](const Atom& a) {
    for (const auto& i : a.upper)
      if (b.bound.count(i) && !m.count(i)) m.emplace(i, Index("%" + std::to_string(++next)));
    for (const auto& i : a.lower)
      if (b.bound.count(i) && !m.count(i)) m.emplace(i, Index("%" + std::to_string(++next)));
  });
  return rename_indices(f, m);
}

inline bool alpha_eq(const Formula& a, const Formula& b) {
  return alpha_canonical(a) == alpha_canonical(b);
}

// ---------------------------------------------------------------------------
// Printing.  ASCII is canonical: atoms p^{i k}_{j l} (braces dropped for a
// single index), negated atoms rendered through ~, units 1^i_j / bot^j_i.

inline std::string print_index_block(const std::vector<Index>& v, char mark) {
  if (v.empty()) return "";
  std::string out;
  out += mark;
  // Machine-minted names start with '_' and must be braced to reparse.
  if (v.size() == 1 && v[0].name()[0] != '_') {
    out += v[0].name();
    return out;
  }
  out += '{';
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += v[i].name();
  }
  out += '}';
  return out;
}

inline std::string print_formula(const Formula& f, bool parenthesize = false);

inline std::string print_atom(const Atom& a) {
  if (a.lit == kUnitLiteral) {
    std::string name = a.negated ? "bot" : "1";
    return name + print_index_block(a.upper, '^') + print_index_block(a.lower, '_');
  }
  if (a.negated) {
    // ~p^I_J parses to the negated atom with reversed swapped lists, so print
    // the pre-image.
    std::vector<Index> up(a.lower.rbegin(), a.lower.rend());
    std::vector<Index> low(a.upper.rbegin(), a.upper.rend());
    return "~" + a.lit + print_index_block(up, '^') + print_index_block(low, '_');
  }
  return a.lit + print_index_block(a.upper, '^') + print_index_block(a.lower, '_');
}

inline std::string print_formula(const Formula& f, bool parenthesize) {
  if (f.is_atom()) return print_atom(f.as_atom());
  std::string op = f.conn() == Formula::Conn::Tensor ? " * " : " | ";
  std::string body = print_formula(f.left(), true) + op + print_formula(f.right(), true);
  return parenthesize ? "(" + body + ")" : body;
}

// Re-sugared printer: a par whose left child consists entirely of negated
// material prints as dual(left) -o right.  Falls back to the classical form.
inline bool all_atoms_negated(const Formula& f) {
  bool all = true;
  for_each_atom(f, [&](const Atom& a) {
    if (!a.negated) all = false;
  });
  return all;
}

inline std::string print_formula_sugared(const Formula& f, bool parenthesize = false) {
  if (f.is_atom()) return print_atom(f.as_atom());
  if (f.conn() == Formula::Conn::Par && all_atoms_negated(f.left())) {
    std::string body =
        print_formula_sugared(dual(f.left()), true) + " -o " + print_formula_sugared(f.right());
    return parenthesize ? "(" + body + ")" : body;
  }
  std::string op = f.conn() == Formula::Conn::Tensor ? " * " : " | ";
  std::string body = print_formula_sugared(f.left(), true) + op + print_formula_sugared(f.right(), true);
  return parenthesize ? "(" + body + ")" : body;
}

// ---------------------------------------------------------------------------
// Surface formulas: what the parser produces.  Keeps -o nodes so the
// intuitionistic polarity partition can be computed before desugaring.

struct SFormula;
using SFormulaPtr = std::shared_ptr<const SFormula>;

struct SFormula {
  enum class Tag { Atom, Neg, Tensor, Par, Lolli } tag;
  Atom a;  // Tag::Atom (negated unused; "bot" arrives as lit "1", negated)
  SFormulaPtr l, r;

  static SFormulaPtr atom(Atom at) {
    return std::make_shared<SFormula>(SFormula{Tag::Atom, std::move(at), nullptr, nullptr});
  }
  static SFormulaPtr mk(Tag t, SFormulaPtr a, SFormulaPtr b) {
    return std::make_shared<SFormula>(SFormula{t, {}, std::move(a), std::move(b)});
  }
};

inline Formula desugar(const SFormulaPtr& s) {
  switch (s->tag) {
    case SFormula::Tag::Atom:
      return Formula::atom(s->a);
    case SFormula::Tag::Neg:
      return dual(desugar(s->l));
    case SFormula::Tag::Tensor:
      return Formula::tensor(desugar(s->l), desugar(s->r));
    case SFormula::Tag::Par:
      return Formula::par(desugar(s->l), desugar(s->r));
    case SFormula::Tag::Lolli:
      return Formula::par(dual(desugar(s->l)), desugar(s->r));
  }
  throw Error(Error::Kind::Internal, "bad surface formula");
}

inline bool is_intuitionistic_surface(const SFormulaPtr& s) {
  switch (s->tag) {
    case SFormula::Tag::Atom:
      return !s->a.negated;
    case SFormula::Tag::Neg:
    case SFormula::Tag::Par:
      return false;
    case SFormula::Tag::Tensor:
    case SFormula::Tag::Lolli:
      return is_intuitionistic_surface(s->l) && is_intuitionistic_surface(s->r);
  }
  return false;
}

// Index polarities of an intuitionistic pseudoformula:
//   I•(p^I_J) = I,              I_•(p^I_J) = J,
//   I•(A ⊗ B) = I•(A) ∪ I•(B),  I_•(A ⊗ B) = I_•(A) ∪ I_•(B),
//   I•(A ⊸ B) = I•(B) ∪ I_•(A), I_•(A ⊸ B) = I_•(B) ∪ I•(A).
inline std::pair<std::set<Index>, std::set<Index>> polarity_sets(const SFormulaPtr& s) {
  if (!is_intuitionistic_surface(s))
    throw Error(Error::Kind::InvalidInput, "polarity sets are defined for intuitionistic formulas");
  switch (s->tag) {
    case SFormula::Tag::Atom: {
      std::set<Index> up(s->a.upper.begin(), s->a.upper.end());
      std::set<Index> low(s->a.lower.begin(), s->a.lower.end());
      return {up, low};
    }
    case SFormula::Tag::Tensor: {
      auto [u1, l1] = polarity_sets(s->l);
      auto [u2, l2] = polarity_sets(s->r);
      u1.insert(u2.begin(), u2.end());
      l1.insert(l2.begin(), l2.end());
      return {u1, l1};
    }
    case SFormula::Tag::Lolli: {
      auto [ua, la] = polarity_sets(s->l);
      auto [ub, lb] = polarity_sets(s->r);
      std::set<Index> up = ub;
      up.insert(la.begin(), la.end());
      std::set<Index> low = lb;
      low.insert(ua.begin(), ua.end());
      return {up, low};
    }
    default:
      throw Error(Error::Kind::Internal, "unreachable");
  }
}

}  // namespace ttl
