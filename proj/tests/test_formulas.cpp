#include "doctest.h"
#include "support/gen.hpp"
#include "ttl/formula.hpp"
#include "ttl/parse.hpp"

using namespace ttl;

namespace {
Index ix(const char* s) { return Index(s); }
}

TEST_CASE("dual of atoms reverses and swaps index lists") {
  Formula p = Formula::atom({"p", false, {ix("i1"), ix("i2")}, {ix("j1")}});
  Formula d = dual(p);
  CHECK(d.as_atom().negated);
  CHECK(d.as_atom().upper == std::vector<Index>{ix("j1")});
  CHECK(d.as_atom().lower == std::vector<Index>{ix("i2"), ix("i1")});
  CHECK(dual(Formula::unit(ix("i"), ix("j"))) == Formula::counit(ix("j"), ix("i")));
}

TEST_CASE("dual is an involution and swaps the free boundary") {
  gen::Rng rng(5);
  int names = 0;
  for (int n = 0; n < 200; ++n) {
    Formula f = gen::random_flat_formula(rng, names, {"a", "b"}, rng.below(4));
    CHECK(dual(dual(f)) == f);
    FormulaBoundary fb = free_boundary(f), db = free_boundary(dual(f));
    CHECK(fb.upper_free == db.lower_free);
    CHECK(fb.lower_free == db.upper_free);
    CHECK(fb.bound == db.bound);
  }
}

TEST_CASE("de morgan shape") {
  Formula a = parse_formula("a^i_j");
  Formula b = parse_formula("b^k_l");
  CHECK(dual(Formula::tensor(a, b)) == Formula::par(dual(b), dual(a)));
  CHECK(dual(Formula::par(a, b)) == Formula::tensor(dual(b), dual(a)));
}

TEST_CASE("free boundary and bound indices") {
  Formula f = parse_formula("a^i_j * b^j_k");
  FormulaBoundary b = free_boundary(f);
  CHECK(b.upper_free == std::set<Index>{ix("i")});
  CHECK(b.lower_free == std::set<Index>{ix("k")});
  CHECK(b.bound == std::set<Index>{ix("j")});

  CHECK(free_boundary(parse_formula("a^i_j")).bound.empty());

  FormulaBoundary c = free_boundary(parse_formula("a^i_j | ~a^j_i"));
  CHECK(c.upper_free.empty());
  CHECK(c.lower_free.empty());
  CHECK(c.bound == std::set<Index>{ix("i"), ix("j")});
}

TEST_CASE("well-formedness rejects repeated occurrences") {
  CHECK(formula_ill_formed(parse_formula("a^i_j * b^j_k")) == std::nullopt);
  Formula bad = Formula::tensor(Formula::atom({"a", false, {ix("i")}, {ix("j")}}),
                                Formula::atom({"b", false, {ix("i")}, {ix("k")}}));
  CHECK(formula_ill_formed(bad).has_value());
  Formula bad_atom = Formula::atom({"a", false, {ix("i"), ix("i")}, {}});
  CHECK(formula_ill_formed(bad_atom).has_value());
}

TEST_CASE("alpha equivalence renames bound indices only") {
  CHECK(alpha_eq(parse_formula("a^i_j * b^j_k"), parse_formula("a^i_m * b^m_k")));
  CHECK_FALSE(alpha_eq(parse_formula("a^i_j * b^j_k"), parse_formula("a^i_j * b^j_l")));
  // rebracketing is not alpha equivalence
  CHECK_FALSE(alpha_eq(parse_formula("(a^i_j * b^j_k) * c^x_y"),
                       parse_formula("a^i_j * (b^j_k * c^x_y)")));
}

TEST_CASE("reparameterization of formulas") {
  Formula a = parse_formula("a^i_j");
  CHECK(reparam_formula(a, Polarity::Upper, ix("i"), ix("k")) == parse_formula("a^k_j"));
  Formula f = parse_formula("a^i_j * b^j_k");
  CHECK_THROWS_AS(reparam_formula(f, Polarity::Upper, ix("j"), ix("m")), Error);  // bound
  CHECK_THROWS_AS(reparam_formula(f, Polarity::Upper, ix("i"), ix("j")), Error);  // would bind
}

TEST_CASE("formula complexity") {
  CHECK(complexity_formula(parse_formula("a^i_j")) == 1);
  CHECK(complexity_formula(parse_formula("a^i_j * b^k_l")) == 3);
  CHECK(complexity_formula(parse_formula("(a^i_j * b^k_l) | c^x_y")) == 5);
}

TEST_CASE("intuitionistic polarity sets") {
  // atoms
  auto [au, al] = polarity_sets(parse_surface_formula("p^i_j"));
  CHECK(au == std::set<Index>{ix("i")});
  CHECK(al == std::set<Index>{ix("j")});
  // hand-evaluated instance of the implication clause:
  //   I•(A -o B) = I•(B) ∪ I_•(A),  I_•(A -o B) = I_•(B) ∪ I•(A)
  auto [u, l] = polarity_sets(parse_surface_formula("a^i_j -o b^i_k"));
  CHECK(u == std::set<Index>{ix("i"), ix("j")});
  CHECK(l == std::set<Index>{ix("i"), ix("k")});
}

TEST_CASE("polarity sets agree with classical location after desugaring") {
  gen::Rng rng(19);
  for (int n = 0; n < 300; ++n) {
    // Random intuitionistic surface over fresh-indexed (1,1) atoms.
    int names = 0;
    std::function<SFormulaPtr(size_t)> go = [&](size_t conn) -> SFormulaPtr {
      if (conn == 0) {
        Atom a;
        a.lit = rng.chance(0.5) ? "a" : "b";
        a.upper = {ix(("u" + std::to_string(++names)).c_str())};
        a.lower = {ix(("u" + std::to_string(++names)).c_str())};
        return SFormula::atom(a);
      }
      size_t left = rng.below(conn);
      auto l = go(left), r = go(conn - 1 - left);
      return SFormula::mk(rng.chance(0.5) ? SFormula::Tag::Tensor : SFormula::Tag::Lolli, l, r);
    };
    SFormulaPtr s = go(rng.below(4));
    auto [up, low] = polarity_sets(s);
    Formula f = desugar(s);
    std::set<Index> gup, glow;
    for_each_atom(f, [&](const Atom& a) {
      gup.insert(a.upper.begin(), a.upper.end());
      glow.insert(a.lower.begin(), a.lower.end());
    });
    CHECK(up == gup);
    CHECK(low == glow);
  }
}

TEST_CASE("lolli desugars to dual-par") {
  CHECK(parse_formula("a^i_j -o b^k_l") == parse_formula("~a^i_j | b^k_l"));
  CHECK(parse_formula("~a^i_j") == dual(parse_formula("a^i_j")));
  // right associativity
  CHECK(parse_formula("a^i_j -o b^k_l -o c^m_n") ==
        parse_formula("a^i_j -o (b^k_l -o c^m_n)"));
}

TEST_CASE("parse-print-parse is the identity") {
  gen::Rng rng(29);
  int names = 0;
  for (int n = 0; n < 200; ++n) {
    Formula f = gen::random_flat_formula(rng, names, {"a", "b", "1"}, rng.below(4));
    CHECK(parse_formula(print_formula(f)) == f);
    CHECK(parse_formula(print_formula_sugared(f)) == f);
  }
  for (const char* text :
       {"a^i_j", "bot^j_i", "1^i_j", "a^{i k}_{j}", "(a^i_j * b^j_k) | c^x_y",
        "a^i_j -o a^i_k", "~(a^i_j * b^k_l)"}) {
    Formula f = parse_formula(text);
    CHECK(parse_formula(print_formula(f)) == f);
  }
}

TEST_CASE("unicode aliases parse") {
  CHECK(parse_formula("a^i_j ⊗ b^j_k") == parse_formula("a^i_j * b^j_k"));
  CHECK(parse_formula("a^i_j ⅋ b^j_k") == parse_formula("a^i_j | b^j_k"));
  CHECK(parse_formula("a^i_j ⊸ a^i_k") == parse_formula("a^i_j -o a^i_k"));
  CHECK(parse_formula("⊥^j_i") == parse_formula("bot^j_i"));
}

TEST_CASE("braced machine index names round trip") {
  Formula f = Formula::atom({"a", false, {Index("_5")}, {ix("j")}});
  CHECK(parse_formula(print_formula(f)) == f);
}
