#include "doctest.h"
#include "support/gen.hpp"
#include "ttl/parse.hpp"
#include "ttl/term.hpp"

using namespace ttl;

namespace {

Index ix(const char* s) { return Index(s); }

PseudoTerm to_pseudo(const TensorTerm& t) {
  PseudoTerm p;
  for (const auto& e : t.edges()) p.factors.push_back({e});
  for (const auto& l : t.loops()) p.factors.push_back({l});
  return p;
}

}  // namespace

TEST_CASE("normalize glues bound chains") {
  // [a]^i_j . [b]^k_l . [c]^j_k = [acb]^i_l
  PseudoTerm p;
  p.add_edge({"a"}, ix("i"), ix("j"));
  p.add_edge({"b"}, ix("k"), ix("l"));
  p.add_edge({"c"}, ix("j"), ix("k"));
  TensorTerm t = TensorTerm::normalize(p);
  CHECK(t == TensorTerm::edge({"a", "c", "b"}, ix("i"), ix("l")));
}

TEST_CASE("self-edge closes into a loop") {
  PseudoTerm p;
  p.add_edge({"w"}, ix("i"), ix("i"));
  CHECK(TensorTerm::normalize(p) == TensorTerm::loop({"w"}));
}

TEST_CASE("two-edge cycle closes into a loop") {
  PseudoTerm p;
  p.add_edge({"u"}, ix("i"), ix("j"));
  p.add_edge({"v"}, ix("j"), ix("i"));
  CHECK(TensorTerm::normalize(p) == TensorTerm::loop({"u", "v"}));
}

TEST_CASE("ill-formed pseudo-terms are rejected") {
  PseudoTerm p;
  p.add_edge({"a"}, ix("i"), ix("j"));
  p.add_edge({"b"}, ix("i"), ix("k"));
  CHECK_THROWS_AS(TensorTerm::normalize(p), Error);
}

TEST_CASE("normalize is idempotent") {
  gen::Rng rng(7);
  int names = 0;
  for (int n = 0; n < 200; ++n) {
    TensorTerm t = TensorTerm::normalize(gen::random_pseudo_term(rng, names));
    CHECK(TensorTerm::normalize(to_pseudo(t)) == t);
  }
}

TEST_CASE("single congruence rewrites preserve the normal form") {
  gen::Rng rng(11);
  int names = 0;
  int done = 0;
  while (done < 1000) {
    PseudoTerm p = gen::random_pseudo_term(rng, names, 5, 1);
    // Collect candidate rewrites.
    struct Rewrite {
      enum { Concat, Close, Rotate } kind;
      size_t a, b;
    };
    std::vector<Rewrite> cands;
    for (size_t a = 0; a < p.factors.size(); ++a) {
      const Edge* ea = std::get_if<Edge>(&p.factors[a].kind);
      if (!ea) {
        if (std::get<Loop>(p.factors[a].kind).word.size() > 1)
          cands.push_back({Rewrite::Rotate, a, 0});
        continue;
      }
      if (ea->upper == ea->lower) cands.push_back({Rewrite::Close, a, 0});
      for (size_t b = 0; b < p.factors.size(); ++b) {
        if (a == b) continue;
        const Edge* eb = std::get_if<Edge>(&p.factors[b].kind);
        if (eb && ea->lower == eb->upper && ea->upper != ea->lower && eb->upper != eb->lower)
          cands.push_back({Rewrite::Concat, a, b});
      }
    }
    if (cands.empty()) continue;
    Rewrite r = cands[rng.below(cands.size())];
    PseudoTerm q;
    for (size_t k = 0; k < p.factors.size(); ++k) {
      if (k == r.a || (r.kind == Rewrite::Concat && k == r.b)) continue;
      q.factors.push_back(p.factors[k]);
    }
    if (r.kind == Rewrite::Concat) {
      Edge ea = std::get<Edge>(p.factors[r.a].kind);
      Edge eb = std::get<Edge>(p.factors[r.b].kind);
      Word w = ea.word;
      w.insert(w.end(), eb.word.begin(), eb.word.end());
      q.add_edge(w, ea.upper, eb.lower);
    } else if (r.kind == Rewrite::Close) {
      q.add_loop(std::get<Edge>(p.factors[r.a].kind).word);
    } else {
      Word w = std::get<Loop>(p.factors[r.a].kind).word;
      std::rotate(w.begin(), w.begin() + 1 + rng.below(w.size() - 1), w.end());
      q.add_loop(w);
    }
    CHECK(TensorTerm::normalize(p) == TensorTerm::normalize(q));
    ++done;
  }
}

TEST_CASE("loop rotation is canonical") {
  Word w = {"a", "b", "c", "a"};
  TensorTerm base = TensorTerm::loop(w);
  for (size_t r = 1; r < w.size(); ++r) {
    std::rotate(w.begin(), w.begin() + 1, w.end());
    CHECK(TensorTerm::loop(w) == base);
  }
}

TEST_CASE("product: unit, commutativity, clash") {
  TensorTerm t = TensorTerm::edge({"a"}, ix("i"), ix("j"));
  CHECK(product(TensorTerm::unit(), t) == t);
  TensorTerm s = TensorTerm::edge({"b"}, ix("j"), ix("k"));
  CHECK(product(t, s) == product(s, t));
  CHECK(product(t, s) == TensorTerm::edge({"a", "b"}, ix("i"), ix("k")));
  TensorTerm clash = TensorTerm::edge({"b"}, ix("i"), ix("k"));
  CHECK_THROWS_AS(product(t, clash), Error);
}

TEST_CASE("product associativity when defined") {
  gen::Rng rng(23);
  int names = 0;
  for (int n = 0; n < 200; ++n) {
    TensorTerm a = TensorTerm::normalize(gen::random_pseudo_term(rng, names, 2, 0));
    TensorTerm b = TensorTerm::normalize(gen::random_pseudo_term(rng, names, 2, 0));
    TensorTerm c = TensorTerm::normalize(gen::random_pseudo_term(rng, names, 2, 0));
    try {
      TensorTerm lhs = product(product(a, b), c);
      TensorTerm rhs = product(a, product(b, c));
      CHECK(lhs == rhs);
    } catch (const Error&) {
      // undefined intermediate product; nothing to compare
    }
  }
}

TEST_CASE("boundary") {
  TensorTerm t = TensorTerm::edge({"a"}, ix("i"), ix("j"));
  Boundary b = t.boundary();
  CHECK(b.upper == std::set<Index>{ix("i")});
  CHECK(b.lower == std::set<Index>{ix("j")});
  CHECK(TensorTerm::loop({"a", "b", "c"}).boundary() == Boundary{});

  PseudoTerm p;
  p.add_edge({"a"}, ix("i"), ix("j"));
  p.add_edge({"b"}, ix("j"), ix("k"));
  Boundary pb = TensorTerm::normalize(p).boundary();
  CHECK(pb.upper == std::set<Index>{ix("i")});
  CHECK(pb.lower == std::set<Index>{ix("k")});
}

TEST_CASE("boundary of products is the disjoint union") {
  gen::Rng rng(37);
  int names = 0;
  for (int n = 0; n < 100; ++n) {
    TensorTerm a = TensorTerm::normalize(gen::random_pseudo_term(rng, names, 3, 1));
    TensorTerm b = TensorTerm::normalize(gen::random_pseudo_term(rng, names, 3, 1));
    try {
      Boundary got = product(a, b).boundary();
      Boundary expect;
      for (const auto& t : {a, b}) {
        Boundary tb = t.boundary();
        for (const auto& i : tb.upper)
          if (!expect.lower.erase(i)) expect.upper.insert(i);
        for (const auto& i : tb.lower)
          if (!expect.upper.erase(i)) expect.lower.insert(i);
      }
      CHECK(got == expect);
    } catch (const Error&) {
    }
  }
}

TEST_CASE("reparameterize") {
  TensorTerm t = TensorTerm::edge({"a", "b"}, ix("i"), ix("j"));
  CHECK(reparameterize(t, Polarity::Upper, ix("i"), ix("k")) ==
        TensorTerm::edge({"a", "b"}, ix("k"), ix("j")));
  CHECK_THROWS_AS(reparameterize(t, Polarity::Upper, ix("j"), ix("k")), Error);
  CHECK_THROWS_AS(reparameterize(t, Polarity::Upper, ix("i"), ix("j")), Error);
}

TEST_CASE("kronecker delta") {
  TensorTerm d = kronecker(ix("i"), ix("j"));  // δ^j_i
  CHECK(d == TensorTerm::edge({}, ix("j"), ix("i")));
  CHECK_THROWS_AS(kronecker(ix("i"), ix("i")), Error);
  // δ^i_j · δ^j_i closes into the empty loop
  CHECK(product(kronecker(ix("j"), ix("i")), kronecker(ix("i"), ix("j"))) == TensorTerm::loop({}));
}

TEST_CASE("delta absorption is reparameterization") {
  gen::Rng rng(41);
  int names = 0;
  for (int n = 0; n < 200; ++n) {
    TensorTerm t = TensorTerm::normalize(gen::random_pseudo_term(rng, names, 3, 1));
    Boundary b = t.boundary();
    if (!b.upper.empty()) {
      Index i = *b.upper.begin();
      Index fresh("f" + std::to_string(++names));
      // δ^{i'}_i · t = t^{[i'/i]}
      CHECK(product(kronecker(i, fresh), t) == reparameterize(t, Polarity::Upper, i, fresh));
    }
    if (!b.lower.empty()) {
      Index j = *b.lower.begin();
      Index fresh("g" + std::to_string(++names));
      // δ^j_{j'} · t = t_{[j'/j]}
      CHECK(product(kronecker(fresh, j), t) == reparameterize(t, Polarity::Lower, j, fresh));
    }
  }
}

TEST_CASE("classification zoology") {
  TensorTerm mary = TensorTerm::edge({"mary"}, ix("i"), ix("j"));
  CHECK(mary.classify().regular);
  CHECK(mary.classify().lexical);
  TensorTerm d = kronecker(ix("i"), ix("j"));
  CHECK(d.classify().regular);
  CHECK_FALSE(d.classify().lexical);
  TensorTerm l = TensorTerm::loop({});
  CHECK(l.classify().singular);
  CHECK_FALSE(l.classify().regular);
  CHECK_FALSE(l.classify().lexical);
  CHECK(TensorTerm::loop({"a"}).classify().lexical);
}

TEST_CASE("term parse and print round trip") {
  for (const char* text : {"[a]^i_j", "[]^i_j", "(a b)", "()", "[likes cats]^i_j . [b]^j_k",
                           "[mary]^u_t . (x y)", "1"}) {
    TensorTerm t = parse_term(text);
    CHECK(parse_term(t.print()) == t);
  }
  CHECK(parse_term("[a]^i_j . [b]^j_k") == parse_term("[a b]^i_k"));
  CHECK(parse_term("(b a)") == parse_term("(a b)"));
}
