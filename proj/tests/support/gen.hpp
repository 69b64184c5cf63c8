#pragma once

// Shared random generators for property tests.

#include <random>
#include <string>
#include <vector>

#include "ttl/formula.hpp"
#include "ttl/parse.hpp"
#include "ttl/sequent.hpp"
#include "ttl/term.hpp"

namespace gen {

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(uint64_t seed) : eng(seed) {}

  size_t below(size_t n) { return std::uniform_int_distribution<size_t>(0, n - 1)(eng); }
  bool chance(double p) { return std::uniform_real_distribution<double>(0, 1)(eng) < p; }
};

inline ttl::Word random_word(Rng& rng, size_t max_len = 2,
                             const std::vector<std::string>& alphabet = {"a", "b", "c"}) {
  ttl::Word w;
  size_t len = rng.below(max_len + 1);
  for (size_t i = 0; i < len; ++i) w.push_back(alphabet[rng.below(alphabet.size())]);
  return w;
}

// A random well-formed pseudo-term: distinct endpoints glued a few times into
// chains and cycles.
inline ttl::PseudoTerm random_pseudo_term(Rng& rng, int& name_counter, size_t max_edges = 4,
                                          size_t max_loops = 1) {
  struct E {
    ttl::Word w;
    std::string up, low;
  };
  std::vector<E> edges;
  size_t n = 1 + rng.below(max_edges);
  auto fresh = [&] { return "t" + std::to_string(++name_counter); };
  for (size_t i = 0; i < n; ++i) edges.push_back({random_word(rng), fresh(), fresh()});
  size_t glue = rng.below(n + 1);
  for (size_t g = 0; g < glue; ++g) {
    // Pick a lower endpoint and an upper endpoint that are still singletons.
    size_t a = rng.below(edges.size());
    size_t b = rng.below(edges.size());
    std::string shared = fresh();
    // Only glue fresh-looking endpoints to preserve well-formedness.
    bool low_taken = false, up_taken = false;
    for (const auto& e : edges) {
      if (e.up == edges[a].low) low_taken = true;
      if (e.low == edges[b].up) up_taken = true;
    }
    if (low_taken || up_taken) continue;
    edges[a].low = shared;
    edges[b].up = shared;
  }
  ttl::PseudoTerm p;
  for (const auto& e : edges) p.add_edge(e.w, ttl::Index(e.up), ttl::Index(e.low));
  size_t loops = rng.below(max_loops + 1);
  for (size_t i = 0; i < loops; ++i) p.add_loop(random_word(rng));
  return p;
}

// Random formula over valency-(1,1) literals with all indices fresh and
// distinct (free), suitable as a building block for sequents.
inline ttl::Formula random_flat_formula(Rng& rng, int& name_counter,
                                        const std::vector<std::string>& lits, size_t connectives) {
  auto fresh = [&] { return ttl::Index("x" + std::to_string(++name_counter)); };
  if (connectives == 0) {
    ttl::Atom a;
    a.lit = lits[rng.below(lits.size())];
    a.negated = rng.chance(0.4);
    a.upper = {fresh()};
    a.lower = {fresh()};
    return ttl::Formula::atom(a);
  }
  size_t left = rng.below(connectives);
  ttl::Formula l = random_flat_formula(rng, name_counter, lits, left);
  ttl::Formula r = random_flat_formula(rng, name_counter, lits, connectives - 1 - left);
  return rng.chance(0.5) ? ttl::Formula::tensor(l, r) : ttl::Formula::par(l, r);
}

}  // namespace gen
