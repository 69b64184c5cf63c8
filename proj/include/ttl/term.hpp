#pragma once

// Tensor terms: commutative products of string-labeled edges [w]^i_j and
// cyclic-word loops [w], modulo gluing along matching indices.  A TensorTerm
// is the canonical representative of its congruence class: bound-index
// chains are concatenated, cycles are closed into loops, and loop words are
// stored in their lexicographically minimal rotation.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "ttl/core.hpp"

namespace ttl {

using Token = std::string;
using Word = std::vector<Token>;  // empty = epsilon

inline std::string word_text(const Word& w) {
  std::string out;
  for (size_t i = 0; i < w.size(); ++i) {
    if (i) out += ' ';
    out += w[i];
  }
  return out;
}

struct Edge {
  Word word;
  Index upper;
  Index lower;

  bool operator==(const Edge& o) const {
    return word == o.word && upper == o.upper && lower == o.lower;
  }
};

struct Loop {
  Word word;  // canonical rotation

  bool operator==(const Loop& o) const { return word == o.word; }
  bool operator<(const Loop& o) const { return word < o.word; }
};

// Lexicographically minimal rotation under the token order.
inline Word canonical_rotation(Word w) {
  if (w.size() < 2) return w;
  Word best = w;
  for (size_t r = 1; r < w.size(); ++r) {
    std::rotate(w.begin(), w.begin() + 1, w.end());
    if (w < best) best = w;
  }
  return best;
}

struct ElementaryTerm {
  std::variant<Edge, Loop> kind;
};

// A pseudo-term is a finite multiset of elementary factors; it need not be
// well formed.
struct PseudoTerm {
  std::vector<ElementaryTerm> factors;

  PseudoTerm() = default;
  void add_edge(Word w, Index upper, Index lower) {
    factors.push_back({Edge{std::move(w), upper, lower}});
  }
  void add_loop(Word w) { factors.push_back({Loop{std::move(w)}}); }
};

struct Boundary {
  std::set<Index> upper;
  std::set<Index> lower;

  bool operator==(const Boundary& o) const { return upper == o.upper && lower == o.lower; }
};

struct TermClass {
  bool regular = false;   // no loops
  bool singular = false;  // at least one loop
  bool lexical = false;   // every word (edge and loop) nonempty
};

class TensorTerm {
 public:
  TensorTerm() = default;  // the unit 1

  static TensorTerm normalize(const PseudoTerm& p);
  static TensorTerm edge(Word w, Index upper, Index lower) {
    PseudoTerm p;
    p.add_edge(std::move(w), upper, lower);
    return normalize(p);
  }
  static TensorTerm loop(Word w) {
    PseudoTerm p;
    p.add_loop(std::move(w));
    return normalize(p);
  }
  static TensorTerm unit() { return TensorTerm(); }

  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Loop>& loops() const { return loops_; }
  bool is_unit() const { return edges_.empty() && loops_.empty(); }

  Boundary boundary() const {
    Boundary b;
    for (const auto& e : edges_) {
      b.upper.insert(e.upper);
      b.lower.insert(e.lower);
    }
    return b;
  }

  bool uses_index(const Index& i) const {
    for (const auto& e : edges_)
      if (e.upper == i || e.lower == i) return true;
    return false;
  }

  TermClass classify() const {
    TermClass c;
    c.regular = loops_.empty();
    c.singular = !loops_.empty();
    c.lexical = true;
    for (const auto& e : edges_)
      if (e.word.empty()) c.lexical = false;
    for (const auto& l : loops_)
      if (l.word.empty()) c.lexical = false;
    return c;
  }

  bool operator==(const TensorTerm& o) const {
    return edges_ == o.edges_ && loops_ == o.loops_;
  }
  bool operator!=(const TensorTerm& o) const { return !(*this == o); }

  std::string print() const;

 private:
  // Edges sorted by upper-index name (each index occurs once, so this is a
  // strict key), loops sorted by word.
  std::vector<Edge> edges_;
  std::vector<Loop> loops_;
};

// δ^j_i: the empty-word edge with upper j and lower i.
inline TensorTerm kronecker(Index i, Index j) {
  if (i == j)
    throw Error(Error::Kind::EqualIndices, "kronecker delta needs two distinct indices");
  return TensorTerm::edge({}, j, i);
}

inline TensorTerm TensorTerm::normalize(const PseudoTerm& p) {
  std::vector<Edge> work;
  std::vector<Loop> loops;
  std::map<Index, int> upper_count, lower_count;
  for (const auto& f : p.factors) {
    if (const Edge* e = std::get_if<Edge>(&f.kind)) {
      upper_count[e->upper]++;
      lower_count[e->lower]++;
      work.push_back(*e);
    } else {
      loops.push_back(std::get<Loop>(f.kind));
    }
  }
  for (const auto& [i, n] : upper_count)
    if (n > 1)
      throw Error(Error::Kind::IllFormed, "index " + i.name() + " has two upper occurrences");
  for (const auto& [i, n] : lower_count)
    if (n > 1)
      throw Error(Error::Kind::IllFormed, "index " + i.name() + " has two lower occurrences");

  // Glue chains: from each edge whose upper endpoint is free, walk along
  // bound lower endpoints.  Components with no free endpoint are cycles.
  std::map<Index, size_t> by_upper;
  for (size_t k = 0; k < work.size(); ++k) by_upper.emplace(work[k].upper, k);

  std::vector<bool> used(work.size(), false);
  std::vector<Edge> edges;
  for (size_t k = 0; k < work.size(); ++k) {
    if (used[k]) continue;
    const bool head = lower_count.find(work[k].upper) == lower_count.end();
    if (!head) continue;
    Edge acc = work[k];
    used[k] = true;
    for (auto it = by_upper.find(acc.lower); it != by_upper.end(); it = by_upper.find(acc.lower)) {
      const Edge& next = work[it->second];
      used[it->second] = true;
      acc.word.insert(acc.word.end(), next.word.begin(), next.word.end());
      acc.lower = next.lower;
    }
    edges.push_back(std::move(acc));
  }
  for (size_t k = 0; k < work.size(); ++k) {
    if (used[k]) continue;
    // Cycle: concatenate around it and close into a loop.
    Word w = work[k].word;
    used[k] = true;
    Index at = work[k].lower;
    while (at != work[k].upper) {
      size_t n = by_upper.at(at);
      used[n] = true;
      w.insert(w.end(), work[n].word.begin(), work[n].word.end());
      at = work[n].lower;
    }
    loops.push_back(Loop{std::move(w)});
  }

  TensorTerm t;
  t.edges_ = std::move(edges);
  std::sort(t.edges_.begin(), t.edges_.end(),
            [](const Edge& a, const Edge& b) { return a.upper < b.upper; });
  for (auto& l : loops) l.word = canonical_rotation(std::move(l.word));
  std::sort(loops.begin(), loops.end());
  t.loops_ = std::move(loops);
  return t;
}

// Partial multiplication: defined when the free upper (resp. lower) index
// sets are disjoint; matching upper/lower pairs glue.
inline TensorTerm product(const TensorTerm& t, const TensorTerm& s) {
  Boundary bt = t.boundary(), bs = s.boundary();
  for (const auto& i : bt.upper)
    if (bs.upper.count(i))
      throw Error(Error::Kind::Clash, "product undefined: index " + i.name() + " upper in both factors");
  for (const auto& i : bt.lower)
    if (bs.lower.count(i))
      throw Error(Error::Kind::Clash, "product undefined: index " + i.name() + " lower in both factors");
  PseudoTerm p;
  for (const auto& e : t.edges()) p.factors.push_back({e});
  for (const auto& l : t.loops()) p.factors.push_back({l});
  for (const auto& e : s.edges()) p.factors.push_back({e});
  for (const auto& l : s.loops()) p.factors.push_back({l});
  return TensorTerm::normalize(p);
}

inline TensorTerm reparameterize(const TensorTerm& t, Polarity pol, Index old_index,
                                 Index new_index) {
  Boundary b = t.boundary();
  const std::set<Index>& side = pol == Polarity::Upper ? b.upper : b.lower;
  if (!side.count(old_index))
    throw Error(Error::Kind::NotFree,
                "index " + old_index.name() + " is not free " + to_string(pol) + " in the term");
  if (t.uses_index(new_index))
    throw Error(Error::Kind::AlreadyOccurs, "index " + new_index.name() + " already occurs");
  PseudoTerm p;
  for (Edge e : t.edges()) {
    if (pol == Polarity::Upper && e.upper == old_index) e.upper = new_index;
    if (pol == Polarity::Lower && e.lower == old_index) e.lower = new_index;
    p.factors.push_back({std::move(e)});
  }
  for (const auto& l : t.loops()) p.factors.push_back({l});
  return TensorTerm::normalize(p);
}

inline std::string print_index_ref(const Index& i) {
  return i.name()[0] == '_' ? "{" + i.name() + "}" : i.name();
}

inline std::string TensorTerm::print() const {
  if (is_unit()) return "1";
  std::ostringstream os;
  bool first = true;
  for (const auto& e : edges_) {
    if (!first) os << " . ";
    first = false;
    os << '[' << word_text(e.word) << "]^" << print_index_ref(e.upper) << '_'
       << print_index_ref(e.lower);
  }
  for (const auto& l : loops_) {
    if (!first) os << " . ";
    first = false;
    os << '(' << word_text(l.word) << ')';
  }
  return os.str();
}

}  // namespace ttl
