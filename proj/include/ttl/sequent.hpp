#pragma once

// One-sided classical sequents, the rule set as checkable inference steps,
// derivation trees, and the canonical form quotienting similarity and alpha
// equivalence.
//
// Well-formedness of |- Gamma asks only that distinct member formulas have
// disjoint free upper and free lower index sets, and that the free upper and
// free lower sets of the whole context coincide.  An index bound inside one
// formula may also appear free elsewhere in the context (counits exploiting
// this are the whole point of the reduction rules), so bound occurrences are
// deliberately invisible to these conditions.

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ttl/formula.hpp"

namespace ttl {

struct Sequent {
  std::vector<Formula> formulas;  // order is presentation-only

  bool operator==(const Sequent& o) const { return formulas == o.formulas; }
};

inline std::string print_sequent(const Sequent& s) {
  std::string out = "|-";
  for (size_t i = 0; i < s.formulas.size(); ++i) {
    out += i ? "," : "";
    out += ' ';
    out += print_formula(s.formulas[i]);
  }
  return out;
}

struct SequentBoundary {
  std::set<Index> upper_free;
  std::set<Index> lower_free;
  std::set<Index> bound;  // bound inside some member formula
};

inline SequentBoundary sequent_boundary(const Sequent& s) {
  SequentBoundary b;
  for (const auto& f : s.formulas) {
    FormulaBoundary fb = free_boundary(f);
    b.upper_free.insert(fb.upper_free.begin(), fb.upper_free.end());
    b.lower_free.insert(fb.lower_free.begin(), fb.lower_free.end());
    b.bound.insert(fb.bound.begin(), fb.bound.end());
  }
  return b;
}

inline std::optional<Error> sequent_ill_formed(const Sequent& s) {
  std::vector<FormulaBoundary> fbs;
  for (const auto& f : s.formulas) {
    if (auto bad = formula_ill_formed(f))
      return Error(Error::Kind::IllFormed, *bad + " in " + print_formula(f));
    fbs.push_back(free_boundary(f));
  }
  for (size_t a = 0; a < fbs.size(); ++a)
    for (size_t b = a + 1; b < fbs.size(); ++b) {
      for (const auto& i : fbs[a].upper_free)
        if (fbs[b].upper_free.count(i))
          return Error(Error::Kind::DuplicateIndex,
                       "index " + i.name() + " free upper in two formulas");
      for (const auto& i : fbs[a].lower_free)
        if (fbs[b].lower_free.count(i))
          return Error(Error::Kind::DuplicateIndex,
                       "index " + i.name() + " free lower in two formulas");
    }
  std::set<Index> up, low;
  for (const auto& fb : fbs) {
    up.insert(fb.upper_free.begin(), fb.upper_free.end());
    low.insert(fb.lower_free.begin(), fb.lower_free.end());
  }
  for (const auto& i : up)
    if (!low.count(i))
      return Error(Error::Kind::DanglingIndex, "index " + i.name() + " has no lower occurrence");
  for (const auto& i : low)
    if (!up.count(i))
      return Error(Error::Kind::DanglingIndex, "index " + i.name() + " has no upper occurrence");
  return std::nullopt;
}

inline bool sequent_well_formed(const Sequent& s) { return !sequent_ill_formed(s); }

inline void require_well_formed(const Sequent& s) {
  if (auto err = sequent_ill_formed(s)) throw *err;
}

// Renames the free occurrences of old_i (one upper, one lower, wherever they
// sit) to new_i.  Bound occurrences of the same name are untouched.
inline Sequent rename_sequent_free(const Sequent& s, Index old_i, Index new_i) {
  Sequent out;
  out.formulas.reserve(s.formulas.size());
  for (const auto& f : s.formulas) {
    FormulaBoundary fb = free_boundary(f);
    Formula g = f;
    if (fb.upper_free.count(old_i)) g = substitute_polar(g, Polarity::Upper, old_i, new_i);
    if (fb.lower_free.count(old_i)) g = substitute_polar(g, Polarity::Lower, old_i, new_i);
    out.formulas.push_back(g);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Canonical form for the similarity + alpha class.

namespace detail {

inline std::string formula_skeleton(const Formula& f) {
  if (f.is_atom()) {
    const Atom& a = f.as_atom();
    return (a.negated ? "~" : "") + a.lit + "/" + std::to_string(a.upper.size()) + "." +
           std::to_string(a.lower.size());
  }
  return (f.conn() == Formula::Conn::Tensor ? "T(" : "P(") + formula_skeleton(f.left()) + "," +
         formula_skeleton(f.right()) + ")";
}

inline void number_indices(const Formula& f, std::map<Index, Index>& m, int& next) {
  for_each_atom(f, [&](const Atom& a) {
    for (const auto& i : a.upper)
      if (!m.count(i)) m.emplace(i, Index("i" + std::to_string(++next)));
    for (const auto& i : a.lower)
      if (!m.count(i)) m.emplace(i, Index("i" + std::to_string(++next)));
  });
}

}  // namespace detail

struct CanonicalSequent {
  Sequent sequent;
  std::map<Index, Index> renaming;  // original name -> canonical name
};

// Formulas ordered by structural skeleton (ties resolved by minimizing the
// renamed print), then every index renamed i1, i2, ... in traversal order.
inline CanonicalSequent similar_canonical(const Sequent& s) {
  const size_t n = s.formulas.size();
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  std::vector<std::string> skel(n);
  for (size_t i = 0; i < n; ++i) skel[i] = detail::formula_skeleton(s.formulas[i]);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return skel[a] < skel[b]; });

  // Tie groups of equal skeletons.
  std::vector<std::pair<size_t, size_t>> groups;
  for (size_t i = 0; i < n;) {
    size_t j = i + 1;
    while (j < n && skel[order[j]] == skel[order[i]]) ++j;
    if (j - i > 1) groups.emplace_back(i, j);
    i = j;
  }

  auto realize = [&](const std::vector<size_t>& ord) {
    std::map<Index, Index> m;
    int next = 0;
    Sequent out;
    out.formulas.reserve(n);
    for (size_t pos : ord) detail::number_indices(s.formulas[pos], m, next);
    for (size_t pos : ord) out.formulas.push_back(rename_indices(s.formulas[pos], m));
    return std::make_pair(std::move(out), std::move(m));
  };

  size_t combos = 1;
  for (auto& [a, b] : groups) {
    size_t f = 1;
    for (size_t k = 2; k <= b - a; ++k) f *= k;
    combos *= f;
    if (combos > 40320) break;
  }
  if (groups.empty() || combos > 40320) {
    // Too many duplicate-shaped formulas to minimize exactly; fall back to a
    // deterministic order by raw print.
    if (!groups.empty()) {
      std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return std::tie(skel[a], a) < std::tie(skel[b], b);
      });
      for (auto& [a, b] : groups)
        std::sort(order.begin() + a, order.begin() + b, [&](size_t x, size_t y) {
          return print_formula(s.formulas[x]) < print_formula(s.formulas[y]);
        });
    }
    auto [seq, m] = realize(order);
    return {std::move(seq), std::move(m)};
  }

  // Minimize the canonical print over all permutations within tie groups.
  std::optional<std::string> best;
  CanonicalSequent best_result;
  std::vector<size_t> work = order;
  std::vector<std::vector<size_t>> group_perms;
  for (auto& [a, b] : groups) {
    std::vector<size_t> g(work.begin() + a, work.begin() + b);
    std::sort(g.begin(), g.end());
    group_perms.push_back(std::move(g));
  }
  // Iterate the cartesian product of group permutations.
  std::vector<std::vector<size_t>> perms;
  for (auto& g : group_perms) perms.push_back(g);
  auto step = [&](auto&& self, size_t gi) -> void {
    if (gi == groups.size()) {
      auto [seq, m] = realize(work);
      std::string p = print_sequent(seq);
      if (!best || p < *best) {
        best = p;
        best_result = {std::move(seq), std::move(m)};
      }
      return;
    }
    auto [a, b] = groups[gi];
    std::vector<size_t>& g = perms[gi];
    do {
      std::copy(g.begin(), g.end(), work.begin() + a);
      self(self, gi + 1);
    } while (std::next_permutation(g.begin(), g.end()));
  };
  step(step, 0);
  return best_result;
}

inline std::string canonical_print(const Sequent& s) {
  return print_sequent(similar_canonical(s).sequent);
}

inline bool similar(const Sequent& a, const Sequent& b) {
  return canonical_print(a) == canonical_print(b);
}

// ---------------------------------------------------------------------------
// Rules and derivations.

enum class RuleTag {
  Id,
  Cut,
  Tensor,
  Par,
  CounitExpand,  // (⊥→)
  CounitReduce,  // (⊥←)
  TensorAlpha,   // TTL' (⊗≡α)
  ParAlpha,      // TTL' (⅋≡α)
  Lex,
};

inline const char* rule_name(RuleTag t) {
  switch (t) {
    case RuleTag::Id: return "Id";
    case RuleTag::Cut: return "Cut";
    case RuleTag::Tensor: return "⊗";
    case RuleTag::Par: return "⅋";
    case RuleTag::CounitExpand: return "⊥→";
    case RuleTag::CounitReduce: return "⊥←";
    case RuleTag::TensorAlpha: return "⊗≡α";
    case RuleTag::ParAlpha: return "⅋≡α";
    case RuleTag::Lex: return "Lex";
  }
  return "?";
}

inline const char* rule_id(RuleTag t) {
  switch (t) {
    case RuleTag::Id: return "id";
    case RuleTag::Cut: return "cut";
    case RuleTag::Tensor: return "tensor";
    case RuleTag::Par: return "par";
    case RuleTag::CounitExpand: return "counit_expand";
    case RuleTag::CounitReduce: return "counit_reduce";
    case RuleTag::TensorAlpha: return "tensor_alpha";
    case RuleTag::ParAlpha: return "par_alpha";
    case RuleTag::Lex: return "lex";
  }
  return "?";
}

inline std::optional<RuleTag> rule_from_id(const std::string& s) {
  for (RuleTag t : {RuleTag::Id, RuleTag::Cut, RuleTag::Tensor, RuleTag::Par,
                    RuleTag::CounitExpand, RuleTag::CounitReduce, RuleTag::TensorAlpha,
                    RuleTag::ParAlpha, RuleTag::Lex})
    if (s == rule_id(t)) return t;
  return std::nullopt;
}

// Parameters that make a rule instance replayable.  Position fields refer to
// the formula vectors of the sequents involved.
struct RuleData {
  std::optional<size_t> principal;    // conclusion position of the result formula
  std::optional<size_t> cut0, cut1;   // Cut/Lex: cut-formula positions in the premises
  std::optional<size_t> child0, child1;  // Tensor: A in premise0 / B in premise1; Par: both in premise
  std::optional<Index> idx_old, idx_new;  // ⊥ rules: j renamed to i
  std::optional<size_t> formula_pos;      // ⊥ rules: modified formula in the premise
  std::optional<size_t> counit_pos;   // ⊥ rules: counit position (premise for ⊥←, conclusion for ⊥→)
  std::vector<std::pair<Index, Index>> ren_upper;  // TTL': I -> K (upper in A / lower in B)
  std::vector<std::pair<Index, Index>> ren_lower;  // TTL': J -> L (lower in A / upper in B)
  std::optional<Sequent> axiom;       // Lex: instantiated axiom sequent form
  std::optional<size_t> axiom_main;   // Lex: distinguished formula position in axiom
};

class Derivation {
 public:
  Derivation() = default;
  Derivation(Sequent conclusion, RuleTag rule, RuleData data, std::vector<Derivation> premises) {
    n_ = std::make_shared<Node>(
        Node{std::move(conclusion), rule, std::move(data), std::move(premises)});
  }

  const Sequent& conclusion() const { return n_->conclusion; }
  RuleTag rule() const { return n_->rule; }
  const RuleData& data() const { return n_->data; }
  const std::vector<Derivation>& premises() const { return n_->premises; }
  explicit operator bool() const { return n_ != nullptr; }

  size_t size() const {
    size_t s = 1;
    for (const auto& p : n_->premises) s += p.size();
    return s;
  }

 private:
  struct Node {
    Sequent conclusion;
    RuleTag rule;
    RuleData data;
    std::vector<Derivation> premises;
  };
  std::shared_ptr<const Node> n_;
};

// ---------------------------------------------------------------------------
// Step checking.

namespace detail {

inline std::vector<std::string> context_keys(const Sequent& s, const std::set<size_t>& skip) {
  std::vector<std::string> keys;
  for (size_t i = 0; i < s.formulas.size(); ++i)
    if (!skip.count(i)) keys.push_back(print_formula(s.formulas[i]));
  std::sort(keys.begin(), keys.end());
  return keys;
}

inline std::vector<std::string> merge_keys(std::vector<std::string> a,
                                           const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  return a;
}

}  // namespace detail

struct ValidationMode {
  enum class System { TTL, TTLPrime, WithAxioms } system = System::TTL;
  bool allow_cut = false;
  std::vector<Sequent> axioms;  // WithAxioms: closed under similarity implicitly

  static ValidationMode ttl(bool cuts = false) { return {System::TTL, cuts, {}}; }
  static ValidationMode ttl_prime(bool cuts = true) { return {System::TTLPrime, cuts, {}}; }
  static ValidationMode with_axioms(std::vector<Sequent> ax, bool cuts = false) {
    return {System::WithAxioms, cuts, std::move(ax)};
  }
};

// Confirms that `conclusion` follows from `premises` by exactly the named
// rule with the given parameters.  Throws Error(RuleMismatch) otherwise.
inline void check_step(RuleTag rule, const RuleData& data, const std::vector<Sequent>& premises,
                       const Sequent& conclusion, const ValidationMode& mode = ValidationMode::ttl(true)) {
  auto fail = [&](const std::string& why) {
    throw Error(Error::Kind::RuleMismatch,
                std::string(rule_name(rule)) + ": " + why + " at " + print_sequent(conclusion));
  };
  auto need = [&](bool ok, const char* why) {
    if (!ok) fail(why);
  };
  auto get = [&](const std::optional<size_t>& v, const char* what) -> size_t {
    if (!v) fail(std::string("missing ") + what);
    return *v;
  };
  require_well_formed(conclusion);
  for (const auto& p : premises) require_well_formed(p);

  switch (rule) {
    case RuleTag::Id: {
      need(premises.empty(), "axiom has no premises");
      need(conclusion.formulas.size() == 2, "axiom has exactly two formulas");
      const Formula& x = conclusion.formulas[0];
      const Formula& y = conclusion.formulas[1];
      need(x.is_atom() || y.is_atom(), "axiom formulas are atomic");
      need(dual(x) == y || dual(y) == x, "formulas are not dual");
      need(x.is_atom() && y.is_atom(), "axiom formulas are atomic");
      return;
    }
    case RuleTag::Cut: {
      need(premises.size() == 2, "cut has two premises");
      size_t c0 = get(data.cut0, "cut0"), c1 = get(data.cut1, "cut1");
      need(c0 < premises[0].formulas.size() && c1 < premises[1].formulas.size(),
           "cut positions in range");
      const Formula& a = premises[0].formulas[c0];
      need(premises[1].formulas[c1] == dual(a), "cut formulas are not dual");
      auto lhs = detail::merge_keys(detail::context_keys(premises[0], {c0}),
                                    detail::context_keys(premises[1], {c1}));
      need(lhs == detail::context_keys(conclusion, {}), "contexts do not match");
      return;
    }
    case RuleTag::Tensor:
    case RuleTag::TensorAlpha: {
      need(premises.size() == 2, "tensor has two premises");
      size_t pp = get(data.principal, "principal");
      size_t a0 = get(data.child0, "child0"), b1 = get(data.child1, "child1");
      need(pp < conclusion.formulas.size(), "principal in range");
      need(a0 < premises[0].formulas.size() && b1 < premises[1].formulas.size(),
           "child positions in range");
      const Formula& f = conclusion.formulas[pp];
      need(!f.is_atom() && f.conn() == Formula::Conn::Tensor, "principal is a tensor");
      Formula a = premises[0].formulas[a0];
      Formula b = premises[1].formulas[b1];
      if (rule == RuleTag::TensorAlpha) {
        if (mode.system != ValidationMode::System::TTLPrime)
          fail("alpha-closed rule outside TTL'");
        FormulaBoundary ba = free_boundary(a), bb = free_boundary(b);
        std::set<Index> fresh_names;
        auto fresh_ok = [&](const Index& k) {
          return !ba.upper_free.count(k) && !ba.lower_free.count(k) && !bb.upper_free.count(k) &&
                 !bb.lower_free.count(k) && fresh_names.insert(k).second;
        };
        for (const auto& [i, k] : data.ren_upper) {
          need(ba.upper_free.count(i) && bb.lower_free.count(i),
               "renamed index not shared upper(A)/lower(B)");
          need(fresh_ok(k), "replacement index not fresh");
          a = reparam_formula(a, Polarity::Upper, i, k);
          b = reparam_formula(b, Polarity::Lower, i, k);
        }
        for (const auto& [j, l] : data.ren_lower) {
          need(free_boundary(a).lower_free.count(j) && free_boundary(b).upper_free.count(j),
               "renamed index not shared lower(A)/upper(B)");
          need(fresh_ok(l), "replacement index not fresh");
          a = reparam_formula(a, Polarity::Lower, j, l);
          b = reparam_formula(b, Polarity::Upper, j, l);
        }
      } else {
        need(data.ren_upper.empty() && data.ren_lower.empty(), "plain tensor carries no renaming");
      }
      need(f.left() == a && f.right() == b, "principal does not match premises");
      auto lhs = detail::merge_keys(detail::context_keys(premises[0], {a0}),
                                    detail::context_keys(premises[1], {b1}));
      need(lhs == detail::context_keys(conclusion, {pp}), "contexts do not match");
      return;
    }
    case RuleTag::Par:
    case RuleTag::ParAlpha: {
      need(premises.size() == 1, "par has one premise");
      size_t pp = get(data.principal, "principal");
      size_t a0 = get(data.child0, "child0"), b0 = get(data.child1, "child1");
      need(pp < conclusion.formulas.size(), "principal in range");
      need(a0 < premises[0].formulas.size() && b0 < premises[0].formulas.size() && a0 != b0,
           "child positions in range");
      const Formula& f = conclusion.formulas[pp];
      need(!f.is_atom() && f.conn() == Formula::Conn::Par, "principal is a par");
      Formula a = premises[0].formulas[a0];
      Formula b = premises[0].formulas[b0];
      if (rule == RuleTag::ParAlpha) {
        if (mode.system != ValidationMode::System::TTLPrime)
          fail("alpha-closed rule outside TTL'");
        FormulaBoundary ba = free_boundary(a), bb = free_boundary(b);
        std::set<Index> fresh_names;
        auto fresh_ok = [&](const Index& k) {
          return !ba.upper_free.count(k) && !ba.lower_free.count(k) && !bb.upper_free.count(k) &&
                 !bb.lower_free.count(k) && fresh_names.insert(k).second;
        };
        for (const auto& [i, k] : data.ren_upper) {
          need(ba.upper_free.count(i) && bb.lower_free.count(i),
               "renamed index not shared upper(A)/lower(B)");
          need(fresh_ok(k), "replacement index not fresh");
          a = reparam_formula(a, Polarity::Upper, i, k);
          b = reparam_formula(b, Polarity::Lower, i, k);
        }
        for (const auto& [j, l] : data.ren_lower) {
          need(free_boundary(a).lower_free.count(j) && free_boundary(b).upper_free.count(j),
               "renamed index not shared lower(A)/upper(B)");
          need(fresh_ok(l), "replacement index not fresh");
          a = reparam_formula(a, Polarity::Lower, j, l);
          b = reparam_formula(b, Polarity::Upper, j, l);
        }
      } else {
        need(data.ren_upper.empty() && data.ren_lower.empty(), "plain par carries no renaming");
      }
      need(f.left() == a && f.right() == b, "principal does not match premise formulas");
      need(detail::context_keys(premises[0], {a0, b0}) == detail::context_keys(conclusion, {pp}),
           "contexts do not match");
      return;
    }
    case RuleTag::CounitExpand: {
      // premise |- Γ, A with j ∈ FI•(A)  =>  conclusion |- Γ, ⊥^j_i, A^{[i/j]}
      need(premises.size() == 1, "one premise");
      size_t fp = get(data.formula_pos, "formula_pos");
      size_t pp = get(data.principal, "principal");
      size_t cp = get(data.counit_pos, "counit_pos");
      Index j = data.idx_old ? *data.idx_old : Index("?");
      Index i = data.idx_new ? *data.idx_new : Index("?");
      need(data.idx_old && data.idx_new, "missing indices");
      need(fp < premises[0].formulas.size(), "formula_pos in range");
      need(pp < conclusion.formulas.size() && cp < conclusion.formulas.size() && pp != cp,
           "conclusion positions in range");
      const Formula& a = premises[0].formulas[fp];
      Formula renamed;
      try {
        renamed = reparam_formula(a, Polarity::Upper, j, i);
      } catch (const Error& e) {
        fail(e.what());
      }
      need(conclusion.formulas[cp] == Formula::counit(j, i), "introduced counit mismatch");
      need(conclusion.formulas[pp] == renamed, "renamed formula mismatch");
      need(detail::context_keys(premises[0], {fp}) == detail::context_keys(conclusion, {pp, cp}),
           "contexts do not match");
      return;
    }
    case RuleTag::CounitReduce: {
      // premise |- Γ, A, ⊥^j_i with j ∈ FI_•(A)  =>  conclusion |- Γ, A_{[i/j]}
      need(premises.size() == 1, "one premise");
      size_t fp = get(data.formula_pos, "formula_pos");
      size_t cp = get(data.counit_pos, "counit_pos");
      size_t pp = get(data.principal, "principal");
      need(data.idx_old && data.idx_new, "missing indices");
      Index j = *data.idx_old, i = *data.idx_new;
      need(fp < premises[0].formulas.size() && cp < premises[0].formulas.size() && fp != cp,
           "premise positions in range");
      need(pp < conclusion.formulas.size(), "principal in range");
      need(premises[0].formulas[cp] == Formula::counit(j, i), "consumed counit mismatch");
      const Formula& a = premises[0].formulas[fp];
      Formula renamed;
      try {
        renamed = reparam_formula(a, Polarity::Lower, j, i);
      } catch (const Error& e) {
        fail(e.what());
      }
      need(conclusion.formulas[pp] == renamed, "renamed formula mismatch");
      need(detail::context_keys(premises[0], {fp, cp}) == detail::context_keys(conclusion, {pp}),
           "contexts do not match");
      return;
    }
    case RuleTag::Lex: {
      if (mode.system != ValidationMode::System::WithAxioms) fail("Lex outside axiom mode");
      need(data.axiom.has_value(), "missing axiom instance");
      const Sequent& ax = *data.axiom;
      require_well_formed(ax);
      bool found = false;
      std::string key = canonical_print(ax);
      for (const auto& cand : mode.axioms)
        if (canonical_print(cand) == key) found = true;
      need(found, "axiom instance does not match any supplied axiom");
      if (premises.empty()) {
        need(print_sequent(conclusion) == print_sequent(ax) || similar(conclusion, ax),
             "leaf does not match axiom");
        return;
      }
      need(premises.size() == 1, "Lex cut has one premise");
      size_t am = get(data.axiom_main, "axiom_main");
      size_t c0 = get(data.cut0, "cut0");
      need(am < ax.formulas.size(), "axiom_main in range");
      need(c0 < premises[0].formulas.size(), "cut0 in range");
      const Formula& a = ax.formulas[am];
      need(premises[0].formulas[c0] == dual(a), "premise does not hold the dual of the axiom formula");
      auto lhs = detail::merge_keys(detail::context_keys(ax, {am}),
                                    detail::context_keys(premises[0], {c0}));
      need(lhs == detail::context_keys(conclusion, {}), "contexts do not match");
      return;
    }
  }
  fail("unknown rule");
}

struct ValidationError {
  std::vector<size_t> path;  // premise indices from the root
  std::string reason;
};

inline std::optional<ValidationError> validate_derivation(const Derivation& d,
                                                          const ValidationMode& mode) {
  struct Walker {
    const ValidationMode& mode;
    std::vector<size_t> path;
    std::optional<ValidationError> err;

    void walk(const Derivation& d) {
      if (err) return;
      RuleTag r = d.rule();
      bool allowed = true;
      switch (r) {
        case RuleTag::Cut:
          allowed = mode.allow_cut;
          break;
        case RuleTag::TensorAlpha:
        case RuleTag::ParAlpha:
          allowed = mode.system == ValidationMode::System::TTLPrime;
          break;
        case RuleTag::Lex:
          allowed = mode.system == ValidationMode::System::WithAxioms;
          break;
        default:
          break;
      }
      if (!allowed) {
        err = ValidationError{path, std::string("rule ") + rule_name(r) + " not allowed here"};
        return;
      }
      std::vector<Sequent> prem;
      for (const auto& p : d.premises()) prem.push_back(p.conclusion());
      try {
        check_step(r, d.data(), prem, d.conclusion(), mode);
      } catch (const Error& e) {
        err = ValidationError{path, e.what()};
        return;
      }
      for (size_t i = 0; i < d.premises().size(); ++i) {
        path.push_back(i);
        walk(d.premises()[i]);
        path.pop_back();
      }
    }
  } w{mode, {}, {}};
  w.walk(d);
  return w.err;
}

// ---------------------------------------------------------------------------
// Step builders.  Each computes the conclusion, records replayable data and
// re-checks itself, so every Derivation in the library validates by
// construction.

inline Derivation make_id(const Formula& atom_formula) {
  Sequent s{{dual(atom_formula), atom_formula}};
  Derivation d(s, RuleTag::Id, {}, {});
  check_step(RuleTag::Id, d.data(), {}, s);
  return d;
}

inline Derivation make_cut(const Derivation& left, const Derivation& right, size_t cut0,
                           size_t cut1) {
  Sequent conc;
  for (size_t i = 0; i < left.conclusion().formulas.size(); ++i)
    if (i != cut0) conc.formulas.push_back(left.conclusion().formulas[i]);
  for (size_t i = 0; i < right.conclusion().formulas.size(); ++i)
    if (i != cut1) conc.formulas.push_back(right.conclusion().formulas[i]);
  RuleData data;
  data.cut0 = cut0;
  data.cut1 = cut1;
  check_step(RuleTag::Cut, data, {left.conclusion(), right.conclusion()}, conc);
  return Derivation(conc, RuleTag::Cut, data, {left, right});
}

// Conclusion layout: left context, principal, right context.
inline Derivation make_tensor(const Derivation& left, const Derivation& right, size_t child0,
                              size_t child1,
                              std::vector<std::pair<Index, Index>> ren_upper = {},
                              std::vector<std::pair<Index, Index>> ren_lower = {}) {
  Formula a = left.conclusion().formulas[child0];
  Formula b = right.conclusion().formulas[child1];
  for (const auto& [i, k] : ren_upper) {
    a = reparam_formula(a, Polarity::Upper, i, k);
    b = reparam_formula(b, Polarity::Lower, i, k);
  }
  for (const auto& [j, l] : ren_lower) {
    a = reparam_formula(a, Polarity::Lower, j, l);
    b = reparam_formula(b, Polarity::Upper, j, l);
  }
  Sequent conc;
  for (size_t i = 0; i < left.conclusion().formulas.size(); ++i)
    if (i != child0) conc.formulas.push_back(left.conclusion().formulas[i]);
  RuleData data;
  data.principal = conc.formulas.size();
  conc.formulas.push_back(Formula::tensor(a, b));
  for (size_t i = 0; i < right.conclusion().formulas.size(); ++i)
    if (i != child1) conc.formulas.push_back(right.conclusion().formulas[i]);
  data.child0 = child0;
  data.child1 = child1;
  data.ren_upper = ren_upper;
  data.ren_lower = ren_lower;
  bool alpha = !ren_upper.empty() || !ren_lower.empty();
  RuleTag tag = alpha ? RuleTag::TensorAlpha : RuleTag::Tensor;
  check_step(tag, data, {left.conclusion(), right.conclusion()}, conc,
             alpha ? ValidationMode::ttl_prime() : ValidationMode::ttl(true));
  return Derivation(conc, tag, data, {left, right});
}

inline Derivation make_par(const Derivation& prem, size_t child0, size_t child1,
                           std::vector<std::pair<Index, Index>> ren_upper = {},
                           std::vector<std::pair<Index, Index>> ren_lower = {}) {
  Formula a = prem.conclusion().formulas[child0];
  Formula b = prem.conclusion().formulas[child1];
  for (const auto& [i, k] : ren_upper) {
    a = reparam_formula(a, Polarity::Upper, i, k);
    b = reparam_formula(b, Polarity::Lower, i, k);
  }
  for (const auto& [j, l] : ren_lower) {
    a = reparam_formula(a, Polarity::Lower, j, l);
    b = reparam_formula(b, Polarity::Upper, j, l);
  }
  Sequent conc;
  RuleData data;
  for (size_t i = 0; i < prem.conclusion().formulas.size(); ++i)
    if (i != child0 && i != child1) conc.formulas.push_back(prem.conclusion().formulas[i]);
  data.principal = conc.formulas.size();
  conc.formulas.push_back(Formula::par(a, b));
  data.child0 = child0;
  data.child1 = child1;
  data.ren_upper = ren_upper;
  data.ren_lower = ren_lower;
  bool alpha = !ren_upper.empty() || !ren_lower.empty();
  RuleTag tag = alpha ? RuleTag::ParAlpha : RuleTag::Par;
  check_step(tag, data, {prem.conclusion()}, conc,
             alpha ? ValidationMode::ttl_prime() : ValidationMode::ttl(true));
  return Derivation(conc, tag, data, {prem});
}

// (⊥→): renames the upper-free j of the formula at `pos` to i and appends
// the counit ⊥^j_i at the end of the context.
inline Derivation make_counit_expand(const Derivation& prem, size_t pos, Index j, Index i) {
  const Sequent& p = prem.conclusion();
  Formula renamed = reparam_formula(p.formulas[pos], Polarity::Upper, j, i);
  Sequent conc = p;
  conc.formulas[pos] = renamed;
  RuleData data;
  data.formula_pos = pos;
  data.principal = pos;
  data.idx_old = j;
  data.idx_new = i;
  data.counit_pos = conc.formulas.size();
  conc.formulas.push_back(Formula::counit(j, i));
  check_step(RuleTag::CounitExpand, data, {p}, conc);
  return Derivation(conc, RuleTag::CounitExpand, data, {prem});
}

// (⊥←): consumes the counit ⊥^j_i at `counit_pos`, renaming the lower-free j
// of the formula at `pos` to i.
inline Derivation make_counit_reduce(const Derivation& prem, size_t pos, size_t counit_pos) {
  const Sequent& p = prem.conclusion();
  const Formula& c = p.formulas[counit_pos];
  if (!c.is_counit() || c.as_atom().upper.size() != 1 || c.as_atom().lower.size() != 1)
    throw Error(Error::Kind::RuleMismatch, "not a counit at the given position");
  Index j = c.as_atom().upper[0];
  Index i = c.as_atom().lower[0];
  Formula renamed = reparam_formula(p.formulas[pos], Polarity::Lower, j, i);
  Sequent conc;
  RuleData data;
  for (size_t k = 0; k < p.formulas.size(); ++k) {
    if (k == counit_pos) continue;
    if (k == pos) {
      data.principal = conc.formulas.size();
      conc.formulas.push_back(renamed);
    } else {
      conc.formulas.push_back(p.formulas[k]);
    }
  }
  data.formula_pos = pos;
  data.counit_pos = counit_pos;
  data.idx_old = j;
  data.idx_new = i;
  check_step(RuleTag::CounitReduce, data, {p}, conc);
  return Derivation(conc, RuleTag::CounitReduce, data, {prem});
}

inline Derivation make_lex_leaf(const Sequent& axiom_instance, const std::vector<Sequent>& axioms) {
  RuleData data;
  data.axiom = axiom_instance;
  Derivation d(axiom_instance, RuleTag::Lex, data, {});
  check_step(RuleTag::Lex, d.data(), {}, axiom_instance, ValidationMode::with_axioms(axioms, true));
  return d;
}

inline Derivation make_lex_cut(const Sequent& axiom_instance, size_t axiom_main,
                               const Derivation& prem, size_t cut0,
                               const std::vector<Sequent>& axioms) {
  Sequent conc;
  for (size_t i = 0; i < axiom_instance.formulas.size(); ++i)
    if (i != axiom_main) conc.formulas.push_back(axiom_instance.formulas[i]);
  for (size_t i = 0; i < prem.conclusion().formulas.size(); ++i)
    if (i != cut0) conc.formulas.push_back(prem.conclusion().formulas[i]);
  RuleData data;
  data.axiom = axiom_instance;
  data.axiom_main = axiom_main;
  data.cut0 = cut0;
  check_step(RuleTag::Lex, data, {prem.conclusion()}, conc,
             ValidationMode::with_axioms(axioms, true));
  return Derivation(conc, RuleTag::Lex, data, {prem});
}

// ---------------------------------------------------------------------------
// Similarity as a two-step derivation (expansion then reduction): witnesses
// that similar sequents are cut-free derivable from each other.

inline Derivation derive_similarity(const Derivation& d, Index old_i, Index new_i) {
  const Sequent& s = d.conclusion();
  std::optional<size_t> up_pos, low_pos;
  for (size_t k = 0; k < s.formulas.size(); ++k) {
    FormulaBoundary b = free_boundary(s.formulas[k]);
    if (b.upper_free.count(old_i)) up_pos = k;
    if (b.lower_free.count(old_i)) low_pos = k;
  }
  if (!up_pos || !low_pos)
    throw Error(Error::Kind::NotFree, "index " + old_i.name() + " is not free in the sequent");
  Derivation mid = make_counit_expand(d, *up_pos, old_i, new_i);
  // The counit sits at the end; the lower occurrence kept its position.
  return make_counit_reduce(mid, *low_pos, mid.conclusion().formulas.size() - 1);
}

// Renames a chain of free indices via derive_similarity steps.
inline Derivation derive_similarity_chain(Derivation d,
                                          const std::vector<std::pair<Index, Index>>& renames) {
  for (const auto& [o, n] : renames) d = derive_similarity(d, o, n);
  return d;
}

}  // namespace ttl
