#pragma once

#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mlw/derived.hpp"

namespace mlw {

inline constexpr std::size_t kMaxTautoAtoms = 16;

struct TautoResult {
  bool tautology = false;
  Proof proof;  // set when tautology
  // Atoms of the propositional skeleton with a falsifying assignment (when
  // not a tautology).
  std::vector<std::pair<Pattern, bool>> assignment;
};

namespace derive {

// Maximal subpatterns of the core form that are neither ⊥ nor an
// implication, in order of first occurrence.
inline std::vector<Pattern> prop_atoms(const Pattern& core) {
  std::vector<Pattern> out;
  std::unordered_map<Pattern, std::size_t, PatternHash> seen;
  std::vector<const Pattern*> stack{&core};
  while (!stack.empty()) {
    const Pattern* p = stack.back();
    stack.pop_back();
    if (p->is(Kind::Bot)) continue;
    if (p->is(Kind::Imp)) {
      stack.push_back(&p->right());
      stack.push_back(&p->left());
      continue;
    }
    if (seen.emplace(*p, out.size()).second) out.push_back(*p);
  }
  return out;
}

namespace detail {

class Kalmar {
 public:
  Kalmar(const Pattern& core, std::vector<Pattern> atoms) : core_(core), atoms_(std::move(atoms)) {
    for (std::size_t i = 0; i < atoms_.size(); ++i) index_.emplace(atoms_[i], i);
  }

  bool value(const Pattern& p, std::uint32_t v) const {
    if (p.is(Kind::Bot)) return false;
    if (p.is(Kind::Imp)) return !value(p.left(), v) || value(p.right(), v);
    return (v >> index_.at(p)) & 1U;
  }

  std::optional<std::uint32_t> falsifier() const {
    for (std::uint32_t v = 0; v < (1U << atoms_.size()); ++v) {
      if (!value(core_, v)) return v;
    }
    return std::nullopt;
  }

  // ⊢ core, assuming it is a tautology.
  Proof prove() { return eliminate(0, 0); }

 private:
  Pattern core_;
  std::vector<Pattern> atoms_;
  std::unordered_map<Pattern, std::size_t, PatternHash> index_;

  struct Entry {
    Proof proof;
    bool value;
  };

  // Closed lemmas recur across valuations; build each one once.
  std::unordered_map<Pattern, Proof, PatternHash> lemmas_;

  template <class Build>
  Proof lemma(const Pattern& key, Build build) {
    auto it = lemmas_.find(key);
    if (it != lemmas_.end()) return it->second;
    Proof p = build();
    lemmas_.emplace(key, p);
    return p;
  }

  Hyps literals(std::uint32_t v, std::size_t k) const {
    Hyps out;
    for (std::size_t i = 0; i < k; ++i) {
      out.push_back((v >> i) & 1U ? atoms_[i] : imp(atoms_[i], bot()));
    }
    return out;
  }

  // ⊢ lits(v) ⇒ p^v where p^v is p or ¬p according to its value under v.
  Entry literal_proof(const Pattern& p, std::uint32_t v, const Hyps& d,
                      std::unordered_map<Pattern, Entry, PatternHash>& memo) {
    if (auto it = memo.find(p); it != memo.end()) return it->second;
    Entry e;
    if (p.is(Kind::Bot)) {
      e = {lift_chain(d, lemma(imp(bot(), bot()), [] { return imp_refl(bot()); })), false};
    } else if (p.is(Kind::Imp)) {
      Entry a = literal_proof(p.left(), v, d, memo);
      Entry b = literal_proof(p.right(), v, d, memo);
      const Pattern& l = p.left();
      const Pattern& r = p.right();
      if (b.value) {
        Proof k = lemma(imp(r, p), [&] { return rules::prop1(r, l); });
        e = {apply_under(d, std::move(k), b.proof), true};
      } else if (!a.value) {
        Proof k = lemma(imp(imp(l, bot()), p), [&] { return ex_falso(l, r); });
        e = {apply_under(d, std::move(k), a.proof), true};
      } else {
        Proof k = lemma(imp(l, imp(imp(r, bot()), imp(p, bot()))), [&] { return neg_imp_intro(l, r); });
        Proof step = apply_under(d, std::move(k), a.proof);
        e = {mp_under(d, std::move(step), b.proof), false};
      }
    } else {
      std::size_t i = index_.at(p);
      e = {assume(d, i), static_cast<bool>((v >> i) & 1U)};
    }
    memo.emplace(p, e);
    return e;
  }

  // ⊢ lits(v restricted to the first k atoms) ⇒ core
  Proof eliminate(std::size_t k, std::uint32_t v) {
    if (k == atoms_.size()) {
      Hyps d = literals(v, k);
      std::unordered_map<Pattern, Entry, PatternHash> memo;
      return literal_proof(core_, v, d, memo).proof;
    }
    Proof pos = eliminate(k + 1, v | (1U << k));   // lits, a_k ⇒ φ
    Proof neg = eliminate(k + 1, v & ~(1U << k));  // lits, ¬a_k ⇒ φ
    Hyps d = literals(v, k);
    Proof split = lemma(atoms_[k], [&] { return case_split(atoms_[k], core_); });
    return mp_under(d, apply_under(d, std::move(split), std::move(pos)), std::move(neg));
  }
};

template <class Then>
TautoResult decide(const Pattern& p, Then&& then) {
  if (!well_formed(p)) throw Error(ErrorCode::PreconditionFailed, "tauto: pattern is not well-formed");
  Pattern core = expand(p);
  auto atoms = prop_atoms(core);
  if (atoms.size() > kMaxTautoAtoms) {
    throw Error(ErrorCode::AtomBudget, "tauto: " + std::to_string(atoms.size()) +
                                           " atoms exceed the limit of " +
                                           std::to_string(kMaxTautoAtoms));
  }
  Kalmar k(core, atoms);
  TautoResult r;
  if (auto v = k.falsifier()) {
    for (std::size_t i = 0; i < atoms.size(); ++i) r.assignment.emplace_back(atoms[i], (*v >> i) & 1U);
    return r;
  }
  r.tautology = true;
  then(k, r);
  return r;
}

}  // namespace detail

// Truth-table verdict only, no proof.
inline TautoResult tauto_decide(const Pattern& p) {
  return detail::decide(p, [](detail::Kalmar&, TautoResult&) {});
}

// Decides the propositional skeleton of p; proves p when it is a tautology.
inline TautoResult tauto(const Pattern& p) {
  return detail::decide(p, [](detail::Kalmar& k, TautoResult& r) { r.proof = k.prove(); });
}

inline Proof tauto_proof(const Pattern& p) {
  TautoResult r = tauto(p);
  if (!r.tautology) throw Error(ErrorCode::NotATautology, "not a propositional tautology");
  return r.proof;
}

}  // namespace derive
}  // namespace mlw
