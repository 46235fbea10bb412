#pragma once

#include <span>
#include <vector>

#include "mlw/proof.hpp"

namespace mlw::derive {

using Hyps = std::vector<Pattern>;

// l1 → l2 → ... → lk → goal
inline Pattern chain(std::span<const Pattern> hyps, Pattern goal) {
  for (auto it = hyps.rbegin(); it != hyps.rend(); ++it) goal = imp(*it, std::move(goal));
  return goal;
}

inline Hyps expand_all(std::span<const Pattern> hyps) {
  Hyps out;
  out.reserve(hyps.size());
  for (const auto& h : hyps) out.push_back(expand(h));
  return out;
}

// Strips k antecedents from a core chain.
inline Pattern peel(Pattern p, std::size_t k) {
  for (std::size_t i = 0; i < k; ++i) {
    if (!p.is(Kind::Imp)) throw Error(ErrorCode::Internal, "chain is shorter than its context");
    p = p.right();
  }
  return p;
}

inline Proof mp(Proof minor, Proof major) {
  return rules::modus_ponens(std::move(minor), std::move(major));
}

// ⊢ A → A
inline Proof imp_refl(const Pattern& a) {
  Pattern aa = imp(a, a);
  Proof s = rules::prop2(a, aa, a);       // (A→((A→A)→A)) → ((A→(A→A)) → (A→A))
  Proof k1 = rules::prop1(a, aa);         // A → ((A→A) → A)
  Proof k2 = rules::prop1(a, a);          // A → (A → A)
  return mp(k2, mp(k1, s));
}

// From ⊢ P infer ⊢ l → P.
inline Proof lift(Proof p, const Pattern& l) {
  Pattern c = p->conclusion;
  return mp(std::move(p), rules::prop1(c, l));
}

// From ⊢ A → B and ⊢ B → C infer ⊢ A → C.
inline Proof syllogism(Proof ab, Proof bc) {
  Pattern a = ab->conclusion.left();
  Pattern b = ab->conclusion.right();
  Pattern c = bc->conclusion.right();
  Proof abc = lift(std::move(bc), a);                  // A → (B → C)
  return mp(std::move(ab), mp(std::move(abc), rules::prop2(a, b, c)));
}

// From ⊢ X → (Y → Z) infer ⊢ (l → X) → ((l → Y) → (l → Z)).
inline Proof imp_distrib(const Pattern& l, Proof t) {
  const Pattern& c = t->conclusion;
  Pattern x = c.left(), y = c.right().left(), z = c.right().right();
  Proof lt = lift(std::move(t), l);                                     // l→(X→(Y→Z))
  Proof step1 = mp(std::move(lt), rules::prop2(l, x, imp(y, z)));       // (l→X)→(l→(Y→Z))
  Proof step2 = rules::prop2(l, y, z);                                  // (l→(Y→Z))→((l→Y)→(l→Z))
  return syllogism(std::move(step1), std::move(step2));
}

// ⊢ (Δ ⇒ (A → B)) → ((Δ ⇒ A) → (Δ ⇒ B)), Δ given in core form.
inline Proof chain_mp_lemma(std::span<const Pattern> core_hyps, const Pattern& a, const Pattern& b) {
  if (core_hyps.empty()) return imp_refl(imp(a, b));
  Proof t = rules::prop2(core_hyps.back(), a, b);
  for (auto it = core_hyps.rbegin() + 1; it != core_hyps.rend(); ++it) t = imp_distrib(*it, std::move(t));
  return t;
}

// From ⊢ P infer ⊢ Δ ⇒ P.
inline Proof lift_chain(std::span<const Pattern> hyps, Proof p) {
  for (auto it = hyps.rbegin(); it != hyps.rend(); ++it) p = lift(std::move(p), *it);
  return p;
}

// From ⊢ Δ ⇒ (A → B) and ⊢ Δ ⇒ A infer ⊢ Δ ⇒ B.
inline Proof mp_under(std::span<const Pattern> hyps, Proof pab, Proof pa) {
  if (hyps.empty()) return mp(std::move(pa), std::move(pab));
  Hyps core = expand_all(hyps);
  Pattern ab = peel(pab->conclusion, core.size());
  if (!ab.is(Kind::Imp)) throw Error(ErrorCode::Internal, "mp_under: not an implication under Δ");
  Proof lemma = chain_mp_lemma(core, ab.left(), ab.right());
  return mp(std::move(pa), mp(std::move(pab), std::move(lemma)));
}

// From ⊢ A → B infer ⊢ (Δ ⇒ A) → (Δ ⇒ B).
inline Proof mono_under(std::span<const Pattern> hyps, Proof t) {
  for (auto it = hyps.rbegin(); it != hyps.rend(); ++it) {
    Pattern x = t->conclusion.left(), y = t->conclusion.right();
    Pattern l = expand(*it);
    t = mp(lift(std::move(t), l), rules::prop2(l, x, y));
  }
  return t;
}

// From ⊢ A → B and ⊢ Δ ⇒ A infer ⊢ Δ ⇒ B.
inline Proof apply_under(std::span<const Pattern> hyps, Proof lemma, Proof pa) {
  return mp(std::move(pa), mono_under(hyps, std::move(lemma)));
}

// ⊢ Δ ⇒ l_i
inline Proof assume(std::span<const Pattern> hyps, std::size_t i) {
  // l_i → (l_{i+1} → ... → l_i), built from the inside out
  Proof k = imp_refl(hyps[i]);
  for (std::size_t j = hyps.size(); j-- > i + 1;) {
    Proof weaken = rules::prop1(chain(hyps.subspan(j + 1), hyps[i]), hyps[j]);
    k = syllogism(std::move(k), std::move(weaken));
  }
  return lift_chain(hyps.first(i), std::move(k));
}

// ---------------------------------------------------------------------------
// Propositional lemmas used by the tautology prover

// ⊢ ⊥ → B
inline Proof bot_elim(const Pattern& b) {
  Proof k = rules::prop1(bot(), imp(b, bot()));  // ⊥ → ((B→⊥) → ⊥)
  return syllogism(std::move(k), rules::prop3(b));
}

// ⊢ ¬A → (A → B)
inline Proof ex_falso(const Pattern& a, const Pattern& b) {
  Hyps d{imp(a, bot()), a};
  Proof falsum = mp_under(d, assume(d, 0), assume(d, 1));
  return apply_under(d, bot_elim(b), std::move(falsum));
}

// ⊢ A → (¬B → ¬(A → B))
inline Proof neg_imp_intro(const Pattern& a, const Pattern& b) {
  Hyps d{a, imp(b, bot()), imp(a, b)};
  Proof pb = mp_under(d, assume(d, 2), assume(d, 0));
  return mp_under(d, assume(d, 1), std::move(pb));
}

// ⊢ (p → φ) → ((¬p → φ) → φ)
inline Proof case_split(const Pattern& p, const Pattern& phi) {
  Pattern np = imp(p, bot());
  Pattern nphi = imp(phi, bot());
  Hyps outer{imp(p, phi), imp(np, phi)};
  Hyps d{imp(p, phi), imp(np, phi), nphi};
  Hyps dp{imp(p, phi), imp(np, phi), nphi, p};
  // Δ, p ⇒ ⊥   i.e.  Δ ⇒ ¬p
  Proof phi_from_p = mp_under(dp, assume(dp, 0), assume(dp, 3));
  Proof not_p = mp_under(dp, assume(dp, 2), std::move(phi_from_p));
  Proof phi2 = mp_under(d, assume(d, 1), std::move(not_p));
  Proof nnphi = mp_under(d, assume(d, 2), std::move(phi2));  // outer ⇒ ¬¬φ
  return apply_under(outer, rules::prop3(phi), std::move(nnphi));
}

}  // namespace mlw::derive
