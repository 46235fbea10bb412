#pragma once

#include <string>

#include "mlw/model_file.hpp"
#include "mlw/semantics.hpp"
#include "mlw/theory.hpp"

namespace mlw::theories {

// Both sides of a semantic equivalence, evaluated separately.
struct IffCheck {
  bool lhs = false;
  bool rhs = false;
  bool holds() const { return lhs == rhs; }
};

inline Pattern definedness_axiom(const Theory& def) {
  auto ax = def.axioms.find("Definedness");
  if (!ax) throw Error(ErrorCode::PreconditionFailed, "theory '" + def.name + "' has no Definedness axiom");
  return *ax;
}

// Raises PreconditionFailed unless M ⊨ ⌈x⌉.
inline void require_definedness(const Model& m, const Theory& def) {
  if (!holds(m, definedness_axiom(def))) {
    throw Error(ErrorCode::PreconditionFailed, "model '" + m.name() + "' does not satisfy Definedness");
  }
}

namespace detail {

inline Pattern use(const Theory& th, const std::string& name, std::vector<Pattern> args) {
  return notation(th.notations.get(name), std::move(args));
}

}  // namespace detail

// ⟦φ⟧ ≠ ∅  iff  ⟦⌈φ⌉⟧ = M. With check_model = false the model is not
// required to satisfy Definedness (the "only if" direction still holds).
inline IffCheck definedness_not_empty_iff(const Model& m, const Theory& def, const Valuation& rho,
                                          const Pattern& phi, bool check_model = true) {
  if (check_model) require_definedness(m, def);
  return {!eval(m, rho, phi).empty(), eval(m, rho, detail::use(def, "ceil", {phi})).is_full()};
}

// ⟦φ⟧ ≠ M  iff  ⟦⌊φ⌋⟧ = ∅
inline IffCheck totality_not_full_iff(const Model& m, const Theory& def, const Valuation& rho, const Pattern& phi,
                                      bool check_model = true) {
  if (check_model) require_definedness(m, def);
  return {!eval(m, rho, phi).is_full(), eval(m, rho, detail::use(def, "floor", {phi})).empty()};
}

// ⟦φ = ψ⟧ = M  iff  ⟦φ⟧ = ⟦ψ⟧
inline IffCheck equal_iff_interpr_same(const Model& m, const Theory& def, const Valuation& rho, const Pattern& phi,
                                       const Pattern& psi, bool check_model = true) {
  if (check_model) require_definedness(m, def);
  return {eval(m, rho, detail::use(def, "eq", {phi, psi})).is_full(), eval(m, rho, phi) == eval(m, rho, psi)};
}

// The model in which f is interpreted as a relation rather than a function.
struct CounterexampleReport {
  Model model;
  Pattern claim;          // ∃ . (f $ x <---> b0)
  bool claim_holds = false;
  Subset f_one, f_two;    // ⟦f $ one⟧, ⟦f $ two⟧
  bool functional = false;
};

inline CounterexampleReport counterexample_suite(const TheoryLibrary& lib = TheoryLibrary()) {
  auto path = lib.locate("fone.mlmodel");
  if (!path) throw Error(ErrorCode::UnresolvedName, "fone.mlmodel not found on the theory path");
  Model m = load_model(*path);
  Signature sig;
  for (const auto& [s, v] : m.symbols()) sig.add(s);
  auto parse = [&](std::string_view t) { return parse_pattern(t, sig, builtin_notations()); };
  CounterexampleReport r{m, parse("exists . (f $ x <---> b0)"), false, {}, {}, false};
  r.claim_holds = holds(m, r.claim);
  r.f_one = eval(m, {}, parse("f $ one"));
  r.f_two = eval(m, {}, parse("f $ two"));
  r.functional = r.f_one.count() == 1;
  return r;
}

// μ. R ∨ ∃.∃.∃. ⟨b2,b0⟩ ∧ ⟨b2,b1⟩ ∈ S0 ∧ ⟨b1,b0⟩ ∈ S0, where `th` provides
// the `pair` and `in` notations.
inline Pattern transitive_closure(const Theory& th, const Pattern& r) {
  if (!well_formed(r)) throw Error(ErrorCode::PreconditionFailed, "relation pattern is not well-formed");
  using notations::and_;
  using notations::or_;
  auto pair = [&](Index a, Index b) { return detail::use(th, "pair", {bevar(a), bevar(b)}); };
  auto in = [&](Pattern x) { return detail::use(th, "in", {std::move(x), bsvar(0)}); };
  Pattern step = and_(and_(pair(2, 0), in(pair(2, 1))), in(pair(1, 0)));
  return mu(or_(r, exists(exists(exists(step)))));
}

}  // namespace mlw::theories
