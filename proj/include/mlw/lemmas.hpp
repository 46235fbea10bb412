#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "mlw/notation.hpp"
#include "mlw/tauto.hpp"

namespace mlw::derive {

// ---------------------------------------------------------------------------
// Schematic propositional lemmas
//
// A schema is a tautology over the set variables %0, %1, ... . It is proved
// once by tauto and instantiated through Substitution.

namespace detail {

inline std::string schema_var(std::size_t i) { return "%" + std::to_string(i); }

inline bool mentions_reserved(const Pattern& p) {
  for (const auto& v : free_svars(p)) {
    if (!v.empty() && v[0] == '%') return true;
  }
  return false;
}

struct Schema {
  std::size_t arity;
  std::function<Pattern(std::span<const Pattern>)> statement;
};

inline const std::map<std::string, Schema>& schemas() {
  using namespace notations;
  static const std::map<std::string, Schema> table = {
      {"and_elim_l", {2, [](auto a) { return imp(and_(a[0], a[1]), a[0]); }}},
      {"and_elim_r", {2, [](auto a) { return imp(and_(a[0], a[1]), a[1]); }}},
      {"and_intro", {2, [](auto a) { return imp(a[0], imp(a[1], and_(a[0], a[1]))); }}},
      {"or_intro_l", {2, [](auto a) { return imp(a[0], or_(a[0], a[1])); }}},
      {"or_intro_r", {2, [](auto a) { return imp(a[1], or_(a[0], a[1])); }}},
      {"or_elim",
       {3, [](auto a) { return imp(imp(a[0], a[2]), imp(imp(a[1], a[2]), imp(or_(a[0], a[1]), a[2]))); }}},
      {"iff_intro", {2, [](auto a) { return imp(imp(a[0], a[1]), imp(imp(a[1], a[0]), iff(a[0], a[1]))); }}},
      {"iff_trans",
       {3, [](auto a) { return imp(iff(a[0], a[1]), imp(iff(a[1], a[2]), iff(a[0], a[2]))); }}},
      // (C → A) → (B → D) → (A → B) → (C → D)
      {"imp_congr",
       {4, [](auto a) {
          return imp(imp(a[2], a[0]), imp(imp(a[1], a[3]), imp(imp(a[0], a[1]), imp(a[2], a[3]))));
        }}},
      {"not_and_iff", {2, [](auto a) { return iff(not_(and_(a[0], a[1])), or_(not_(a[0]), not_(a[1]))); }}},
      {"not_or_iff", {2, [](auto a) { return iff(not_(or_(a[0], a[1])), and_(not_(a[0]), not_(a[1]))); }}},
      {"nand_curry", {2, [](auto a) { return imp(not_(and_(a[0], a[1])), imp(a[0], imp(a[1], bot()))); }}},
  };
  return table;
}

inline Proof schema_proof(const std::string& name) {
  static std::mutex mu;
  static std::map<std::string, Proof> cache;
  std::lock_guard<std::mutex> lock(mu);
  if (auto it = cache.find(name); it != cache.end()) return it->second;
  const Schema& s = schemas().at(name);
  std::vector<Pattern> vars;
  for (std::size_t i = 0; i < s.arity; ++i) vars.push_back(svar(schema_var(i)));
  Proof p = tauto_proof(s.statement(vars));
  cache.emplace(name, p);
  return p;
}

}  // namespace detail

// Instance of a named schema.
inline Proof schematic(const std::string& name, std::vector<Pattern> args) {
  auto it = detail::schemas().find(name);
  if (it == detail::schemas().end()) throw Error(ErrorCode::UnresolvedName, "unknown schema '" + name + "'");
  if (args.size() != it->second.arity) {
    throw Error(ErrorCode::ArityMismatch, "schema '" + name + "' expects " +
                                              std::to_string(it->second.arity) + " argument(s)");
  }
  for (const auto& a : args) {
    if (detail::mentions_reserved(a)) return tauto_proof(it->second.statement(args));
  }
  Proof p = detail::schema_proof(name);
  for (std::size_t i = 0; i < args.size(); ++i) p = rules::svar_subst(expand(args[i]), detail::schema_var(i), p);
  return p;
}

// ---------------------------------------------------------------------------
// Conjunction and equivalence

// (x, y) when `core` is the expansion of x ∧ y.
inline std::optional<std::pair<Pattern, Pattern>> split_and(const Pattern& core) {
  // ¬(¬¬x → ¬y)
  if (!core.is(Kind::Imp) || !core.right().is(Kind::Bot)) return std::nullopt;
  const Pattern& o = core.left();
  if (!o.is(Kind::Imp)) return std::nullopt;
  const Pattern& nnx = o.left();
  const Pattern& ny = o.right();
  if (!nnx.is(Kind::Imp) || !nnx.right().is(Kind::Bot) || !nnx.left().is(Kind::Imp) ||
      !nnx.left().right().is(Kind::Bot) || !ny.is(Kind::Imp) || !ny.right().is(Kind::Bot)) {
    return std::nullopt;
  }
  return std::make_pair(nnx.left().left(), ny.left());
}

// (a, b) when `core` is the expansion of a ↔ b.
inline std::optional<std::pair<Pattern, Pattern>> split_iff(const Pattern& core) {
  auto c = split_and(core);
  if (!c || !c->first.is(Kind::Imp) || !c->second.is(Kind::Imp)) return std::nullopt;
  const Pattern& a = c->first.left();
  const Pattern& b = c->first.right();
  if (c->second.left() != b || c->second.right() != a) return std::nullopt;
  return std::make_pair(a, b);
}

inline std::pair<Pattern, Pattern> iff_sides(const Proof& p) {
  auto s = split_iff(p->conclusion);
  if (!s) throw Error(ErrorCode::ShapeMismatch, "expected a proof of an equivalence");
  return *s;
}

inline Proof and_intro(Proof pa, Proof pb) {
  Pattern a = pa->conclusion, b = pb->conclusion;
  return mp(std::move(pb), mp(std::move(pa), schematic("and_intro", {a, b})));
}

// From ⊢ A → B and ⊢ B → A infer ⊢ A ↔ B.
inline Proof iff_intro(Proof fw, Proof bw) {
  Pattern a = fw->conclusion.left(), b = fw->conclusion.right();
  return mp(std::move(bw), mp(std::move(fw), schematic("iff_intro", {a, b})));
}

inline Proof iff_fw(const Proof& p) {
  auto [a, b] = iff_sides(p);
  return mp(p, schematic("and_elim_l", {imp(a, b), imp(b, a)}));
}

inline Proof iff_bw(const Proof& p) {
  auto [a, b] = iff_sides(p);
  return mp(p, schematic("and_elim_r", {imp(a, b), imp(b, a)}));
}

inline Proof iff_trans(Proof ab, Proof bc) {
  auto [a, b] = iff_sides(ab);
  auto [b2, c] = iff_sides(bc);
  if (b != b2) throw Error(ErrorCode::ShapeMismatch, "iff_trans: middle patterns differ");
  return mp(std::move(bc), mp(std::move(ab), schematic("iff_trans", {a, b, c})));
}

inline Proof iff_refl(const Pattern& a) { return iff_intro(imp_refl(a), imp_refl(a)); }

// From ⊢ φ1 → χ and ⊢ φ2 → χ infer ⊢ (φ1 ∨ φ2) → χ.
inline Proof destruct_or(Proof left, Proof right) {
  const Pattern& l = left->conclusion;
  const Pattern& r = right->conclusion;
  if (!l.is(Kind::Imp) || !r.is(Kind::Imp) || l.right() != r.right()) {
    throw Error(ErrorCode::ShapeMismatch, "destruct_or: premises must share their conclusion");
  }
  return mp(std::move(right), mp(std::move(left), schematic("or_elim", {l.left(), r.left(), l.right()})));
}

// ---------------------------------------------------------------------------
// Congruence

struct Directions {
  Proof fw;  // T[p] → T[q]
  Proof bw;  // T[q] → T[p]
};

namespace detail {

class Congruence {
 public:
  Congruence(std::string hole, Pattern p, Pattern q, Directions base)
      : hole_(std::move(hole)), p_(std::move(p)), q_(std::move(q)), base_(std::move(base)) {}

  std::optional<Directions> run(const Pattern& t) {
    if (!svar_occurs(t, hole_)) return std::nullopt;
    switch (t.kind()) {
      case Kind::FreeSVar: return base_;
      case Kind::Imp: return imp_case(t);
      case Kind::App: return app_case(t);
      case Kind::Exists:
      case Kind::Mu:
        throw Error(ErrorCode::UnsupportedContext, "rewriting under a binder is not supported");
      default: throw Error(ErrorCode::Internal, "congruence: unexpected pattern kind");
    }
  }

 private:
  std::string hole_;
  Pattern p_, q_;
  Directions base_;

  Pattern with_p(const Pattern& t) const { return fsvar_subst(t, p_, hole_); }
  Pattern with_q(const Pattern& t) const { return fsvar_subst(t, q_, hole_); }

  Directions same(const Pattern& t) const {
    Pattern c = with_p(t);
    Proof r = imp_refl(c);
    return {r, r};
  }

  Directions imp_case(const Pattern& t) {
    auto da = run(t.left());
    auto db = run(t.right());
    Directions a = da ? *da : same(t.left());
    Directions b = db ? *db : same(t.right());
    Pattern ap = with_p(t.left()), aq = with_q(t.left());
    Pattern bp = with_p(t.right()), bq = with_q(t.right());
    Proof fw = mp(b.fw, mp(a.bw, schematic("imp_congr", {ap, bp, aq, bq})));
    Proof bw = mp(b.bw, mp(a.fw, schematic("imp_congr", {aq, bq, ap, bp})));
    return {fw, bw};
  }

  Directions app_case(const Pattern& t) {
    auto da = run(t.left());
    auto db = run(t.right());
    Pattern ap = with_p(t.left()), aq = with_q(t.left());
    Pattern bp = with_p(t.right()), bq = with_q(t.right());
    Proof fw, bw;
    if (da) {
      fw = rules::framing_left(bp, da->fw);  // ap bp → aq bp
      bw = rules::framing_left(bq, da->bw);  // aq bq → ap bq
    }
    if (db) {
      Proof f2 = rules::framing_right(aq, db->fw);  // aq bp → aq bq
      Proof b2 = rules::framing_right(ap, db->bw);  // ap bq → ap bp
      fw = fw ? syllogism(fw, f2) : f2;
      bw = bw ? syllogism(bw, b2) : b2;
    }
    return {fw, bw};
  }
};

}  // namespace detail

// Both directions of T[p] ↔ T[q] for a core template T in which the set
// variable `hole` marks the rewritten positions. T may not bind the hole.
inline Directions congruence_directions(const Pattern& tmpl, const std::string& hole, const Proof& iff_pq) {
  auto [p, q] = iff_sides(iff_pq);
  Directions base{iff_fw(iff_pq), iff_bw(iff_pq)};
  detail::Congruence c(hole, p, q, base);
  Pattern t = expand(tmpl);
  auto d = c.run(t);
  if (d) return *d;
  Proof r = imp_refl(fsvar_subst(t, p, hole));
  return {r, r};
}

// ⊢ C[p] ↔ C[q] from ⊢ p ↔ q.
inline Proof congruence(const Pattern& tmpl, const std::string& hole, const Proof& iff_pq) {
  Pattern t = expand(tmpl);
  if (t.is(Kind::FreeSVar) && t.name() == hole) return iff_pq;
  auto d = congruence_directions(t, hole, iff_pq);
  return iff_intro(d.fw, d.bw);
}

// ---------------------------------------------------------------------------
// Propagation through a whole application context, from the one-step forms

// ⊢ C[⊥] → ⊥
inline Proof prop_bot_ctx(const AppContext& c) {
  Proof acc;  // C_inner[⊥] → ⊥
  for (auto it = c.path.rbegin(); it != c.path.rend(); ++it) {
    bool left = it->dir == ContextStep::Left;
    Proof step = left ? rules::prop_bot_left(it->side) : rules::prop_bot_right(it->side);
    if (acc) {
      Proof framed = left ? rules::framing_left(it->side, acc) : rules::framing_right(it->side, acc);
      acc = syllogism(framed, step);
    } else {
      acc = step;
    }
  }
  return acc ? acc : imp_refl(bot());
}

// ⊢ C[a ∨ b] → C[a] ∨ C[b]
inline Proof prop_or_ctx(const AppContext& c, const Pattern& a, const Pattern& b) {
  using notations::or_;
  Proof acc;
  AppContext inner;
  for (auto it = c.path.rbegin(); it != c.path.rend(); ++it) {
    bool left = it->dir == ContextStep::Left;
    Pattern ca = inner.plug(a), cb = inner.plug(b);
    Proof step = left ? rules::prop_or_left(ca, cb, it->side) : rules::prop_or_right(it->side, ca, cb);
    if (acc) {
      Proof framed = left ? rules::framing_left(it->side, acc) : rules::framing_right(it->side, acc);
      acc = syllogism(framed, step);
    } else {
      acc = step;
    }
    inner.path.insert(inner.path.begin(), *it);
  }
  return acc ? acc : imp_refl(or_(a, b));
}

// ⊢ C[∃.φ] → ∃.C[φ]   (sides of C are closed)
inline Proof prop_ex_ctx(const AppContext& c, const Pattern& body) {
  Proof acc;
  AppContext inner;
  for (auto it = c.path.rbegin(); it != c.path.rend(); ++it) {
    bool left = it->dir == ContextStep::Left;
    Pattern cb = inner.plug(body);
    Proof step = left ? rules::prop_ex_left(cb, it->side) : rules::prop_ex_right(it->side, cb);
    if (acc) {
      Proof framed = left ? rules::framing_left(it->side, acc) : rules::framing_right(it->side, acc);
      acc = syllogism(framed, step);
    } else {
      acc = step;
    }
    inner.path.insert(inner.path.begin(), *it);
  }
  return acc ? acc : imp_refl(exists(body));
}

// ---------------------------------------------------------------------------
// Definedness lemmas

// The symbol c of a definedness notation whose expansion is c $ □.
inline Pattern definedness_symbol(const NotationEnv& env) {
  auto ceil = env.find("ceil");
  if (!ceil) throw Error(ErrorCode::PreconditionFailed, "theory has no 'ceil' notation");
  const std::string hole = "%ceil";
  Pattern t = expand(notation(ceil, {svar(hole)}));
  if (!t.is(Kind::App) || t.right() != svar(hole) || svar_occurs(t.left(), hole) || !well_formed(t.left())) {
    throw Error(ErrorCode::PreconditionFailed, "'ceil' must unfold to an application of a closed pattern");
  }
  return t.left();
}

// ⊢ ⌈a ∨ b⌉ ↔ ⌈a⌉ ∨ ⌈b⌉
inline Proof ceil_or(const NotationEnv& env, const Pattern& a, const Pattern& b) {
  using notations::or_;
  Pattern c = definedness_symbol(env);
  Proof fw = rules::prop_or_right(c, a, b);
  Proof ia = rules::framing_right(c, schematic("or_intro_l", {a, b}));
  Proof ib = rules::framing_right(c, schematic("or_intro_r", {a, b}));
  return iff_intro(fw, destruct_or(ia, ib));
}

// ⊢ ⌊φ ∧ ψ⌋ ↔ ⌊φ⌋ ∧ ⌊ψ⌋
inline Proof total_and(const NotationEnv& env, const Pattern& phi, const Pattern& psi) {
  using namespace notations;
  if (!well_formed(phi) || !well_formed(psi)) {
    throw Error(ErrorCode::PreconditionFailed, "patt_total_and: arguments must be well-formed");
  }
  Pattern c = definedness_symbol(env);
  const std::string hole = "%hole";
  Pattern a = not_(phi), b = not_(psi);
  Proof s1 = schematic("not_and_iff", {phi, psi});
  Proof s2 = congruence(app(c, svar(hole)), hole, s1);
  Proof s4 = iff_trans(s2, ceil_or(env, a, b));
  Proof s5 = congruence(not_(svar(hole)), hole, s4);
  Proof s6 = schematic("not_or_iff", {app(c, a), app(c, b)});
  return iff_trans(s5, s6);
}

// ⊢ ⌈x ∧ φ⌉ → ⌈x ∧ ¬φ⌉ → ⊥
inline Proof singleton_ceil(const NotationEnv& env, const std::string& x, const Pattern& phi) {
  using namespace notations;
  Pattern c = definedness_symbol(env);
  AppContext ctx = AppContext::hole().right(c);
  Proof s = rules::singleton(ctx, ctx, x, phi);
  Pattern xv = evar(x);
  return mp(s, schematic("nand_curry", {app(c, and_(xv, phi)), app(c, and_(xv, not_(phi)))}));
}

}  // namespace mlw::derive
