#pragma once

#include <memory>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "mlw/error.hpp"
#include "mlw/notation.hpp"
#include "mlw/pattern.hpp"
#include "mlw/syntax.hpp"

namespace mlw {

// The Hilbert system. Tags used in proof files are given by rule_tag().
enum class Rule {
  Hypothesis,
  Prop1,
  Prop2,
  Prop3,
  ModusPonens,
  ExQuantifier,
  ExGen,
  PropBotL,
  PropBotR,
  PropOrL,
  PropOrR,
  PropExL,
  PropExR,
  FramingL,
  FramingR,
  SvarSubst,
  PreFixpoint,
  KnasterTarski,
  Existence,
  Singleton,
};

inline constexpr Rule kAllRules[] = {
    Rule::Hypothesis, Rule::Prop1,    Rule::Prop2,        Rule::Prop3,       Rule::ModusPonens,
    Rule::ExQuantifier, Rule::ExGen,  Rule::PropBotL,     Rule::PropBotR,    Rule::PropOrL,
    Rule::PropOrR,    Rule::PropExL,  Rule::PropExR,      Rule::FramingL,    Rule::FramingR,
    Rule::SvarSubst,  Rule::PreFixpoint, Rule::KnasterTarski, Rule::Existence, Rule::Singleton,
};

inline const char* rule_tag(Rule r) {
  switch (r) {
    case Rule::Hypothesis: return "Hypothesis";
    case Rule::Prop1: return "Proposition 1";
    case Rule::Prop2: return "Proposition 2";
    case Rule::Prop3: return "Proposition 3";
    case Rule::ModusPonens: return "Modus Ponens";
    case Rule::ExQuantifier: return "∃-Quantifier";
    case Rule::ExGen: return "∃-Generalization";
    case Rule::PropBotL: return "Propagation Left ⊥";
    case Rule::PropBotR: return "Propagation Right ⊥";
    case Rule::PropOrL: return "Propagation Left ∨";
    case Rule::PropOrR: return "Propagation Right ∨";
    case Rule::PropExL: return "Propagation Left ∃";
    case Rule::PropExR: return "Propagation Right ∃";
    case Rule::FramingL: return "Framing Left";
    case Rule::FramingR: return "Framing Right";
    case Rule::SvarSubst: return "Substitution";
    case Rule::PreFixpoint: return "Pre-Fixpoint";
    case Rule::KnasterTarski: return "Knaster-Tarski";
    case Rule::Existence: return "Existence";
    case Rule::Singleton: return "Singleton";
  }
  return "?";
}

inline std::optional<Rule> rule_from_tag(std::string_view tag) {
  for (Rule r : kAllRules) {
    if (tag == rule_tag(r)) return r;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Application contexts

struct ContextStep {
  // Left: the hole continues in the left operand, `side` is the right one.
  enum Dir { Left, Right } dir;
  Pattern side;

  bool operator==(const ContextStep&) const = default;
};

// Path of application steps from the root to the hole; empty is □.
struct AppContext {
  std::vector<ContextStep> path;

  static AppContext hole() { return {}; }

  AppContext left(Pattern side) const {
    AppContext c = *this;
    c.path.push_back({ContextStep::Left, std::move(side)});
    return c;
  }
  AppContext right(Pattern side) const {
    AppContext c = *this;
    c.path.push_back({ContextStep::Right, std::move(side)});
    return c;
  }

  Pattern plug(Pattern p) const {
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
      p = it->dir == ContextStep::Left ? app(std::move(p), it->side) : app(it->side, std::move(p));
    }
    return p;
  }

  bool operator==(const AppContext&) const = default;
};

// ---------------------------------------------------------------------------
// Proof objects

struct ProofNode;
using Proof = std::shared_ptr<const ProofNode>;

// One rule application. `patterns`, `var` and `contexts` are the rule's
// instantiation; their meaning per rule is documented on the builders below.
// `conclusion` is what the builder computed; the kernel never trusts it.
struct ProofNode {
  Rule rule;
  std::vector<Proof> premises;
  std::vector<Pattern> patterns;
  std::string var;
  std::vector<AppContext> contexts;
  Pattern conclusion;
};

namespace detail {

inline Pattern core_not(Pattern p) { return imp(std::move(p), bot()); }
inline Pattern core_or(Pattern p, Pattern q) { return imp(core_not(std::move(p)), std::move(q)); }
inline Pattern core_and(Pattern p, Pattern q) {
  return core_not(core_or(core_not(std::move(p)), core_not(std::move(q))));
}

[[noreturn]] inline void kernel_fail(ErrorCode code, std::size_t node, const std::string& msg) {
  throw CheckError(code, node, msg);
}

inline void need_wf(const Pattern& p, std::size_t node, const char* what) {
  if (!well_formed(p)) {
    kernel_fail(ErrorCode::IllFormedInstantiation, node, std::string(what) + " is not well-formed");
  }
}

inline void need_context_wf(const AppContext& c, std::size_t node) {
  for (const auto& s : c.path) need_wf(s.side, node, "context side pattern");
}

// Conclusion of one rule application from the (already verified) core
// conclusions of its premises. Every side condition is checked here; this is
// the trusted core shared by builders and the checker.
inline Pattern infer(const ProofNode& n, const std::vector<Pattern>& prem, std::size_t node) {
  std::vector<Pattern> ps;
  ps.reserve(n.patterns.size());
  for (const auto& p : n.patterns) ps.push_back(expand(p));

  auto shape = [&](const std::string& msg) -> Pattern {
    kernel_fail(ErrorCode::RuleShapeMismatch, node, std::string(rule_tag(n.rule)) + ": " + msg);
  };
  auto side = [&](const std::string& msg) -> Pattern {
    kernel_fail(ErrorCode::SideConditionViolated, node,
                std::string(rule_tag(n.rule)) + ": side condition " + msg);
  };
  auto arity = [&](std::size_t premises, std::size_t patterns, std::size_t contexts) {
    if (n.premises.size() != premises || n.patterns.size() != patterns ||
        n.contexts.size() != contexts) {
      kernel_fail(ErrorCode::MalformedProof, node,
                  std::string(rule_tag(n.rule)) + " expects " + std::to_string(premises) +
                      " premise(s), " + std::to_string(patterns) + " pattern(s), " +
                      std::to_string(contexts) + " context(s)");
    }
  };
  auto need_no_var = [&]() {
    if (!n.var.empty()) kernel_fail(ErrorCode::MalformedProof, node, "unexpected variable");
  };

  switch (n.rule) {
    case Rule::Hypothesis:
      arity(0, 1, 0);
      need_wf(ps[0], node, "hypothesis");
      return ps[0];  // membership in Γ is checked by the caller
    case Rule::Prop1:
      arity(0, 2, 0);
      need_no_var();
      need_wf(ps[0], node, "φ1");
      need_wf(ps[1], node, "φ2");
      return imp(ps[0], imp(ps[1], ps[0]));
    case Rule::Prop2:
      arity(0, 3, 0);
      need_no_var();
      for (const auto& p : ps) need_wf(p, node, "φi");
      return imp(imp(ps[0], imp(ps[1], ps[2])), imp(imp(ps[0], ps[1]), imp(ps[0], ps[2])));
    case Rule::Prop3:
      arity(0, 1, 0);
      need_no_var();
      need_wf(ps[0], node, "φ");
      return imp(core_not(core_not(ps[0])), ps[0]);
    case Rule::ModusPonens:
      arity(2, 0, 0);
      need_no_var();
      if (!prem[1].is(Kind::Imp)) return shape("second premise is not an implication");
      if (prem[1].left() != prem[0]) return shape("first premise does not match the antecedent");
      return prem[1].right();
    case Rule::ExQuantifier: {
      arity(0, 1, 0);
      if (n.var.empty()) kernel_fail(ErrorCode::MalformedProof, node, "missing element variable");
      Pattern ex = exists(ps[0]);
      need_wf(ex, node, "∃.φ");
      return imp(evar_open(0, n.var, ps[0]), ex);
    }
    case Rule::ExGen: {
      arity(1, 1, 0);
      if (n.var.empty()) kernel_fail(ErrorCode::MalformedProof, node, "missing element variable");
      const Pattern& pr = prem[0];
      if (!pr.is(Kind::Imp)) return shape("premise is not an implication");
      Pattern ex = exists(ps[0]);
      need_wf(ex, node, "∃.φ1");
      if (pr.left() != evar_open(0, n.var, ps[0])) {
        return shape("premise antecedent is not open(φ1, " + n.var + ")");
      }
      if (evar_occurs(pr.right(), n.var)) return side(n.var + " ∉ FV(φ2)");
      if (evar_occurs(ps[0], n.var)) return side(n.var + " ∉ FV(φ1)");
      return imp(ex, pr.right());
    }
    case Rule::PropBotL:
      arity(0, 1, 0);
      need_wf(ps[0], node, "φ");
      return imp(app(bot(), ps[0]), bot());
    case Rule::PropBotR:
      arity(0, 1, 0);
      need_wf(ps[0], node, "φ");
      return imp(app(ps[0], bot()), bot());
    case Rule::PropOrL:
      arity(0, 3, 0);
      for (const auto& p : ps) need_wf(p, node, "φi");
      return imp(app(core_or(ps[0], ps[1]), ps[2]), core_or(app(ps[0], ps[2]), app(ps[1], ps[2])));
    case Rule::PropOrR:
      arity(0, 3, 0);
      for (const auto& p : ps) need_wf(p, node, "φi");
      return imp(app(ps[0], core_or(ps[1], ps[2])), core_or(app(ps[0], ps[1]), app(ps[0], ps[2])));
    case Rule::PropExL:
      arity(0, 2, 0);
      need_wf(exists(ps[0]), node, "∃.φ1");
      need_wf(ps[1], node, "φ2");
      return imp(app(exists(ps[0]), ps[1]), exists(app(ps[0], ps[1])));
    case Rule::PropExR:
      arity(0, 2, 0);
      need_wf(ps[0], node, "φ1");
      need_wf(exists(ps[1]), node, "∃.φ2");
      return imp(app(ps[0], exists(ps[1])), exists(app(ps[0], ps[1])));
    case Rule::FramingL: {
      arity(1, 1, 0);
      need_wf(ps[0], node, "φ3");
      if (!prem[0].is(Kind::Imp)) return shape("premise is not an implication");
      return imp(app(prem[0].left(), ps[0]), app(prem[0].right(), ps[0]));
    }
    case Rule::FramingR: {
      arity(1, 1, 0);
      need_wf(ps[0], node, "φ1");
      if (!prem[0].is(Kind::Imp)) return shape("premise is not an implication");
      return imp(app(ps[0], prem[0].left()), app(ps[0], prem[0].right()));
    }
    case Rule::SvarSubst:
      arity(1, 1, 0);
      if (n.var.empty()) kernel_fail(ErrorCode::MalformedProof, node, "missing set variable");
      need_wf(ps[0], node, "ψ");
      return fsvar_subst(prem[0], ps[0], n.var);
    case Rule::PreFixpoint: {
      arity(0, 1, 0);
      Pattern m = mu(ps[0]);
      need_wf(m, node, "μ.φ");
      return imp(bsvar_subst(ps[0], m, 0), m);
    }
    case Rule::KnasterTarski: {
      arity(1, 1, 0);
      Pattern m = mu(ps[0]);
      need_wf(m, node, "μ.φ1");
      if (!prem[0].is(Kind::Imp)) return shape("premise is not an implication");
      const Pattern& target = prem[0].right();
      if (prem[0].left() != bsvar_subst(ps[0], target, 0)) {
        return shape("premise antecedent is not φ1[φ2/S0]");
      }
      return imp(m, target);
    }
    case Rule::Existence:
      arity(0, 0, 0);
      return exists(bevar(0));
    case Rule::Singleton: {
      arity(0, 1, 2);
      if (n.var.empty()) kernel_fail(ErrorCode::MalformedProof, node, "missing element variable");
      need_wf(ps[0], node, "φ");
      for (const auto& c : n.contexts) need_context_wf(c, node);
      Pattern x = evar(n.var);
      AppContext c1, c2;
      for (const auto& s : n.contexts[0].path) c1.path.push_back({s.dir, expand(s.side)});
      for (const auto& s : n.contexts[1].path) c2.path.push_back({s.dir, expand(s.side)});
      return core_not(core_and(c1.plug(core_and(x, ps[0])), c2.plug(core_and(x, core_not(ps[0])))));
    }
  }
  kernel_fail(ErrorCode::MalformedProof, node, "unknown rule");
}

inline Proof make_proof(Rule r, std::vector<Proof> premises, std::vector<Pattern> patterns,
                        std::string var = {}, std::vector<AppContext> contexts = {}) {
  ProofNode n{r, std::move(premises), std::move(patterns), std::move(var), std::move(contexts), {}};
  std::vector<Pattern> prem;
  prem.reserve(n.premises.size());
  for (const auto& p : n.premises) {
    if (!p) throw Error(ErrorCode::MalformedProof, "null premise");
    prem.push_back(p->conclusion);
  }
  n.conclusion = infer(n, prem, 0);
  return std::make_shared<const ProofNode>(std::move(n));
}

}  // namespace detail

// Builders. Each validates its rule instance immediately (throwing CheckError
// with node 0) and records the core conclusion.
namespace rules {

// Axiom from Γ; membership is verified by check().
inline Proof hypothesis(Pattern axiom) {
  return detail::make_proof(Rule::Hypothesis, {}, {std::move(axiom)});
}
// φ1 → (φ2 → φ1)
inline Proof prop1(Pattern a, Pattern b) {
  return detail::make_proof(Rule::Prop1, {}, {std::move(a), std::move(b)});
}
// (φ1 → (φ2 → φ3)) → (φ1 → φ2) → (φ1 → φ3)
inline Proof prop2(Pattern a, Pattern b, Pattern c) {
  return detail::make_proof(Rule::Prop2, {}, {std::move(a), std::move(b), std::move(c)});
}
// ((φ → ⊥) → ⊥) → φ
inline Proof prop3(Pattern a) { return detail::make_proof(Rule::Prop3, {}, {std::move(a)}); }
// from φ1 and φ1 → φ2
inline Proof modus_ponens(Proof minor, Proof major) {
  return detail::make_proof(Rule::ModusPonens, {std::move(minor), std::move(major)}, {});
}
// open(φ, x) → ∃.φ ; `body` is φ
inline Proof ex_quantifier(Pattern body, std::string x) {
  return detail::make_proof(Rule::ExQuantifier, {}, {std::move(body)}, std::move(x));
}
// from open(φ1, x) → φ2 infer (∃.φ1) → φ2 ; `body` is φ1
inline Proof ex_gen(Pattern body, std::string x, Proof premise) {
  return detail::make_proof(Rule::ExGen, {std::move(premise)}, {std::move(body)}, std::move(x));
}
inline Proof prop_bot_left(Pattern p) { return detail::make_proof(Rule::PropBotL, {}, {std::move(p)}); }
inline Proof prop_bot_right(Pattern p) { return detail::make_proof(Rule::PropBotR, {}, {std::move(p)}); }
inline Proof prop_or_left(Pattern a, Pattern b, Pattern c) {
  return detail::make_proof(Rule::PropOrL, {}, {std::move(a), std::move(b), std::move(c)});
}
inline Proof prop_or_right(Pattern a, Pattern b, Pattern c) {
  return detail::make_proof(Rule::PropOrR, {}, {std::move(a), std::move(b), std::move(c)});
}
// (∃.φ1) φ2 → ∃.(φ1 φ2) ; `body` is φ1
inline Proof prop_ex_left(Pattern body, Pattern right) {
  return detail::make_proof(Rule::PropExL, {}, {std::move(body), std::move(right)});
}
// φ1 (∃.φ2) → ∃.(φ1 φ2) ; `body` is φ2
inline Proof prop_ex_right(Pattern left, Pattern body) {
  return detail::make_proof(Rule::PropExR, {}, {std::move(left), std::move(body)});
}
// from φ1 → φ2 infer φ1 φ3 → φ2 φ3
inline Proof framing_left(Pattern right, Proof premise) {
  return detail::make_proof(Rule::FramingL, {std::move(premise)}, {std::move(right)});
}
// from φ2 → φ3 infer φ1 φ2 → φ1 φ3
inline Proof framing_right(Pattern left, Proof premise) {
  return detail::make_proof(Rule::FramingR, {std::move(premise)}, {std::move(left)});
}
// from φ infer φ[ψ/X]
inline Proof svar_subst(Pattern psi, std::string X, Proof premise) {
  return detail::make_proof(Rule::SvarSubst, {std::move(premise)}, {std::move(psi)}, std::move(X));
}
// φ[(μ.φ)/S0] → μ.φ ; `body` is φ
inline Proof pre_fixpoint(Pattern body) {
  return detail::make_proof(Rule::PreFixpoint, {}, {std::move(body)});
}
// from φ1[φ2/S0] → φ2 infer (μ.φ1) → φ2 ; `body` is φ1
inline Proof knaster_tarski(Pattern body, Proof premise) {
  return detail::make_proof(Rule::KnasterTarski, {std::move(premise)}, {std::move(body)});
}
inline Proof existence() { return detail::make_proof(Rule::Existence, {}, {}); }
// ¬(C1[x ∧ φ] ∧ C2[x ∧ ¬φ])
inline Proof singleton(AppContext c1, AppContext c2, std::string x, Pattern p) {
  return detail::make_proof(Rule::Singleton, {}, {std::move(p)}, std::move(x),
                            {std::move(c1), std::move(c2)});
}

}  // namespace rules

// ---------------------------------------------------------------------------
// Theories and theorems

// Γ: a named set of axioms. Axioms are stored expanded for membership tests.
class AxiomSet {
 public:
  AxiomSet() = default;
  explicit AxiomSet(std::string name) : name_(std::move(name)) {}
  AxiomSet(std::string name, std::vector<std::pair<std::string, Pattern>> axioms)
      : name_(std::move(name)) {
    for (auto& [n, p] : axioms) add(n, p);
  }

  void add(const std::string& name, const Pattern& p) {
    axioms_.emplace_back(name, p);
    core_.insert(expand(p));
  }

  const std::string& name() const { return name_; }
  const std::vector<std::pair<std::string, Pattern>>& axioms() const { return axioms_; }
  std::vector<Pattern> patterns() const {
    std::vector<Pattern> out;
    for (const auto& a : axioms_) out.push_back(a.second);
    return out;
  }
  bool contains(const Pattern& p) const { return core_.count(expand(p)) != 0; }
  bool empty() const { return axioms_.empty(); }

  std::optional<Pattern> find(const std::string& name) const {
    for (const auto& a : axioms_) {
      if (a.first == name) return a.second;
    }
    return std::nullopt;
  }

 private:
  std::string name_;
  std::vector<std::pair<std::string, Pattern>> axioms_;
  std::unordered_set<Pattern, PatternHash> core_;
};

// Nodes reachable from `root`, premises before conclusions, each once.
inline std::vector<const ProofNode*> proof_nodes(const Proof& root) {
  std::vector<const ProofNode*> order;
  std::unordered_set<const ProofNode*> seen;
  std::vector<std::pair<const ProofNode*, std::size_t>> stack{{root.get(), 0}};
  seen.insert(root.get());
  while (!stack.empty()) {
    auto& [n, i] = stack.back();
    if (i < n->premises.size()) {
      const ProofNode* c = n->premises[i++].get();
      if (c && seen.insert(c).second) stack.emplace_back(c, 0);
      continue;
    }
    order.push_back(n);
    stack.pop_back();
  }
  return order;
}

// Number of distinct nodes in the proof DAG.
inline std::size_t proof_size(const Proof& root) { return proof_nodes(root).size(); }

class Theorem;
Theorem check(const AxiomSet& theory, const Proof& proof);
std::vector<Theorem> check_all(const AxiomSet& theory, const std::vector<Proof>& proofs);

// Γ ⊢ φ. Only check() creates values of this type.
class Theorem {
 public:
  const Pattern& conclusion() const { return conclusion_; }
  const AxiomSet& theory() const { return *theory_; }
  const Proof& proof() const { return proof_; }

 private:
  Theorem(std::shared_ptr<const AxiomSet> t, Pattern c, Proof p)
      : theory_(std::move(t)), conclusion_(std::move(c)), proof_(std::move(p)) {}
  std::shared_ptr<const AxiomSet> theory_;
  Pattern conclusion_;
  Proof proof_;

  friend Theorem check(const AxiomSet&, const Proof&);
  friend std::vector<Theorem> check_all(const AxiomSet&, const std::vector<Proof>&);
};

namespace detail {

// Verifies every node reachable from `roots` once and returns their
// conclusions. Node numbers in diagnostics follow proof_nodes() order.
inline std::vector<Pattern> check_roots(const AxiomSet& theory, const std::vector<Proof>& roots) {
  std::unordered_map<const ProofNode*, Pattern> concl;
  std::size_t i = 0;
  for (const auto& root : roots) {
    if (!root) throw CheckError(ErrorCode::MalformedProof, 0, "empty proof");
    for (const ProofNode* node : proof_nodes(root)) {
      if (concl.count(node)) continue;
      const ProofNode& n = *node;
      std::vector<Pattern> prem;
      prem.reserve(n.premises.size());
      for (const auto& p : n.premises) {
        if (!p) throw CheckError(ErrorCode::MalformedProof, i, "null premise");
        prem.push_back(concl.at(p.get()));
      }
      Pattern c = infer(n, prem, i);
      if (n.rule == Rule::Hypothesis && !theory.contains(c)) {
        throw CheckError(ErrorCode::UnknownAxiom, i, "hypothesis is not an axiom of " +
                                                         (theory.name().empty() ? std::string("Γ")
                                                                                : theory.name()));
      }
      if (!well_formed(c)) {
        throw CheckError(ErrorCode::Internal, i, "rule produced an ill-formed conclusion");
      }
      concl.emplace(node, std::move(c));
      ++i;
    }
  }
  std::vector<Pattern> out;
  for (const auto& root : roots) out.push_back(concl.at(root.get()));
  return out;
}

}  // namespace detail

// Verifies every node of the derivation and returns the theorem.
inline Theorem check(const AxiomSet& theory, const Proof& proof) {
  Pattern c = detail::check_roots(theory, {proof}).front();
  return Theorem(std::make_shared<const AxiomSet>(theory), std::move(c), proof);
}

// Checks derivations that share subproofs, each shared node once.
inline std::vector<Theorem> check_all(const AxiomSet& theory, const std::vector<Proof>& proofs) {
  auto concl = detail::check_roots(theory, proofs);
  auto gamma = std::make_shared<const AxiomSet>(theory);
  std::vector<Theorem> out;
  out.reserve(proofs.size());
  for (std::size_t i = 0; i < proofs.size(); ++i) out.push_back(Theorem(gamma, std::move(concl[i]), proofs[i]));
  return out;
}

}  // namespace mlw
