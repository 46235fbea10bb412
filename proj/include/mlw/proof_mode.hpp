#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mlw/lemmas.hpp"
#include "mlw/printer.hpp"
#include "mlw/proof_json.hpp"
#include "mlw/theory.hpp"

namespace mlw {

// ---------------------------------------------------------------------------
// Tactics as data

struct Tactic {
  std::string name;
  std::vector<std::string> names;     // hypothesis, lemma or notation names
  std::vector<std::string> patterns;  // bracketed pattern arguments, raw text
  std::optional<std::size_t> at;      // mlRewrite occurrence

  // Canonical one-line form; parse_tactic(text()) == *this.
  std::string text() const {
    std::string out = name;
    auto quoted = [](const std::string& s) { return "\"" + s + "\""; };
    if (name == "mlDestructOr" && names.size() == 3) {
      out += " " + quoted(names[0]) + " as " + quoted(names[1]) + " " + quoted(names[2]);
    } else if (name == "remember" && names.size() == 2) {
      out += " " + names[0] + " as " + names[1];
    } else if (name == "mlApplyMeta" || name == "mlRewrite" || name == "mlUnfold") {
      for (const auto& n : names) out += " " + n;
    } else {
      for (const auto& n : names) out += " " + quoted(n);
    }
    for (const auto& p : patterns) out += " [" + p + "]";
    if (at) out += " at " + std::to_string(*at);
    return out;
  }

  bool operator==(const Tactic&) const = default;
};

namespace detail {

inline bool is_bullet(const std::string& s) { return s == "*" || s == "-" || s == "+"; }

struct TacticToken {
  enum Kind { Word, Quoted, Bracket } kind;
  std::string text;
};

inline std::vector<TacticToken> tactic_tokens(std::string_view s) {
  std::vector<TacticToken> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (c == ' ' || c == '\t') {
      ++i;
    } else if (c == '"') {
      auto close = s.find('"', i + 1);
      if (close == std::string_view::npos) throw Error(ErrorCode::Syntax, "unterminated quoted name");
      out.push_back({TacticToken::Quoted, std::string(s.substr(i + 1, close - i - 1))});
      i = close + 1;
    } else if (c == '[') {
      int depth = 0;
      std::size_t j = i;
      for (; j < s.size(); ++j) {
        if (s[j] == '[') ++depth;
        if (s[j] == ']' && --depth == 0) break;
      }
      if (j == s.size()) throw Error(ErrorCode::Syntax, "unterminated '['");
      out.push_back({TacticToken::Bracket, std::string(s.substr(i + 1, j - i - 1))});
      i = j + 1;
    } else {
      std::size_t j = i;
      while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '"' && s[j] != '[') ++j;
      out.push_back({TacticToken::Word, std::string(s.substr(i, j - i))});
      i = j;
    }
  }
  return out;
}

}  // namespace detail

inline Tactic parse_tactic(std::string_view text) {
  auto toks = detail::tactic_tokens(text);
  if (!toks.empty() && toks.back().kind == detail::TacticToken::Word && toks.back().text == ".") toks.pop_back();
  if (!toks.empty() && toks.back().kind == detail::TacticToken::Word && toks.back().text.size() > 1 &&
      toks.back().text.back() == '.') {
    toks.back().text.pop_back();
  }
  if (toks.empty() || toks[0].kind != detail::TacticToken::Word) throw Error(ErrorCode::Syntax, "expected a tactic name");
  Tactic t;
  t.name = toks[0].text;
  if (detail::is_bullet(t.name)) {
    if (toks.size() != 1) throw Error(ErrorCode::Syntax, "a bullet stands alone");
    return t;
  }
  static const std::set<std::string> known = {"mlIntro", "mlRevertLast", "mlClear",   "mlExact",
                                              "mlApply", "mlApplyMeta",  "mlDestructOr", "mlRewrite",
                                              "mlTauto", "mlUnfold",     "remember"};
  if (!known.count(t.name)) throw Error(ErrorCode::Syntax, "unknown tactic '" + t.name + "'");
  auto bad = [&](const std::string& why) -> Error {
    return Error(ErrorCode::Syntax, t.name + ": " + why);
  };
  for (std::size_t i = 1; i < toks.size(); ++i) {
    const auto& k = toks[i];
    if (k.kind == detail::TacticToken::Bracket) {
      t.patterns.push_back(k.text);
    } else if (k.kind == detail::TacticToken::Word && k.text == "at") {
      if (i + 1 >= toks.size()) throw bad("expected a number after 'at'");
      try {
        std::size_t used = 0;
        long v = std::stol(toks[i + 1].text, &used);
        if (used != toks[i + 1].text.size() || v < 1) throw bad("occurrence must be a positive number");
        t.at = static_cast<std::size_t>(v);
      } catch (const std::logic_error&) {
        throw bad("occurrence must be a positive number");
      }
      ++i;
    } else if (k.kind == detail::TacticToken::Word && k.text == "as" &&
               (t.name == "mlDestructOr" || t.name == "remember")) {
      continue;
    } else {
      t.names.push_back(k.text);
    }
  }
  auto want = [&](std::size_t lo, std::size_t hi, std::size_t pats) {
    if (t.names.size() < lo || t.names.size() > hi || t.patterns.size() > pats) throw bad("wrong number of arguments");
    if (t.at && t.name != "mlRewrite") throw bad("'at' is only valid for mlRewrite");
  };
  if (t.name == "mlIntro") want(0, 1, 0);
  else if (t.name == "mlRevertLast" || t.name == "mlTauto") want(0, 0, 0);
  else if (t.name == "mlClear" || t.name == "mlExact" || t.name == "mlApply") want(1, 1, 0);
  else if (t.name == "mlDestructOr") {
    want(1, 3, 0);
    if (t.names.size() == 2) throw bad("expected two names after 'as'");
  } else if (t.name == "mlApplyMeta" || t.name == "mlRewrite") want(1, 1, 16);
  else if (t.name == "mlUnfold") want(1, 64, 0);
  else if (t.name == "remember") want(2, 2, 0);
  return t;
}

// ---------------------------------------------------------------------------
// Lemmas usable from tactics

struct LemmaInstance {
  Pattern statement;  // folded form shown to the user
  Proof proof;        // proves the statement (core equality)
};

struct LemmaContext {
  const Theory& theory;
  std::vector<Pattern> args;
};

using LemmaBuilder = std::function<LemmaInstance(const LemmaContext&)>;

namespace detail {

inline void need_args(const std::string& lemma, const LemmaContext& c, std::size_t n) {
  if (c.args.size() != n) {
    throw Error(ErrorCode::ArityMismatch,
                lemma + " expects " + std::to_string(n) + " pattern argument(s), got " + std::to_string(c.args.size()));
  }
}

// Γ ⊇ DEF, tested through the Definedness axiom.
inline void need_definedness(const std::string& lemma, const Theory& t) {
  auto ceil = t.notations.find("ceil");
  if (!ceil || !t.axioms.contains(notation(ceil, {evar("x")}))) {
    throw Error(ErrorCode::PreconditionFailed, lemma + " requires a theory that includes DEF");
  }
}

}  // namespace detail

inline const std::map<std::string, LemmaBuilder>& lemma_registry() {
  using namespace notations;
  static const std::map<std::string, LemmaBuilder> table = {
      {"patt_total_and",
       [](const LemmaContext& c) {
         detail::need_args("patt_total_and", c, 2);
         detail::need_definedness("patt_total_and", c.theory);
         auto floor = c.theory.notations.get("floor");
         const Pattern &a = c.args[0], &b = c.args[1];
         Pattern st = iff(notation(floor, {and_(a, b)}), and_(notation(floor, {a}), notation(floor, {b})));
         return LemmaInstance{st, derive::total_and(c.theory.notations, a, b)};
       }},
      {"singleton_ceil",
       [](const LemmaContext& c) {
         detail::need_args("singleton_ceil", c, 2);
         if (!c.args[0].is(Kind::FreeEVar)) {
           throw Error(ErrorCode::ShapeMismatch, "singleton_ceil: first argument must be an element variable");
         }
         auto ceil = c.theory.notations.get("ceil");
         const Pattern &x = c.args[0], &p = c.args[1];
         Pattern st = imp(notation(ceil, {and_(x, p)}), imp(notation(ceil, {and_(x, not_(p))}), bot()));
         return LemmaInstance{st, derive::singleton_ceil(c.theory.notations, x.name(), p)};
       }},
      {"prop_equiv",
       [](const LemmaContext& c) {
         detail::need_args("prop_equiv", c, 2);
         Pattern st = iff(c.args[0], c.args[1]);
         return LemmaInstance{st, derive::tauto_proof(st)};
       }},
      {"tauto",
       [](const LemmaContext& c) {
         detail::need_args("tauto", c, 1);
         return LemmaInstance{c.args[0], derive::tauto_proof(c.args[0])};
       }},
  };
  return table;
}

// A registered lemma, or an axiom of the theory by name.
inline LemmaInstance instantiate_lemma(const Theory& theory, const std::string& name, std::vector<Pattern> args) {
  for (const auto& a : args) {
    if (!well_formed(a)) throw Error(ErrorCode::PreconditionFailed, name + ": argument is not well-formed");
  }
  const auto& reg = lemma_registry();
  if (auto it = reg.find(name); it != reg.end()) {
    LemmaInstance li = it->second(LemmaContext{theory, std::move(args)});
    if (!same_core(li.statement, li.proof->conclusion)) {
      throw Error(ErrorCode::Internal, "lemma " + name + " proved a different statement");
    }
    return li;
  }
  if (auto ax = theory.axioms.find(name)) {
    if (!args.empty()) throw Error(ErrorCode::ArityMismatch, "axiom " + name + " takes no arguments");
    return {*ax, rules::hypothesis(*ax)};
  }
  throw Error(ErrorCode::UnresolvedName, "unknown lemma '" + name + "'");
}

// ---------------------------------------------------------------------------
// Proof states

struct Hypothesis {
  std::string name;
  Pattern pattern;
  bool operator==(const Hypothesis&) const = default;
};

struct Goal {
  std::size_t id = 0;
  std::vector<Hypothesis> hyps;
  Pattern goal;

  std::vector<Pattern> hyp_patterns() const {
    std::vector<Pattern> out;
    for (const auto& h : hyps) out.push_back(h.pattern);
    return out;
  }
  // ψ1 ---> ... ---> ψm ---> χ
  Pattern statement() const { return derive::chain(hyp_patterns(), goal); }
};

// One tactic application: closes `goal`, opening `subgoals`. `justify` maps
// proofs of the subgoal statements to a proof of the goal statement.
struct Step {
  std::size_t goal;
  std::vector<std::size_t> subgoals;
  std::function<Proof(const std::vector<Proof>&)> justify;
};

struct ProofState {
  std::vector<Goal> goals;  // goals.front() is focused
  std::vector<std::shared_ptr<const Step>> steps;
  std::size_t next_id = 1;
  std::vector<std::pair<std::string, std::string>> aliases;  // variable, display name
  // Bullet focus levels: symbol and number of goals hidden below the focus.
  std::vector<std::pair<std::string, std::size_t>> focus;

  std::size_t hidden() const { return focus.empty() ? 0 : focus.back().second; }
  std::size_t visible() const { return goals.size() - hidden(); }
};

namespace detail {

inline std::optional<Pattern> unfold_to_imp(Pattern p) {
  while (p.is(Kind::Notation)) p = p.unfold_once();
  if (p.is(Kind::Imp)) return p;
  return std::nullopt;
}

inline std::optional<std::pair<Pattern, Pattern>> as_or(const Pattern& p) {
  if (p.is(Kind::Notation) && p.notation().name == "or" && p.args().size() == 2) {
    return std::make_pair(p.args()[0], p.args()[1]);
  }
  auto i = unfold_to_imp(p);
  if (!i) return std::nullopt;
  auto n = unfold_to_imp(i->left());
  if (!n || !n->right().is(Kind::Bot)) return std::nullopt;
  return std::make_pair(n->left(), i->right());
}

inline Pattern unfold_named(const Pattern& p, const std::set<std::string>& names, bool& changed) {
  if (p.children().empty()) return p;
  Pattern q = map_children(p, [&](const Pattern& c, std::size_t) { return unfold_named(c, names, changed); });
  if (q.is(Kind::Notation) && names.count(q.notation().name)) {
    changed = true;
    return unfold_named(q.unfold_once(), names, changed);
  }
  return q;
}

// Replaces the k-th occurrence (1-based, preorder over the folded pattern)
// of a pattern with the same core as `target`.
class Occurrence {
 public:
  Occurrence(Pattern target, std::size_t k) : target_(expand(target)), k_(k) {}

  std::optional<Pattern> replace(const Pattern& p, const Pattern& with) {
    if (expand(p) == target_ && ++seen_ == k_) return with;
    if (p.children().empty()) return std::nullopt;
    auto ch = p.children();
    for (std::size_t i = 0; i < ch.size(); ++i) {
      if (auto r = replace(ch[i], with)) {
        std::vector<Pattern> out(ch.begin(), ch.end());
        out[i] = *r;
        return with_children(p, std::move(out));
      }
    }
    return std::nullopt;
  }

 private:
  Pattern target_;
  std::size_t k_;
  std::size_t seen_ = 0;
};

inline std::string auto_name(const std::vector<Hypothesis>& hyps) {
  for (std::size_t i = 0;; ++i) {
    std::string n = "H" + std::to_string(i);
    bool used = false;
    for (const auto& h : hyps) used = used || h.name == n;
    if (!used) return n;
  }
}

}  // namespace detail

inline Proof identity_step(const std::vector<Proof>& v) { return v.at(0); }

class Session {
 public:
  Session(TheoryPtr theory, Pattern goal) : theory_(std::move(theory)) {
    if (!theory_) throw Error(ErrorCode::PreconditionFailed, "session needs a theory");
    if (!well_formed(goal)) throw Error(ErrorCode::PreconditionFailed, "goal is not well-formed");
    initial_ = goal;
    Goal g;
    g.id = 0;
    g.goal = std::move(goal);
    state_.goals.push_back(std::move(g));
  }

  const Theory& theory() const { return *theory_; }
  const TheoryPtr& theory_ptr() const { return theory_; }
  const Pattern& initial_goal() const { return initial_; }
  const ProofState& state() const { return state_; }
  bool done() const { return state_.goals.empty(); }
  // Tactics applied so far, in canonical text form.
  const std::vector<std::string>& script() const { return script_; }

  // Applies a tactic to the focused goal. On error the session is unchanged.
  void apply(const Tactic& t) {
    ProofState next = state_;
    run(next, t);
    history_.push_back(std::move(state_));
    state_ = std::move(next);
    script_.push_back(t.text());
  }
  void apply(std::string_view text) { apply(parse_tactic(text)); }

  bool undo() {
    if (history_.empty()) return false;
    state_ = std::move(history_.back());
    history_.pop_back();
    script_.pop_back();
    return true;
  }

  // Parses a pattern argument: theory syntax plus display aliases.
  Pattern parse_arg(std::string_view text) const {
    Pattern p = theory_->parse(text);
    for (const auto& [var, alias] : state_.aliases) p = fevar_subst(p, evar(var), alias);
    return p;
  }

  // Pattern as shown to the user: aliases substituted, notations folded.
  std::string show(const Pattern& p, bool fold = true) const {
    Pattern q = p;
    for (const auto& [var, alias] : state_.aliases) q = fevar_subst(q, evar(alias), var);
    return print_pattern(q, fold, true);
  }

  // The state in the layout of an interactive prover.
  std::string render() const {
    if (state_.goals.empty()) return "No more goals.\n";
    if (state_.visible() == 0) return "This subproof is complete, but there are some unfocused goals.\n";
    const Goal& g = state_.goals.front();
    std::string out = "______________________________________(1/" + std::to_string(state_.visible()) + ")\n";
    out += "Γ ⊢\n";
    if (!g.hyps.empty()) {
      for (const auto& h : g.hyps) out += "\"" + h.name + "\" : " + show(h.pattern) + ",\n";
      out += "--------------------------------------\n";
    }
    out += show(g.goal) + "\n";
    return out;
  }

  json state_json() const {
    json j;
    j["theory"] = theory_->name;
    j["done"] = done();
    j["open_goals"] = state_.goals.size();
    j["steps"] = script_.size();
    j["rendered"] = render();
    json axioms = json::array();
    for (const auto& [n, p] : theory_->axioms.axioms()) {
      axioms.push_back({{"name", n}, {"pattern", print_pattern(p, true, true)}});
    }
    j["global"] = {{"theory", theory_->name}, {"axioms", axioms}};
    json goals = json::array();
    for (const auto& g : state_.goals) {
      json meta = json::array();
      json hyps = json::array();
      for (const auto& h : g.hyps) {
        hyps.push_back({{"name", h.name}, {"pattern", show(h.pattern)}, {"expanded", show(h.pattern, false)}});
        meta.push_back({{"obligation", "well_formed"}, {"pattern", show(h.pattern)}, {"discharged", true}});
      }
      meta.push_back({{"obligation", "well_formed"}, {"pattern", show(g.goal)}, {"discharged", true}});
      goals.push_back({{"meta", meta},
                       {"hypotheses", hyps},
                       {"goal", {{"pattern", show(g.goal)}, {"expanded", show(g.goal, false)}}},
                       {"statement", show(g.statement())}});
    }
    j["goals"] = goals;
    return j;
  }

  // Assembles the derivation and checks it with the kernel.
  Theorem qed() const {
    if (!done()) {
      throw Error(ErrorCode::OpenGoals, std::to_string(state_.goals.size()) + " goal(s) remain open");
    }
    std::map<std::size_t, const Step*> by_goal;
    for (const auto& s : state_.steps) by_goal[s->goal] = s.get();
    std::function<Proof(std::size_t)> build = [&](std::size_t id) -> Proof {
      const Step* s = by_goal.at(id);
      std::vector<Proof> sub;
      for (std::size_t c : s->subgoals) sub.push_back(build(c));
      return s->justify(sub);
    };
    Proof p;
    try {
      p = build(0);
      Theorem t = check(theory_->axioms, p);
      if (!same_core(t.conclusion(), initial_)) {
        throw Error(ErrorCode::Internal, "assembled proof concludes a different statement");
      }
      return t;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::Internal) throw;
      throw Error(ErrorCode::Internal, std::string("proof mode produced a derivation the kernel rejects: ") + e.what());
    }
  }

 private:
  TheoryPtr theory_;
  Pattern initial_;
  ProofState state_;
  std::vector<ProofState> history_;
  std::vector<std::string> script_;

  static std::size_t find_hyp(const Goal& g, const std::string& name) {
    for (std::size_t i = 0; i < g.hyps.size(); ++i) {
      if (g.hyps[i].name == name) return i;
    }
    throw Error(ErrorCode::UnresolvedName, "no hypothesis named \"" + name + "\"");
  }

  static void fresh_hyp_name(const Goal& g, const std::string& name, std::optional<std::size_t> except = {}) {
    for (std::size_t i = 0; i < g.hyps.size(); ++i) {
      if (g.hyps[i].name == name && i != except) {
        throw Error(ErrorCode::DuplicateName, "hypothesis \"" + name + "\" already exists");
      }
    }
  }

  std::vector<Pattern> parse_args(const Tactic& t) const {
    std::vector<Pattern> out;
    for (const auto& s : t.patterns) out.push_back(parse_arg(s));
    return out;
  }

  Goal child(ProofState& st, const Goal& parent) const {
    Goal g = parent;
    g.id = st.next_id++;
    return g;
  }

  void close(ProofState& st, const Goal& g, std::vector<Goal> subs,
             std::function<Proof(const std::vector<Proof>&)> justify) const {
    auto s = std::make_shared<Step>();
    s->goal = g.id;
    for (const auto& c : subs) s->subgoals.push_back(c.id);
    s->justify = std::move(justify);
    st.steps.push_back(std::move(s));
    st.goals.erase(st.goals.begin());
    st.goals.insert(st.goals.begin(), subs.begin(), subs.end());
  }

  void run(ProofState& st, const Tactic& t) const {
    if (t.name == "remember") {
      const std::string& var = t.names[0];
      const std::string& alias = t.names[1];
      if (!detail::valid_identifier(alias) || std::isupper(static_cast<unsigned char>(alias[0])) ||
          std::isupper(static_cast<unsigned char>(var[0]))) {
        throw Error(ErrorCode::Syntax, "remember: element variable names must start in lowercase");
      }
      for (const auto& [v, a] : st.aliases) {
        if (a == alias || v == var) throw Error(ErrorCode::DuplicateName, "remember: alias already in use");
      }
      if (evar_occurs(initial_, alias) || theory_->signature.contains(alias)) {
        throw Error(ErrorCode::DuplicateName, "remember: '" + alias + "' is already a name in the goal");
      }
      st.aliases.emplace_back(var, alias);
      return;
    }
    if (detail::is_bullet(t.name)) {
      bullet(st, t.name);
      return;
    }
    if (st.goals.empty()) throw Error(ErrorCode::OpenGoals, "no goals left");
    if (st.visible() == 0) throw Error(ErrorCode::OpenGoals, "this subproof is complete; continue with a bullet");
    const Goal g = st.goals.front();
    const auto hyps = g.hyp_patterns();

    if (t.name == "mlIntro") {
      auto i = detail::unfold_to_imp(g.goal);
      if (!i) throw Error(ErrorCode::ShapeMismatch, "mlIntro: the goal is not an implication");
      std::string name = t.names.empty() ? detail::auto_name(g.hyps) : t.names[0];
      fresh_hyp_name(g, name);
      Goal n = child(st, g);
      n.hyps.push_back({name, i->left()});
      n.goal = i->right();
      close(st, g, {n}, identity_step);
    } else if (t.name == "mlRevertLast") {
      if (g.hyps.empty()) throw Error(ErrorCode::ShapeMismatch, "mlRevertLast: no hypotheses");
      Goal n = child(st, g);
      n.goal = imp(n.hyps.back().pattern, n.goal);
      n.hyps.pop_back();
      close(st, g, {n}, identity_step);
    } else if (t.name == "mlClear") {
      std::size_t i = find_hyp(g, t.names[0]);
      Goal n = child(st, g);
      n.hyps.erase(n.hyps.begin() + static_cast<std::ptrdiff_t>(i));
      Pattern rest = derive::chain(std::span(hyps).subspan(i + 1), g.goal);
      Pattern h = hyps[i];
      std::vector<Pattern> prefix(hyps.begin(), hyps.begin() + static_cast<std::ptrdiff_t>(i));
      close(st, g, {n}, [prefix, rest, h](const std::vector<Proof>& v) {
        return derive::apply_under(prefix, rules::prop1(rest, h), v[0]);
      });
    } else if (t.name == "mlExact") {
      std::size_t i = find_hyp(g, t.names[0]);
      if (!same_core(hyps[i], g.goal)) {
        throw Error(ErrorCode::ShapeMismatch, "mlExact: \"" + t.names[0] + "\" does not match the goal");
      }
      close(st, g, {}, [hyps, i](const std::vector<Proof>&) { return derive::assume(hyps, i); });
    } else if (t.name == "mlApply") {
      std::size_t i = find_hyp(g, t.names[0]);
      auto [unfolded, premises] = match_conclusion(hyps[i], g.goal, "mlApply");
      Goal base = g;
      base.hyps[i].pattern = unfolded;
      std::vector<Goal> subs;
      for (const auto& p : premises) {
        Goal n = child(st, base);
        n.goal = p;
        subs.push_back(std::move(n));
      }
      close(st, g, subs, [hyps, i](const std::vector<Proof>& v) {
        Proof acc = derive::assume(hyps, i);
        for (const auto& pj : v) acc = derive::mp_under(hyps, acc, pj);
        return acc;
      });
    } else if (t.name == "mlApplyMeta") {
      LemmaInstance li = instantiate_lemma(*theory_, t.names[0], parse_args(t));
      auto [unfolded, premises] = match_conclusion(li.statement, g.goal, "mlApplyMeta");
      (void)unfolded;
      std::vector<Goal> subs;
      for (const auto& p : premises) {
        Goal n = child(st, g);
        n.goal = p;
        subs.push_back(std::move(n));
      }
      Proof lemma = li.proof;
      close(st, g, subs, [hyps, lemma](const std::vector<Proof>& v) {
        Proof acc = derive::lift_chain(hyps, lemma);
        for (const auto& pj : v) acc = derive::mp_under(hyps, acc, pj);
        return acc;
      });
    } else if (t.name == "mlDestructOr") {
      std::size_t i = find_hyp(g, t.names[0]);
      auto parts = detail::as_or(hyps[i]);
      if (!parts) throw Error(ErrorCode::ShapeMismatch, "mlDestructOr: \"" + t.names[0] + "\" is not a disjunction");
      std::string n1 = t.names.size() == 3 ? t.names[1] : t.names[0];
      std::string n2 = t.names.size() == 3 ? t.names[2] : t.names[0];
      fresh_hyp_name(g, n1, i);
      fresh_hyp_name(g, n2, i);
      Goal left = child(st, g);
      left.hyps[i] = {n1, parts->first};
      Goal right = child(st, g);
      right.hyps[i] = {n2, parts->second};
      std::vector<Pattern> prefix(hyps.begin(), hyps.begin() + static_cast<std::ptrdiff_t>(i));
      Pattern rest = derive::chain(std::span(hyps).subspan(i + 1), g.goal);
      Pattern a = parts->first, b = parts->second;
      close(st, g, {left, right}, [prefix, rest, a, b](const std::vector<Proof>& v) {
        Proof elim = derive::schematic("or_elim", {a, b, rest});
        return derive::mp_under(prefix, derive::apply_under(prefix, elim, v[0]), v[1]);
      });
    } else if (t.name == "mlTauto") {
      Pattern s = g.statement();
      TautoResult r = derive::tauto(s);
      if (!r.tautology) {
        std::string why = "mlTauto: not a propositional tautology (falsified by";
        for (const auto& [atom, val] : r.assignment) why += " " + show(atom) + "=" + (val ? "⊤" : "⊥");
        throw Error(ErrorCode::NotATautology, why + ")");
      }
      Proof p = r.proof;
      close(st, g, {}, [p](const std::vector<Proof>&) { return p; });
    } else if (t.name == "mlUnfold") {
      std::set<std::string> names(t.names.begin(), t.names.end());
      for (const auto& n : names) {
        if (!theory_->notations.contains(n)) throw Error(ErrorCode::UnknownNotation, "unknown notation '" + n + "'");
      }
      bool changed = false;
      Goal n = child(st, g);
      n.goal = detail::unfold_named(g.goal, names, changed);
      if (!changed) throw Error(ErrorCode::NoOccurrence, "mlUnfold: nothing to unfold in the goal");
      close(st, g, {n}, identity_step);
    } else if (t.name == "mlRewrite") {
      LemmaInstance li = instantiate_lemma(*theory_, t.names[0], parse_args(t));
      Pattern lhs, rhs;
      if (li.statement.is(Kind::Notation) && li.statement.notation().name == "iff") {
        lhs = li.statement.args()[0];
        rhs = li.statement.args()[1];
      } else if (auto s = derive::split_iff(expand(li.statement))) {
        lhs = s->first;
        rhs = s->second;
      } else {
        throw Error(ErrorCode::ShapeMismatch, "mlRewrite: " + t.names[0] + " is not an equivalence");
      }
      std::size_t k = t.at.value_or(1);
      const std::string hole = "%hole";
      auto tmpl = detail::Occurrence(lhs, k).replace(g.goal, svar(hole));
      if (!tmpl) {
        throw Error(ErrorCode::NoOccurrence, "mlRewrite: occurrence " + std::to_string(k) + " of " + show(lhs) +
                                                 " not found in the goal");
      }
      Goal n = child(st, g);
      n.goal = *detail::Occurrence(lhs, k).replace(g.goal, rhs);
      derive::Directions d = derive::congruence_directions(*tmpl, hole, li.proof);
      Proof back = d.bw;
      close(st, g, {n}, [hyps, back](const std::vector<Proof>& v) { return derive::apply_under(hyps, back, v[0]); });
    } else {
      throw Error(ErrorCode::Syntax, "unknown tactic '" + t.name + "'");
    }
  }

  // A bullet finishes the subproof opened by the same symbol, if any, and
  // focuses the next goal.
  static void bullet(ProofState& st, const std::string& sym) {
    auto it = std::find_if(st.focus.begin(), st.focus.end(), [&](const auto& f) { return f.first == sym; });
    if (it != st.focus.end()) {
      if (st.goals.size() != it->second) {
        throw Error(ErrorCode::OpenGoals, "wrong bullet " + sym + ": the current subproof is not finished");
      }
      st.focus.erase(it, st.focus.end());
    }
    if (st.visible() == 0) throw Error(ErrorCode::OpenGoals, "no more goals for bullet " + sym);
    st.focus.emplace_back(sym, st.goals.size() - 1);
  }

  // Unfolds `p` until its conclusion has the same core as `goal`; returns the
  // unfolded implication chain and its premises.
  static std::pair<Pattern, std::vector<Pattern>> match_conclusion(const Pattern& p, const Pattern& goal,
                                                                    const char* who) {
    std::vector<Pattern> premises;
    Pattern cur = p;
    while (!same_core(cur, goal)) {
      auto i = detail::unfold_to_imp(cur);
      if (!i) throw Error(ErrorCode::ShapeMismatch, std::string(who) + ": conclusion does not match the goal");
      premises.push_back(i->left());
      cur = i->right();
    }
    return {derive::chain(premises, cur), premises};
  }
};

}  // namespace mlw
