#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "mlw/proof.hpp"

namespace mlw {

using json = nlohmann::json;

inline constexpr int kProofFormatVersion = 1;

// Patterns as JSON arrays, always in core form:
//   ["evar","x"] ["svar","X"] ["bevar",0] ["bsvar",0] ["sym","f"]
//   ["app",l,r] ["bot"] ["imp",l,r] ["ex",body] ["mu",body]
inline json pattern_to_json(const Pattern& p) {
  switch (p.kind()) {
    case Kind::FreeEVar: return json::array({"evar", p.name()});
    case Kind::FreeSVar: return json::array({"svar", p.name()});
    case Kind::BoundEVar: return json::array({"bevar", p.index()});
    case Kind::BoundSVar: return json::array({"bsvar", p.index()});
    case Kind::Symbol: return json::array({"sym", p.name()});
    case Kind::App: return json::array({"app", pattern_to_json(p.left()), pattern_to_json(p.right())});
    case Kind::Bot: return json::array({"bot"});
    case Kind::Imp: return json::array({"imp", pattern_to_json(p.left()), pattern_to_json(p.right())});
    case Kind::Exists: return json::array({"ex", pattern_to_json(p.body())});
    case Kind::Mu: return json::array({"mu", pattern_to_json(p.body())});
    case Kind::Notation: return pattern_to_json(p.expansion());
  }
  return json();
}

namespace detail {

[[noreturn]] inline void schema_fail(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::Schema, path + ": " + msg);
}

inline const json& field(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) schema_fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) schema_fail(path, std::string("missing field '") + key + "'");
  return *it;
}

inline std::string string_at(const json& j, const std::string& path) {
  if (!j.is_string()) schema_fail(path, "expected a string");
  return j.get<std::string>();
}

}  // namespace detail

inline Pattern pattern_from_json(const json& j, const std::string& path = "$") {
  using detail::schema_fail;
  if (!j.is_array() || j.empty() || !j[0].is_string()) schema_fail(path, "expected a pattern array");
  const std::string tag = j[0].get<std::string>();
  auto want = [&](std::size_t n) {
    if (j.size() != n) schema_fail(path, "'" + tag + "' expects " + std::to_string(n - 1) + " operand(s)");
  };
  auto sub = [&](std::size_t i) { return pattern_from_json(j[i], path + "[" + std::to_string(i) + "]"); };
  auto name = [&]() {
    want(2);
    std::string s = detail::string_at(j[1], path + "[1]");
    if (s.empty()) schema_fail(path, "empty name");
    return s;
  };
  auto idx = [&]() -> Index {
    want(2);
    if (!j[1].is_number_unsigned() && !(j[1].is_number_integer() && j[1].get<std::int64_t>() >= 0)) {
      schema_fail(path + "[1]", "expected a natural number");
    }
    return j[1].get<Index>();
  };
  if (tag == "evar") return evar(name());
  if (tag == "svar") return svar(name());
  if (tag == "sym") return sym(name());
  if (tag == "bevar") return bevar(idx());
  if (tag == "bsvar") return bsvar(idx());
  if (tag == "bot") {
    want(1);
    return bot();
  }
  if (tag == "app" || tag == "imp") {
    want(3);
    return tag == "app" ? app(sub(1), sub(2)) : imp(sub(1), sub(2));
  }
  if (tag == "ex" || tag == "mu") {
    want(2);
    return tag == "ex" ? exists(sub(1)) : mu(sub(1));
  }
  schema_fail(path, "unknown pattern tag '" + tag + "'");
}

namespace detail {

// Hash-consed core patterns. Entry i refers to earlier entries by index:
//   ["app",l,r] ["imp",l,r] ["ex",b] ["mu",b], leaves as in pattern_to_json.
class TermWriter {
 public:
  std::size_t id(const Pattern& p) {
    if (auto it = by_node_.find(p.identity()); it != by_node_.end()) return it->second;
    std::size_t r = p.is(Kind::Notation) ? id(p.expansion()) : intern(p);
    by_node_.emplace(p.identity(), r);
    keep_.push_back(p);
    return r;
  }
  json take() { return std::move(terms_); }

 private:
  std::size_t intern(const Pattern& p) {
    json t;
    switch (p.kind()) {
      case Kind::App: t = json::array({"app", id(p.left()), id(p.right())}); break;
      case Kind::Imp: t = json::array({"imp", id(p.left()), id(p.right())}); break;
      case Kind::Exists: t = json::array({"ex", id(p.body())}); break;
      case Kind::Mu: t = json::array({"mu", id(p.body())}); break;
      default: t = pattern_to_json(p);
    }
    std::string key = t.dump();
    if (auto it = by_content_.find(key); it != by_content_.end()) return it->second;
    by_content_.emplace(std::move(key), terms_.size());
    terms_.push_back(std::move(t));
    return terms_.size() - 1;
  }

  json terms_ = json::array();
  std::unordered_map<const void*, std::size_t> by_node_;
  std::unordered_map<std::string, std::size_t> by_content_;
  std::vector<Pattern> keep_;  // keeps identities valid
};

inline std::vector<Pattern> read_terms(const json& terms) {
  if (!terms.is_array()) schema_fail("$.terms", "expected an array");
  std::vector<Pattern> out;
  out.reserve(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::string path = "$.terms[" + std::to_string(i) + "]";
    const json& t = terms[i];
    if (!t.is_array() || t.empty() || !t[0].is_string()) schema_fail(path, "expected a term array");
    const std::string tag = t[0].get<std::string>();
    auto ref = [&](std::size_t k) -> const Pattern& {
      if (k >= t.size() || !t[k].is_number_unsigned() || t[k].get<std::size_t>() >= i) {
        schema_fail(path + "[" + std::to_string(k) + "]", "expected a reference to an earlier term");
      }
      return out[t[k].get<std::size_t>()];
    };
    auto arity = [&](std::size_t n) {
      if (t.size() != n + 1) schema_fail(path, "'" + tag + "' expects " + std::to_string(n) + " operand(s)");
    };
    if (tag == "app" || tag == "imp") {
      arity(2);
      out.push_back(tag == "app" ? app(ref(1), ref(2)) : imp(ref(1), ref(2)));
    } else if (tag == "ex" || tag == "mu") {
      arity(1);
      out.push_back(tag == "ex" ? exists(ref(1)) : mu(ref(1)));
    } else {
      out.push_back(pattern_from_json(t, path));
    }
  }
  return out;
}

}  // namespace detail

// Canonical proof object: a table of shared terms, then nodes in
// premise-first order with structurally equal nodes merged. Keys are sorted
// and there are no floating point numbers.
inline json proof_to_json(const Proof& root, const std::string& theory = {}) {
  detail::TermWriter terms;
  json nodes = json::array();
  std::unordered_map<const ProofNode*, std::size_t> index;
  std::map<std::string, std::size_t> by_content;
  for (const ProofNode* n : proof_nodes(root)) {
    json node;
    node["rule"] = rule_tag(n->rule);
    json prem = json::array();
    for (const auto& p : n->premises) prem.push_back(index.at(p.get()));
    node["premises"] = std::move(prem);
    json pats = json::array();
    for (const auto& p : n->patterns) pats.push_back(terms.id(p));
    node["patterns"] = std::move(pats);
    if (!n->var.empty()) node["var"] = n->var;
    if (!n->contexts.empty()) {
      json ctx = json::array();
      for (const auto& c : n->contexts) {
        json path = json::array();
        for (const auto& s : c.path) path.push_back(json::array({s.dir == ContextStep::Left ? "L" : "R", terms.id(s.side)}));
        ctx.push_back(std::move(path));
      }
      node["contexts"] = std::move(ctx);
    }
    std::string key = node.dump();
    auto it = by_content.find(key);
    if (it != by_content.end()) {
      index.emplace(n, it->second);
      continue;
    }
    node["conclusion"] = terms.id(n->conclusion);
    index.emplace(n, nodes.size());
    by_content.emplace(std::move(key), nodes.size());
    nodes.push_back(std::move(node));
  }
  json out;
  out["format"] = "mlproof";
  out["version"] = kProofFormatVersion;
  out["theory"] = theory;
  out["root"] = index.at(root.get());
  out["terms"] = terms.take();
  out["nodes"] = std::move(nodes);
  return out;
}

inline std::string encode_proof(const Proof& root, const std::string& theory = {}) {
  return proof_to_json(root, theory).dump(1) + "\n";
}

struct DecodedProof {
  std::string theory;
  Proof root;
};

// Rebuilds the proof DAG. Every node is re-derived through the rule builders
// and its recorded conclusion must agree with the recomputed one.
inline DecodedProof proof_from_json(const json& j) {
  using detail::field;
  using detail::schema_fail;
  if (detail::string_at(field(j, "format", "$"), "$.format") != "mlproof") {
    schema_fail("$.format", "expected \"mlproof\"");
  }
  const json& ver = field(j, "version", "$");
  if (!ver.is_number_integer() || ver.get<int>() != kProofFormatVersion) {
    schema_fail("$.version", "unsupported version");
  }
  DecodedProof out;
  if (j.contains("theory")) out.theory = detail::string_at(j["theory"], "$.theory");
  const std::vector<Pattern> terms = detail::read_terms(field(j, "terms", "$"));
  auto term = [&](const json& r, const std::string& path) -> const Pattern& {
    if (!r.is_number_unsigned() || r.get<std::size_t>() >= terms.size()) schema_fail(path, "expected a term reference");
    return terms[r.get<std::size_t>()];
  };
  const json& nodes = field(j, "nodes", "$");
  if (!nodes.is_array() || nodes.empty()) schema_fail("$.nodes", "expected a nonempty array");
  std::vector<Proof> built;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string path = "$.nodes[" + std::to_string(i) + "]";
    const json& n = nodes[i];
    std::string tag = detail::string_at(field(n, "rule", path), path + ".rule");
    auto rule = rule_from_tag(tag);
    if (!rule) schema_fail(path + ".rule", "unknown rule '" + tag + "'");
    ProofNode node{*rule, {}, {}, {}, {}, {}};
    const json& prem = field(n, "premises", path);
    if (!prem.is_array()) schema_fail(path + ".premises", "expected an array");
    for (std::size_t k = 0; k < prem.size(); ++k) {
      if (!prem[k].is_number_unsigned() || prem[k].get<std::size_t>() >= i) {
        schema_fail(path + ".premises[" + std::to_string(k) + "]",
                    "premise must reference an earlier node");
      }
      node.premises.push_back(built[prem[k].get<std::size_t>()]);
    }
    const json& pats = field(n, "patterns", path);
    if (!pats.is_array()) schema_fail(path + ".patterns", "expected an array");
    for (std::size_t k = 0; k < pats.size(); ++k) {
      node.patterns.push_back(term(pats[k], path + ".patterns[" + std::to_string(k) + "]"));
    }
    if (n.contains("var")) node.var = detail::string_at(n["var"], path + ".var");
    if (n.contains("contexts")) {
      const json& ctx = n["contexts"];
      if (!ctx.is_array()) schema_fail(path + ".contexts", "expected an array");
      for (std::size_t k = 0; k < ctx.size(); ++k) {
        const std::string cp = path + ".contexts[" + std::to_string(k) + "]";
        if (!ctx[k].is_array()) schema_fail(cp, "expected a context path");
        AppContext c;
        for (std::size_t s = 0; s < ctx[k].size(); ++s) {
          const std::string sp = cp + "[" + std::to_string(s) + "]";
          const json& st = ctx[k][s];
          if (!st.is_array() || st.size() != 2) schema_fail(sp, "expected [\"L\"|\"R\", term]");
          std::string d = detail::string_at(st[0], sp + "[0]");
          if (d != "L" && d != "R") schema_fail(sp + "[0]", "expected \"L\" or \"R\"");
          c.path.push_back({d == "L" ? ContextStep::Left : ContextStep::Right, term(st[1], sp + "[1]")});
        }
        node.contexts.push_back(std::move(c));
      }
    }
    const Pattern& recorded = term(field(n, "conclusion", path), path + ".conclusion");
    std::vector<Pattern> pc;
    for (const auto& p : node.premises) pc.push_back(p->conclusion);
    node.conclusion = detail::infer(node, pc, i);
    if (node.conclusion != recorded) {
      throw CheckError(ErrorCode::RuleShapeMismatch, i,
                       "recorded conclusion differs from the one computed by " + tag);
    }
    built.push_back(std::make_shared<const ProofNode>(std::move(node)));
  }
  const json& root = field(j, "root", "$");
  if (!root.is_number_unsigned() || root.get<std::size_t>() >= built.size()) {
    schema_fail("$.root", "root must reference a node");
  }
  out.root = built[root.get<std::size_t>()];
  return out;
}

inline DecodedProof decode_proof(std::string_view bytes) {
  json j;
  try {
    j = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Schema, std::string("invalid JSON: ") + e.what());
  }
  return proof_from_json(j);
}

// Decodes and kernel-checks a proof object against Γ.
inline Theorem import_proof(const AxiomSet& theory, std::string_view bytes) {
  return check(theory, decode_proof(bytes).root);
}

inline std::string export_proof(const Theorem& t) { return encode_proof(t.proof(), t.theory().name()); }

}  // namespace mlw
