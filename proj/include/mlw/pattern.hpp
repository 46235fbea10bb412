#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mlw/error.hpp"

namespace mlw {

// Locally nameless pseudo-patterns. Free variables are named, bound variables
// are de Bruijn indices. Pattern is an immutable value with shared structure;
// well-formedness is a separate check so that any pseudo-pattern can be built.
enum class Kind : std::uint8_t {
  FreeEVar,
  FreeSVar,
  BoundEVar,
  BoundSVar,
  Symbol,
  App,
  Bot,
  Imp,
  Exists,
  Mu,
  Notation,
};

using Index = std::uint64_t;

class Pattern;

// Number of ∃ and μ binders an argument of a notation sits under in the
// notation's expansion. Substitutions shift their target index by these.
struct BinderDepth {
  Index ex = 0;
  Index mu = 0;
  bool operator==(const BinderDepth&) const = default;
};

// A derived notation. `unfold` produces the one-level expansion (which may
// itself contain notation nodes); it must be compositional in the arguments,
// placing argument i under exactly `depths[i]` binders.
struct NotationDef {
  std::string name;
  std::size_t arity = 0;
  std::vector<BinderDepth> depths;
  std::function<Pattern(std::span<const Pattern>)> unfold;
};

using NotationPtr = std::shared_ptr<const NotationDef>;

namespace detail {

struct Node;
using NodePtr = std::shared_ptr<const Node>;

inline std::size_t hash_mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace detail

class Pattern {
 public:
  // Default-constructs ⊥ so that patterns can live in standard containers.
  Pattern();

  Kind kind() const noexcept;
  bool is(Kind k) const noexcept { return kind() == k; }

  // Variable or symbol name (FreeEVar, FreeSVar, Symbol).
  const std::string& name() const noexcept;
  // de Bruijn index (BoundEVar, BoundSVar).
  Index index() const noexcept;
  // App / Imp operands.
  const Pattern& left() const noexcept;
  const Pattern& right() const noexcept;
  // Exists / Mu body.
  const Pattern& body() const noexcept;

  // Direct subpatterns in left-to-right order (notation arguments included).
  std::span<const Pattern> children() const noexcept;

  // Notation nodes.
  const NotationDef& notation() const noexcept;
  const NotationPtr& notation_ptr() const noexcept;
  std::span<const Pattern> args() const noexcept;
  // Fully expanded core pattern of a notation node (cached).
  const Pattern& expansion() const noexcept;
  // One-level unfolding of a notation node.
  Pattern unfold_once() const;

  std::size_t size() const noexcept;
  std::size_t hash() const noexcept;
  bool has_notation() const noexcept;
  // No μ-bound set variable occurs negatively (cached).
  bool is_positive() const noexcept;
  // Smallest k such that every dangling element (resp. set) index is < k.
  Index ex_bound() const noexcept;
  Index mu_bound() const noexcept;

  bool same_node(const Pattern& o) const noexcept { return node_ == o.node_; }
  // Address of the shared node; stable while any copy is alive.
  const void* identity() const noexcept { return node_.get(); }

  friend bool operator==(const Pattern& a, const Pattern& b);

 private:
  explicit Pattern(detail::NodePtr n) : node_(std::move(n)) {}
  detail::NodePtr node_;

  friend Pattern make_node(Kind, std::string, Index, std::vector<Pattern>, NotationPtr);
};

namespace detail {

struct Node {
  Kind kind = Kind::Bot;
  std::string name;
  Index index = 0;
  std::vector<Pattern> children;
  NotationPtr notation;
  std::optional<Pattern> expansion_cache;  // Notation nodes only
  std::size_t size = 1;
  std::size_t hash = 0;
  Index ex_bound = 0;
  Index mu_bound = 0;
  bool has_notation = false;
  bool positive = true;
};

}  // namespace detail

Pattern make_node(Kind kind, std::string name, Index index, std::vector<Pattern> children,
                  NotationPtr notation);

// ---------------------------------------------------------------------------
// Constructors

inline Pattern evar(std::string name) {
  return make_node(Kind::FreeEVar, std::move(name), 0, {}, nullptr);
}
inline Pattern svar(std::string name) {
  return make_node(Kind::FreeSVar, std::move(name), 0, {}, nullptr);
}
inline Pattern bevar(Index n) { return make_node(Kind::BoundEVar, {}, n, {}, nullptr); }
inline Pattern bsvar(Index n) { return make_node(Kind::BoundSVar, {}, n, {}, nullptr); }
inline Pattern sym(std::string name) {
  return make_node(Kind::Symbol, std::move(name), 0, {}, nullptr);
}
inline Pattern app(Pattern l, Pattern r) {
  return make_node(Kind::App, {}, 0, {std::move(l), std::move(r)}, nullptr);
}
inline Pattern bot() { return Pattern(); }
inline Pattern imp(Pattern l, Pattern r) {
  return make_node(Kind::Imp, {}, 0, {std::move(l), std::move(r)}, nullptr);
}
inline Pattern exists(Pattern body) {
  return make_node(Kind::Exists, {}, 0, {std::move(body)}, nullptr);
}
inline Pattern mu(Pattern body) { return make_node(Kind::Mu, {}, 0, {std::move(body)}, nullptr); }

// Builds a notation node; throws ArityMismatch when the argument count is wrong.
inline Pattern notation(NotationPtr def, std::vector<Pattern> args) {
  if (!def) throw Error(ErrorCode::UnknownNotation, "null notation");
  if (args.size() != def->arity) {
    throw Error(ErrorCode::ArityMismatch, "notation '" + def->name + "' expects " +
                                              std::to_string(def->arity) + " argument(s), got " +
                                              std::to_string(args.size()));
  }
  const std::string name = def->name;
  return make_node(Kind::Notation, name, 0, std::move(args), std::move(def));
}

// Rebuilds a node of the same shape as `p` with new children.
inline Pattern with_children(const Pattern& p, std::vector<Pattern> children) {
  switch (p.kind()) {
    case Kind::App: return app(std::move(children[0]), std::move(children[1]));
    case Kind::Imp: return imp(std::move(children[0]), std::move(children[1]));
    case Kind::Exists: return exists(std::move(children[0]));
    case Kind::Mu: return mu(std::move(children[0]));
    case Kind::Notation: return notation(p.notation_ptr(), std::move(children));
    default: return p;
  }
}

// ---------------------------------------------------------------------------
// Implementation

namespace detail {

inline const NodePtr& bot_node() {
  static const NodePtr node = [] {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Bot;
    n->hash = hash_mix(0, static_cast<std::size_t>(Kind::Bot));
    return NodePtr(std::move(n));
  }();
  return node;
}

}  // namespace detail

inline Pattern::Pattern() : node_(detail::bot_node()) {}

inline Kind Pattern::kind() const noexcept { return node_->kind; }
inline const std::string& Pattern::name() const noexcept { return node_->name; }
inline Index Pattern::index() const noexcept { return node_->index; }
inline const Pattern& Pattern::left() const noexcept { return node_->children[0]; }
inline const Pattern& Pattern::right() const noexcept { return node_->children[1]; }
inline const Pattern& Pattern::body() const noexcept { return node_->children[0]; }
inline const NotationDef& Pattern::notation() const noexcept { return *node_->notation; }
inline const NotationPtr& Pattern::notation_ptr() const noexcept { return node_->notation; }
inline std::span<const Pattern> Pattern::args() const noexcept { return node_->children; }
inline std::span<const Pattern> Pattern::children() const noexcept { return node_->children; }
inline const Pattern& Pattern::expansion() const noexcept {
  return node_->kind == Kind::Notation ? *node_->expansion_cache : *this;
}
inline Pattern Pattern::unfold_once() const {
  if (kind() != Kind::Notation) return *this;
  return node_->notation->unfold(args());
}
inline std::size_t Pattern::size() const noexcept { return node_->size; }
inline std::size_t Pattern::hash() const noexcept { return node_->hash; }
inline bool Pattern::has_notation() const noexcept { return node_->has_notation; }
inline bool Pattern::is_positive() const noexcept { return node_->positive; }
inline Index Pattern::ex_bound() const noexcept { return node_->ex_bound; }
inline Index Pattern::mu_bound() const noexcept { return node_->mu_bound; }

// Fully expands notation nodes into core constructors.
inline Pattern expand(const Pattern& p) {
  if (!p.has_notation()) return p;
  if (p.kind() == Kind::Notation) return p.expansion();
  std::vector<Pattern> ch;
  switch (p.kind()) {
    case Kind::App:
    case Kind::Imp: ch = {expand(p.left()), expand(p.right())}; break;
    case Kind::Exists:
    case Kind::Mu: ch = {expand(p.body())}; break;
    default: return p;
  }
  return with_children(p, std::move(ch));
}

namespace detail {

// Polarity walk over core patterns: `negative` is true when the current
// position lies under an odd number of implication left-branches.
inline bool bound_svar_has_polarity(const Pattern& p, Index n, bool negative, bool want_negative) {
  if (p.mu_bound() <= n) return false;
  switch (p.kind()) {
    case Kind::BoundSVar: return p.index() == n && negative == want_negative;
    case Kind::App:
      return bound_svar_has_polarity(p.left(), n, negative, want_negative) ||
             bound_svar_has_polarity(p.right(), n, negative, want_negative);
    case Kind::Imp:
      return bound_svar_has_polarity(p.left(), n, !negative, want_negative) ||
             bound_svar_has_polarity(p.right(), n, negative, want_negative);
    case Kind::Exists: return bound_svar_has_polarity(p.body(), n, negative, want_negative);
    case Kind::Mu: return bound_svar_has_polarity(p.body(), n + 1, negative, want_negative);
    case Kind::Notation:
      return bound_svar_has_polarity(p.expansion(), n, negative, want_negative);
    default: return false;
  }
}

}  // namespace detail

inline Pattern make_node(Kind kind, std::string name, Index index, std::vector<Pattern> children,
                         NotationPtr notation) {
  auto n = std::make_shared<detail::Node>();
  n->kind = kind;
  n->name = std::move(name);
  n->index = index;
  n->children = std::move(children);
  n->notation = std::move(notation);

  std::size_t h = detail::hash_mix(0, static_cast<std::size_t>(kind));
  h = detail::hash_mix(h, std::hash<std::string>{}(n->name));
  h = detail::hash_mix(h, std::hash<Index>{}(n->index));
  std::size_t size = 1;
  bool has_notation = kind == Kind::Notation;
  for (const auto& c : n->children) {
    h = detail::hash_mix(h, c.hash());
    size += c.size();
    has_notation = has_notation || c.has_notation();
  }
  n->hash = h;
  n->size = size;
  n->has_notation = has_notation;

  switch (kind) {
    case Kind::BoundEVar: n->ex_bound = index + 1; break;
    case Kind::BoundSVar: n->mu_bound = index + 1; break;
    case Kind::App:
    case Kind::Imp:
      n->ex_bound = std::max(n->children[0].ex_bound(), n->children[1].ex_bound());
      n->mu_bound = std::max(n->children[0].mu_bound(), n->children[1].mu_bound());
      break;
    case Kind::Exists:
      n->ex_bound = n->children[0].ex_bound() > 0 ? n->children[0].ex_bound() - 1 : 0;
      n->mu_bound = n->children[0].mu_bound();
      break;
    case Kind::Mu:
      n->ex_bound = n->children[0].ex_bound();
      n->mu_bound = n->children[0].mu_bound() > 0 ? n->children[0].mu_bound() - 1 : 0;
      break;
    default: break;
  }

  for (const auto& c : n->children) n->positive = n->positive && c.is_positive();
  if (kind == Kind::Mu) {
    n->positive = n->positive && !detail::bound_svar_has_polarity(n->children[0], 0, false, true);
  }
  if (kind == Kind::Notation) {
    Pattern once = n->notation->unfold(n->children);
    n->expansion_cache = expand(once);
    n->ex_bound = n->expansion_cache->ex_bound();
    n->mu_bound = n->expansion_cache->mu_bound();
    n->positive = n->expansion_cache->is_positive();
  }
  return Pattern(detail::NodePtr(std::move(n)));
}

// Syntactic equality, notation nodes included (compared by name and arguments).
inline bool operator==(const Pattern& a, const Pattern& b) {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash() || a.size() != b.size() || a.kind() != b.kind()) return false;
  if (a.name() != b.name() || a.index() != b.index()) return false;
  auto ca = a.children();
  auto cb = b.children();
  if (ca.size() != cb.size()) return false;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    if (!(ca[i] == cb[i])) return false;
  }
  return true;
}

// Equality modulo notation expansion; this is what the kernel compares.
inline bool same_core(const Pattern& a, const Pattern& b) { return expand(a) == expand(b); }

struct PatternHash {
  std::size_t operator()(const Pattern& p) const noexcept { return p.hash(); }
};

}  // namespace mlw
