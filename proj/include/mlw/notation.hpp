#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "mlw/pattern.hpp"
#include "mlw/syntax.hpp"

namespace mlw {

// Named notation definitions visible to the parser and the printer.
class NotationEnv {
 public:
  void add(NotationPtr def) {
    if (defs_.count(def->name)) {
      throw Error(ErrorCode::DuplicateName, "notation '" + def->name + "' already defined");
    }
    order_.push_back(def->name);
    defs_.emplace(def->name, std::move(def));
  }

  NotationPtr find(const std::string& name) const {
    auto it = defs_.find(name);
    return it == defs_.end() ? nullptr : it->second;
  }

  NotationPtr get(const std::string& name) const {
    auto def = find(name);
    if (!def) throw Error(ErrorCode::UnknownNotation, "unknown notation '" + name + "'");
    return def;
  }

  bool contains(const std::string& name) const { return defs_.count(name) != 0; }

  // Definition order, which is also dependency order.
  const std::vector<std::string>& names() const { return order_; }

  // Adds every definition of `other` not already present.
  void merge(const NotationEnv& other) {
    for (const auto& n : other.order_) {
      if (!contains(n)) add(other.get(n));
    }
  }

 private:
  std::map<std::string, NotationPtr> defs_;
  std::vector<std::string> order_;
};

namespace notations {

inline NotationPtr make_def(std::string name, std::size_t arity, std::vector<BinderDepth> depths,
                            std::function<Pattern(std::span<const Pattern>)> unfold) {
  auto d = std::make_shared<NotationDef>();
  d->name = std::move(name);
  d->arity = arity;
  d->depths = depths.empty() ? std::vector<BinderDepth>(arity) : std::move(depths);
  d->unfold = std::move(unfold);
  return d;
}

inline const NotationPtr& not_def() {
  static const NotationPtr d =
      make_def("not", 1, {}, [](std::span<const Pattern> a) { return imp(a[0], bot()); });
  return d;
}

inline Pattern not_(Pattern p) { return notation(not_def(), {std::move(p)}); }

inline const NotationPtr& or_def() {
  static const NotationPtr d = make_def(
      "or", 2, {}, [](std::span<const Pattern> a) { return imp(not_(a[0]), a[1]); });
  return d;
}

inline Pattern or_(Pattern p, Pattern q) { return notation(or_def(), {std::move(p), std::move(q)}); }

inline const NotationPtr& and_def() {
  static const NotationPtr d = make_def("and", 2, {}, [](std::span<const Pattern> a) {
    return not_(or_(not_(a[0]), not_(a[1])));
  });
  return d;
}

inline Pattern and_(Pattern p, Pattern q) {
  return notation(and_def(), {std::move(p), std::move(q)});
}

inline const NotationPtr& iff_def() {
  static const NotationPtr d = make_def("iff", 2, {}, [](std::span<const Pattern> a) {
    return and_(imp(a[0], a[1]), imp(a[1], a[0]));
  });
  return d;
}

inline Pattern iff(Pattern p, Pattern q) { return notation(iff_def(), {std::move(p), std::move(q)}); }

inline const NotationPtr& top_def() {
  static const NotationPtr d =
      make_def("top", 0, {}, [](std::span<const Pattern>) { return not_(bot()); });
  return d;
}

inline Pattern top() { return notation(top_def(), {}); }

// ∀. p := ¬ ∃. ¬ p   (p sits under one ∃ binder)
inline const NotationPtr& forall_def() {
  static const NotationPtr d = make_def("forall", 1, {BinderDepth{1, 0}},
                                        [](std::span<const Pattern> a) {
                                          return not_(exists(not_(a[0])));
                                        });
  return d;
}

inline Pattern forall(Pattern body) { return notation(forall_def(), {std::move(body)}); }

// ν. p := ¬ μ. ¬ p[¬S̄0 / S̄0]   (p sits under one μ binder)
inline const NotationPtr& nu_def() {
  static const NotationPtr d =
      make_def("nu", 1, {BinderDepth{0, 1}}, [](std::span<const Pattern> a) {
        Pattern flipped = map_bound_svar(a[0], 0, [](const Pattern& s) { return not_(s); });
        return not_(mu(not_(flipped)));
      });
  return d;
}

inline Pattern nu(Pattern body) { return notation(nu_def(), {std::move(body)}); }

}  // namespace notations

// The propositional, quantifier and fixpoint notations every theory can use.
inline NotationEnv builtin_notations() {
  NotationEnv env;
  env.add(notations::not_def());
  env.add(notations::or_def());
  env.add(notations::and_def());
  env.add(notations::iff_def());
  env.add(notations::top_def());
  env.add(notations::forall_def());
  env.add(notations::nu_def());
  return env;
}

// ---------------------------------------------------------------------------
// Template notations (declared in theory files)

namespace detail {

inline std::string placeholder_name(std::size_t i) { return "?" + std::to_string(i); }

inline bool is_placeholder(const Pattern& p) {
  return p.kind() == Kind::FreeSVar && !p.name().empty() && p.name()[0] == '?';
}

inline std::size_t placeholder_index(const Pattern& p) { return std::stoul(p.name().substr(1)); }

// Raw replacement of placeholders: arguments are plugged in verbatim, so a
// dangling index in an argument is captured by binders of the template.
inline Pattern instantiate(const Pattern& tmpl, std::span<const Pattern> args) {
  if (is_placeholder(tmpl)) return args[placeholder_index(tmpl)];
  if (tmpl.children().empty()) return tmpl;
  return map_children(tmpl, [&](const Pattern& c, std::size_t) { return instantiate(c, args); });
}

inline void placeholder_depths(const Pattern& p, BinderDepth here,
                               std::vector<std::vector<BinderDepth>>& seen) {
  if (is_placeholder(p)) {
    seen[placeholder_index(p)].push_back(here);
    return;
  }
  auto ch = p.children();
  for (std::size_t i = 0; i < ch.size(); ++i) {
    BinderDepth d = child_depth(p, i);
    placeholder_depths(ch[i], BinderDepth{here.ex + d.ex, here.mu + d.mu}, seen);
  }
}

}  // namespace detail

inline Pattern placeholder(std::size_t i) { return svar(detail::placeholder_name(i)); }

// Defines a notation by a template over placeholder(0..arity-1). Binder depths
// are inferred and must agree across all occurrences of a parameter; the
// template may not mention free variables of its own.
inline NotationPtr template_notation(std::string name, std::size_t arity, Pattern tmpl) {
  std::vector<std::vector<BinderDepth>> seen(arity);
  detail::placeholder_depths(tmpl, {}, seen);
  std::vector<BinderDepth> depths(arity);
  for (std::size_t i = 0; i < arity; ++i) {
    for (const auto& d : seen[i]) {
      if (!(d == seen[i].front())) {
        throw Error(ErrorCode::Schema, "notation '" + name + "': parameter " + std::to_string(i) +
                                           " occurs under different binder depths");
      }
    }
    if (!seen[i].empty()) depths[i] = seen[i].front();
  }
  for (const auto& v : free_evars(tmpl)) {
    throw Error(ErrorCode::Schema, "notation '" + name + "' mentions free variable '" + v + "'");
  }
  for (const auto& v : free_svars(tmpl)) {
    if (v.empty() || v[0] != '?') {
      throw Error(ErrorCode::Schema, "notation '" + name + "' mentions free variable '" + v + "'");
    }
  }
  if (!wf_closed(tmpl)) {
    throw Error(ErrorCode::Schema, "notation '" + name + "' has dangling de Bruijn indices");
  }
  return notations::make_def(std::move(name), arity, std::move(depths),
                             [tmpl](std::span<const Pattern> a) { return detail::instantiate(tmpl, a); });
}

}  // namespace mlw
