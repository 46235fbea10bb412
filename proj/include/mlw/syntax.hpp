#pragma once

#include <set>
#include <string>
#include <vector>

#include "mlw/pattern.hpp"

namespace mlw {

using NameSet = std::set<std::string>;

// ---------------------------------------------------------------------------
// Well-formedness

// Every dangling element index is < bound (+ enclosing ∃ binders).
inline bool wf_closed_ex(const Pattern& p, Index bound) { return p.ex_bound() <= bound; }
// Every dangling set index is < bound (+ enclosing μ binders).
inline bool wf_closed_mu(const Pattern& p, Index bound) { return p.mu_bound() <= bound; }
inline bool wf_closed(const Pattern& p) { return wf_closed_ex(p, 0) && wf_closed_mu(p, 0); }

namespace detail {

}  // namespace detail

// True iff the set index `n` has no negative occurrence in `p` (indices shift under μ).
inline bool no_negative_occurrence(const Pattern& p, Index n) {
  return !detail::bound_svar_has_polarity(p, n, false, true);
}
inline bool no_positive_occurrence(const Pattern& p, Index n) {
  return !detail::bound_svar_has_polarity(p, n, false, false);
}

// Every μ-bound index occurs under an even number of implication left-branches.
inline bool wf_positive(const Pattern& p) { return p.is_positive(); }

inline bool well_formed(const Pattern& p) {
  return wf_closed_ex(p, 0) && wf_closed_mu(p, 0) && wf_positive(p);
}

// ---------------------------------------------------------------------------
// Free variables and fresh names

namespace detail {

inline void collect_free(const Pattern& p, Kind which, NameSet& out) {
  if (p.kind() == which) {
    out.insert(p.name());
    return;
  }
  if (p.kind() == Kind::Notation) {
    for (const auto& a : p.args()) collect_free(a, which, out);
    return;
  }
  for (const auto& c : p.children()) collect_free(c, which, out);
}

inline bool occurs_free(const Pattern& p, Kind which, const std::string& name) {
  if (p.kind() == which) return p.name() == name;
  for (const auto& c : p.children()) {
    if (occurs_free(c, which, name)) return true;
  }
  return false;
}

}  // namespace detail

inline NameSet free_evars(const Pattern& p) {
  NameSet out;
  detail::collect_free(p, Kind::FreeEVar, out);
  return out;
}
inline NameSet free_svars(const Pattern& p) {
  NameSet out;
  detail::collect_free(p, Kind::FreeSVar, out);
  return out;
}
inline bool evar_occurs(const Pattern& p, const std::string& x) {
  return detail::occurs_free(p, Kind::FreeEVar, x);
}
inline bool svar_occurs(const Pattern& p, const std::string& X) {
  return detail::occurs_free(p, Kind::FreeSVar, X);
}

// Deterministic fresh name: the (length, lexicographic)-greatest avoided name
// with a prime appended, or `first` when nothing needs avoiding. The result is
// strictly longer than every avoided name, hence fresh.
inline std::string fresh_name(const NameSet& avoid, const std::string& first) {
  if (avoid.empty()) return first;
  const std::string* best = nullptr;
  for (const auto& n : avoid) {
    if (!best || n.size() > best->size() || (n.size() == best->size() && n > *best)) best = &n;
  }
  return *best + "'";
}

inline std::string fresh_evar(const Pattern& p) { return fresh_name(free_evars(p), "x"); }
inline std::string fresh_svar(const Pattern& p) { return fresh_name(free_svars(p), "X"); }

// ---------------------------------------------------------------------------
// Substitution

namespace detail {

// Rebuilds `p` from transformed children, keeping the original node when no
// child changed.
template <typename F>
Pattern map_children(const Pattern& p, F&& f) {
  auto ch = p.children();
  std::vector<Pattern> out;
  out.reserve(ch.size());
  bool changed = false;
  for (std::size_t i = 0; i < ch.size(); ++i) {
    out.push_back(f(ch[i], i));
    changed = changed || !out.back().same_node(ch[i]);
  }
  return changed ? with_children(p, std::move(out)) : p;
}

inline BinderDepth child_depth(const Pattern& p, std::size_t i) {
  switch (p.kind()) {
    case Kind::Exists: return {1, 0};
    case Kind::Mu: return {0, 1};
    case Kind::Notation: return p.notation().depths[i];
    default: return {0, 0};
  }
}

}  // namespace detail

// Replaces dangling element index k by psi and decrements dangling indices > k.
// psi is inserted unchanged; callers pass closed patterns.
inline Pattern bevar_subst(const Pattern& p, const Pattern& psi, Index k) {
  if (p.ex_bound() <= k) return p;
  if (p.kind() == Kind::BoundEVar) {
    if (p.index() == k) return psi;
    return bevar(p.index() - 1);  // index > k since ex_bound > k
  }
  return detail::map_children(p, [&](const Pattern& c, std::size_t i) {
    return bevar_subst(c, psi, k + detail::child_depth(p, i).ex);
  });
}

inline Pattern bsvar_subst(const Pattern& p, const Pattern& psi, Index k) {
  if (p.mu_bound() <= k) return p;
  if (p.kind() == Kind::BoundSVar) {
    if (p.index() == k) return psi;
    return bsvar(p.index() - 1);
  }
  return detail::map_children(p, [&](const Pattern& c, std::size_t i) {
    return bsvar_subst(c, psi, k + detail::child_depth(p, i).mu);
  });
}

inline Pattern evar_open(Index k, const std::string& x, const Pattern& p) {
  return bevar_subst(p, evar(x), k);
}
inline Pattern svar_open(Index k, const std::string& X, const Pattern& p) {
  return bsvar_subst(p, svar(X), k);
}

namespace detail {

inline Pattern free_subst(const Pattern& p, const Pattern& psi, Kind which, const std::string& name) {
  if (p.kind() == which) return p.name() == name ? psi : p;
  if (p.children().empty()) return p;
  return map_children(p, [&](const Pattern& c, std::size_t) {
    return free_subst(c, psi, which, name);
  });
}

inline void require_closed(const Pattern& psi, const char* op) {
  if (!wf_closed(psi)) {
    throw Error(ErrorCode::NotClosed,
                std::string(op) + ": substituted pattern has dangling de Bruijn indices");
  }
}

}  // namespace detail

// Replaces the free element variable x by psi. psi must be closed, so no
// capture can occur.
inline Pattern fevar_subst(const Pattern& p, const Pattern& psi, const std::string& x) {
  detail::require_closed(psi, "fevar_subst");
  return detail::free_subst(p, psi, Kind::FreeEVar, x);
}

inline Pattern fsvar_subst(const Pattern& p, const Pattern& psi, const std::string& X) {
  detail::require_closed(psi, "fsvar_subst");
  return detail::free_subst(p, psi, Kind::FreeSVar, X);
}

// Inverse of opening: turns free occurrences of x into the index bound by a
// binder placed k levels above.
inline Pattern evar_quantify(const Pattern& p, const std::string& x, Index k) {
  if (p.kind() == Kind::FreeEVar) return p.name() == x ? bevar(k) : p;
  if (p.children().empty()) return p;
  return detail::map_children(p, [&](const Pattern& c, std::size_t i) {
    return evar_quantify(c, x, k + detail::child_depth(p, i).ex);
  });
}

inline Pattern svar_quantify(const Pattern& p, const std::string& X, Index k) {
  if (p.kind() == Kind::FreeSVar) return p.name() == X ? bsvar(k) : p;
  if (p.children().empty()) return p;
  return detail::map_children(p, [&](const Pattern& c, std::size_t i) {
    return svar_quantify(c, X, k + detail::child_depth(p, i).mu);
  });
}

// ∃x. p and μX. p in named form.
inline Pattern exists_quantify(const std::string& x, const Pattern& p) {
  return exists(evar_quantify(p, x, 0));
}
inline Pattern mu_quantify(const std::string& X, const Pattern& p) {
  return mu(svar_quantify(p, X, 0));
}

// Applies f to every occurrence of the set index that refers to the binder
// `n` levels up (tracking μ binders), e.g. to negate the variable of ν.
template <typename F>
Pattern map_bound_svar(const Pattern& p, Index n, F&& f) {
  if (p.mu_bound() <= n) return p;
  if (p.kind() == Kind::BoundSVar) return p.index() == n ? f(p) : p;
  return detail::map_children(p, [&](const Pattern& c, std::size_t i) {
    return map_bound_svar(c, n + detail::child_depth(p, i).mu, f);
  });
}

}  // namespace mlw
