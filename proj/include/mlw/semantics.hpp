#pragma once

#include <atomic>
#include <cmath>
#include <functional>
#include <future>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mlw/model.hpp"
#include "mlw/pattern.hpp"
#include "mlw/syntax.hpp"

namespace mlw {

inline constexpr double kDefaultBudget = 1e6;

struct EvalOptions {
  // Give non-positive μ bodies prefixpoint-intersection semantics by
  // enumerating all 2^|M| subsets (only for |M| <= kMaxPrefixpointCarrier).
  bool enumerate_prefixpoints = false;
  // Cap on valuations enumerated by holds / entails_over.
  double budget = kDefaultBudget;
  // Checked between valuations and fixpoint iterations; raises Cancelled.
  const std::atomic<bool>* cancel = nullptr;
  // Evaluate the models of a suite concurrently.
  bool parallel = false;
};

inline constexpr std::size_t kMaxPrefixpointCarrier = 5;

using SetTransformer = std::function<Subset(const Subset&)>;

namespace detail {

inline void check_cancel(const EvalOptions& o) {
  if (o.cancel && o.cancel->load(std::memory_order_relaxed)) {
    throw Error(ErrorCode::Cancelled, "evaluation cancelled");
  }
}

}  // namespace detail

// Least fixpoint of a monotone transformer on the powerset of an n-element
// carrier by Kleene iteration from ∅. A chain that decreases or fails to
// stabilise within n+1 steps means F is not monotone.
inline Subset lfp(const SetTransformer& f, std::size_t n, const EvalOptions& opts = {}) {
  Subset current(n);
  for (std::size_t step = 0; step <= n + 1; ++step) {
    detail::check_cancel(opts);
    Subset next = f(current);
    if (next == current) return current;
    if (!current.subset_of(next)) {
      throw Error(ErrorCode::NonMonotone, "Kleene iteration is not increasing");
    }
    current = std::move(next);
  }
  throw Error(ErrorCode::NonMonotone, "Kleene iteration did not stabilise");
}

// Greatest fixpoint by downward Kleene iteration from the full carrier.
inline Subset gfp(const SetTransformer& f, std::size_t n, const EvalOptions& opts = {}) {
  Subset current = Subset::full(n);
  for (std::size_t step = 0; step <= n + 1; ++step) {
    detail::check_cancel(opts);
    Subset next = f(current);
    if (next == current) return current;
    if (!next.subset_of(current)) {
      throw Error(ErrorCode::NonMonotone, "downward Kleene iteration is not decreasing");
    }
    current = std::move(next);
  }
  throw Error(ErrorCode::NonMonotone, "downward Kleene iteration did not stabilise");
}

// Intersection of all prefixpoints {A | F(A) ⊆ A}, by enumeration. Defined for
// any F; coincides with the least fixpoint when F is monotone.
inline Subset lfp_by_prefixpoints(const SetTransformer& f, std::size_t n) {
  if (n > 20) throw Error(ErrorCode::BudgetExceeded, "prefixpoint enumeration needs |M| <= 20");
  Subset acc = Subset::full(n);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    Subset a = Subset::from_mask(n, mask);
    if (f(a).subset_of(a)) acc &= a;
  }
  return acc;
}

class Evaluator {
 public:
  Evaluator(const Model& m, const Valuation& rho, EvalOptions opts = {})
      : m_(m), opts_(opts), ev_(rho.evars), sv_(rho.svars) {
    for (const auto& [x, a] : ev_) {
      if (a >= m.size()) throw Error(ErrorCode::Schema, "valuation of '" + x + "' out of carrier");
    }
    for (const auto& [X, s] : sv_) {
      if (s.universe() != m.size()) {
        throw Error(ErrorCode::Schema, "valuation of '" + X + "' over a different carrier");
      }
    }
  }

  Subset eval(const Pattern& p) {
    const std::size_t n = m_.size();
    switch (p.kind()) {
      case Kind::FreeEVar: {
        auto it = ev_.find(p.name());
        return Subset::singleton(n, it == ev_.end() ? 0 : it->second);
      }
      case Kind::FreeSVar: {
        auto it = sv_.find(p.name());
        return it == sv_.end() ? Subset(n) : it->second;
      }
      case Kind::BoundEVar:
      case Kind::BoundSVar:
        throw Error(ErrorCode::DanglingIndex,
                    std::string("dangling de Bruijn index ") +
                        (p.kind() == Kind::BoundEVar ? "b" : "S") + std::to_string(p.index()));
      case Kind::Symbol: return m_.symbol(p.name());
      case Kind::Bot: return Subset(n);
      case Kind::Imp: {
        Subset l = eval(p.left());
        Subset r = eval(p.right());
        return (l - r).complement();
      }
      case Kind::App: {
        Subset l = eval(p.left());
        if (l.empty()) return l;
        return m_.apply(l, eval(p.right()));
      }
      case Kind::Exists: return eval_exists(p);
      case Kind::Mu: return eval_mu(p);
      case Kind::Notation: return eval(p.expansion());
    }
    return Subset(n);
  }

 private:
  const Model& m_;
  EvalOptions opts_;
  std::map<std::string, std::size_t> ev_;
  std::map<std::string, Subset> sv_;

  template <typename Map, typename V, typename F>
  static auto with_binding(Map& map, const std::string& key, V value, F&& body) {
    auto it = map.find(key);
    std::optional<typename Map::mapped_type> saved;
    if (it != map.end()) saved = it->second;
    map[key] = std::move(value);
    struct Restore {
      Map& map;
      const std::string& key;
      std::optional<typename Map::mapped_type>& saved;
      ~Restore() {
        if (saved) {
          map[key] = std::move(*saved);
        } else {
          map.erase(key);
        }
      }
    } restore{map, key, saved};
    return body();
  }

  Subset eval_exists(const Pattern& p) {
    const std::string x = fresh_evar(p.body());
    const Pattern opened = evar_open(0, x, p.body());
    Subset acc(m_.size());
    for (std::size_t a = 0; a < m_.size(); ++a) {
      acc |= with_binding(ev_, x, a, [&] { return eval(opened); });
      if (acc.is_full()) break;
    }
    return acc;
  }

  Subset eval_mu(const Pattern& p) {
    const std::string X = fresh_svar(p.body());
    const Pattern opened = svar_open(0, X, p.body());
    SetTransformer f = [&](const Subset& a) {
      return with_binding(sv_, X, a, [&] { return eval(opened); });
    };
    if (!no_negative_occurrence(p.body(), 0)) {
      if (!opts_.enumerate_prefixpoints) {
        throw Error(ErrorCode::NonPositiveMu, "μ-bound variable occurs negatively");
      }
      if (m_.size() > kMaxPrefixpointCarrier) {
        throw Error(ErrorCode::BudgetExceeded, "prefixpoint enumeration limited to |M| <= " +
                                                   std::to_string(kMaxPrefixpointCarrier));
      }
      return lfp_by_prefixpoints(f, m_.size());
    }
    return lfp(f, m_.size(), opts_);
  }
};

// ⟦p⟧ in model m under valuation rho.
inline Subset eval(const Model& m, const Valuation& rho, const Pattern& p,
                   const EvalOptions& opts = {}) {
  return Evaluator(m, rho, opts).eval(p);
}

inline bool is_functional(const Model& m, const Valuation& rho, const Pattern& p,
                          const EvalOptions& opts = {}) {
  return eval(m, rho, p, opts).count() == 1;
}

inline bool is_predicate(const Model& m, const Valuation& rho, const Pattern& p,
                         const EvalOptions& opts = {}) {
  Subset s = eval(m, rho, p, opts);
  return s.empty() || s.is_full();
}

// ---------------------------------------------------------------------------
// Validity and entailment over finite model suites

struct Counterexample {
  std::string model;
  Valuation valuation;
  Subset denotation;
  std::string pattern;  // filled by callers that know how to print
};

namespace detail {

inline double valuation_count(std::size_t n, std::size_t nev, std::size_t nsv) {
  return std::pow(static_cast<double>(n), static_cast<double>(nev)) *
         std::pow(2.0, static_cast<double>(n * nsv));
}

// Calls f on every valuation of the given free variables; stops when f
// returns false.
template <typename F>
void for_each_valuation(const Model& m, const std::vector<std::string>& evs,
                        const std::vector<std::string>& svs, const EvalOptions& opts, F&& f) {
  const std::size_t n = m.size();
  double total = valuation_count(n, evs.size(), svs.size());
  if (total > opts.budget) {
    throw Error(ErrorCode::BudgetExceeded,
                "enumeration of " + std::to_string(static_cast<long double>(total)) +
                    " valuations exceeds budget " + std::to_string(opts.budget));
  }
  std::vector<std::size_t> ev(evs.size(), 0);
  std::vector<std::uint64_t> sv(svs.size(), 0);
  const std::uint64_t set_limit = std::uint64_t{1} << n;  // n < 64 guaranteed by budget
  for (;;) {
    check_cancel(opts);
    Valuation rho;
    for (std::size_t i = 0; i < evs.size(); ++i) rho.evars[evs[i]] = ev[i];
    for (std::size_t i = 0; i < svs.size(); ++i) rho.svars[svs[i]] = Subset::from_mask(n, sv[i]);
    if (!f(rho)) return;
    std::size_t i = 0;
    for (; i < ev.size(); ++i) {
      if (++ev[i] < n) break;
      ev[i] = 0;
    }
    if (i < ev.size()) continue;
    std::size_t j = 0;
    for (; j < sv.size(); ++j) {
      if (++sv[j] < set_limit) break;
      sv[j] = 0;
    }
    if (j == sv.size()) return;
  }
}

}  // namespace detail

// First valuation (in enumeration order) under which p is not the full
// carrier. Only the free variables of p are enumerated; the others cannot
// affect the result.
inline std::optional<Counterexample> find_counterexample(const Model& m, const Pattern& p,
                                                         const EvalOptions& opts = {}) {
  auto fe = free_evars(p);
  auto fs = free_svars(p);
  std::vector<std::string> evs(fe.begin(), fe.end());
  std::vector<std::string> svs(fs.begin(), fs.end());
  std::optional<Counterexample> found;
  detail::for_each_valuation(m, evs, svs, opts, [&](const Valuation& rho) {
    Subset d = eval(m, rho, p, opts);
    if (!d.is_full()) {
      found = Counterexample{m.name(), rho, d, {}};
      return false;
    }
    return true;
  });
  return found;
}

// M ⊨ p
inline bool holds(const Model& m, const Pattern& p, const EvalOptions& opts = {}) {
  return !find_counterexample(m, p, opts).has_value();
}

// M ⊨ Γ
inline bool holds(const Model& m, const std::vector<Pattern>& theory, const EvalOptions& opts = {}) {
  for (const auto& ax : theory) {
    if (!holds(m, ax, opts)) return false;
  }
  return true;
}

struct EntailmentResult {
  bool entailed = true;
  std::size_t models_satisfying_theory = 0;
  std::optional<Counterexample> counterexample;
};

// Γ ⊨ φ relative to an explicit model suite: every model of the suite that
// satisfies Γ must satisfy φ. The reported countermodel is the first in suite
// order, independent of evaluation order.
inline EntailmentResult entails_over(const std::vector<Model>& models,
                                     const std::vector<Pattern>& theory, const Pattern& goal,
                                     const EvalOptions& opts = {}) {
  for (const auto& ax : theory) {
    if (!well_formed(ax)) throw Error(ErrorCode::PreconditionFailed, "axiom is not well-formed");
  }
  if (!well_formed(goal)) throw Error(ErrorCode::PreconditionFailed, "goal is not well-formed");

  struct PerModel {
    bool satisfies = false;
    std::optional<Counterexample> counter;
  };
  auto run = [&](const Model& m) {
    PerModel r;
    r.satisfies = holds(m, theory, opts);
    if (r.satisfies) r.counter = find_counterexample(m, goal, opts);
    return r;
  };

  std::vector<PerModel> results(models.size());
  if (opts.parallel && models.size() > 1) {
    std::vector<std::future<PerModel>> futs;
    for (const auto& m : models) futs.push_back(std::async(std::launch::async, run, std::cref(m)));
    for (std::size_t i = 0; i < futs.size(); ++i) results[i] = futs[i].get();
  } else {
    for (std::size_t i = 0; i < models.size(); ++i) results[i] = run(models[i]);
  }

  EntailmentResult out;
  for (auto& r : results) {
    if (!r.satisfies) continue;
    ++out.models_satisfying_theory;
    if (r.counter && out.entailed) {
      out.entailed = false;
      out.counterexample = std::move(r.counter);
    }
  }
  return out;
}

}  // namespace mlw
