#pragma once

#include <random>
#include <string>
#include <vector>

#include "mlw/model.hpp"
#include "mlw/pattern.hpp"
#include "mlw/syntax.hpp"

namespace mlw::testing {

using Rng = std::mt19937_64;

inline std::size_t pick(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }
inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

// Random well-formed patterns. Bound set variables are only placed where
// they occur positively, so every μ is well-formed by construction.
struct PatternGen {
  std::vector<std::string> symbols;
  std::vector<std::string> evars = {"x", "y"};
  std::vector<std::string> svars = {"X"};
  bool use_exists = true;
  bool use_mu = true;
  bool use_svars = true;

  Pattern operator()(Rng& rng, int depth) const {
    std::vector<bool> mu_pol;
    return gen(rng, depth, 0, mu_pol, true);
  }

  // A pattern whose outermost constructor is μ.
  Pattern mu_pattern(Rng& rng, int depth) const {
    std::vector<bool> mu_pol{true};
    return mu(gen(rng, depth, 0, mu_pol, true));
  }

 private:
  Pattern leaf(Rng& rng, Index ex, const std::vector<bool>& mu_pol, bool pol) const {
    std::vector<Pattern> opts;
    opts.push_back(bot());
    for (const auto& s : symbols) opts.push_back(sym(s));
    for (const auto& x : evars) opts.push_back(evar(x));
    if (use_svars) {
      for (const auto& X : svars) opts.push_back(svar(X));
    }
    for (Index k = 0; k < ex; ++k) {
      opts.push_back(bevar(k));
      opts.push_back(bevar(k));
    }
    for (std::size_t k = 0; k < mu_pol.size(); ++k) {
      if (mu_pol[mu_pol.size() - 1 - k] == pol) {
        opts.push_back(bsvar(static_cast<Index>(k)));
        opts.push_back(bsvar(static_cast<Index>(k)));
      }
    }
    return opts[pick(rng, opts.size())];
  }

  Pattern gen(Rng& rng, int depth, Index ex, std::vector<bool>& mu_pol, bool pol) const {
    if (depth <= 0 || coin(rng, 0.2)) return leaf(rng, ex, mu_pol, pol);
    std::size_t kinds = 2 + (use_exists ? 1 : 0) + (use_mu ? 1 : 0);
    std::size_t k = pick(rng, kinds);
    if (k == 0) return app(gen(rng, depth - 1, ex, mu_pol, pol), gen(rng, depth - 1, ex, mu_pol, pol));
    if (k == 1) return imp(gen(rng, depth - 1, ex, mu_pol, !pol), gen(rng, depth - 1, ex, mu_pol, pol));
    if (k == 2 && use_exists) return exists(gen(rng, depth - 1, ex + 1, mu_pol, pol));
    mu_pol.push_back(pol);
    Pattern body = gen(rng, depth - 1, ex, mu_pol, pol);
    mu_pol.pop_back();
    return mu(body);
  }
};

// Random model over `symbols`; every application entry and symbol gets a
// random subset with the given element density.
inline Model random_model(Rng& rng, std::size_t n, const std::vector<std::string>& symbols, double density = 0.35,
                          const std::string& name = "random") {
  Model m = Model::with_size(name, n);
  auto subset = [&] {
    Subset s(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (coin(rng, density)) s.insert(i);
    }
    return s;
  };
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) m.set_app(a, b, subset());
  }
  for (const auto& s : symbols) m.set_symbol(s, subset());
  return m;
}

// Adds a definedness element d (interpreting `def`) with app(d, m) = M for
// every m, so the model satisfies ⌈x⌉.
inline Model with_definedness(const Model& base, const std::string& def = "def") {
  std::vector<std::string> el = base.elements();
  el.push_back("d");
  Model m(base.name() + "+def", el);
  std::size_t n = base.size();
  auto lift = [&](const Subset& s) {
    Subset out(n + 1);
    for (std::size_t i : s.elements()) out.insert(i);
    return out;
  };
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) m.set_app(a, b, lift(base.app(a, b)));
  }
  for (std::size_t b = 0; b <= n; ++b) m.set_app(n, b, m.full_set());
  for (const auto& [s, v] : base.symbols()) m.set_symbol(s, lift(v));
  m.set_symbol(def, Subset::singleton(n + 1, n));
  return m;
}

inline Valuation random_valuation(Rng& rng, const Model& m, const std::vector<std::string>& evars,
                                  const std::vector<std::string>& svars) {
  Valuation v;
  for (const auto& x : evars) v.evars[x] = pick(rng, m.size());
  for (const auto& X : svars) {
    Subset s(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (coin(rng)) s.insert(i);
    }
    v.svars[X] = s;
  }
  return v;
}

inline bool contains_mu(const Pattern& p) {
  if (p.is(Kind::Mu)) return true;
  for (const auto& c : p.children()) {
    if (contains_mu(c)) return true;
  }
  return false;
}

}  // namespace mlw::testing
