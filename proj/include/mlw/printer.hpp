#pragma once

#include <string>

#include "mlw/pattern.hpp"

namespace mlw {

namespace detail {

// Binding levels, loosest first; mirrors the parser.
enum Level : int { LIff = 0, LImp, LOr, LAnd, LUnary, LRel, LApp, LPrimary };

class Printer {
 public:
  Printer(bool fold, bool math) : fold_(fold), math_(math) {}

  std::string run(const Pattern& p) {
    emit(fold_ ? p : expand(p), LIff, true);
    return std::move(out_);
  }

 private:
  bool fold_;
  bool math_;
  std::string out_;

  // `tail`: nothing follows inside the current bracket, so a binder may
  // extend to the right without parentheses.
  void emit(const Pattern& p, int level, bool tail) {
    int own = level_of(p);
    bool binderish = is_binder(p);
    bool paren = own < level || (binderish && !tail);
    if (paren) out_ += '(';
    emit_bare(p, paren ? true : tail);
    if (paren) out_ += ')';
  }

  bool is_binder(const Pattern& p) const {
    if (p.kind() == Kind::Exists || p.kind() == Kind::Mu) return true;
    if (p.kind() == Kind::Notation && fold_) {
      const auto& n = p.notation().name;
      return n == "forall" || n == "nu";
    }
    return false;
  }

  static const char* infix(const std::string& n) {
    if (n == "or") return " or ";
    if (n == "and") return " and ";
    if (n == "iff") return " <---> ";
    if (n == "eq") return " = ";
    if (n == "neq") return " != ";
    if (n == "in") return " in ";
    if (n == "notin") return " notin ";
    if (n == "subseteq") return " subseteq ";
    if (n == "nsubseteq") return " nsubseteq ";
    return nullptr;
  }

  int level_of(const Pattern& p) const {
    switch (p.kind()) {
      case Kind::Imp: return LImp;
      case Kind::App: return LApp;
      case Kind::Exists:
      case Kind::Mu: return LUnary;
      case Kind::Notation: {
        if (!fold_) return level_of(p.expansion());
        const auto& n = p.notation().name;
        if (n == "iff") return LIff;
        if (n == "or") return LOr;
        if (n == "and") return LAnd;
        if (n == "not" || n == "forall" || n == "nu") return LUnary;
        if (infix(n)) return LRel;
        return LPrimary;
      }
      default: return LPrimary;
    }
  }

  void emit_bare(const Pattern& p, bool tail) {
    switch (p.kind()) {
      case Kind::FreeEVar:
      case Kind::FreeSVar:
      case Kind::Symbol: out_ += p.name(); return;
      case Kind::BoundEVar: out_ += "b" + std::to_string(p.index()); return;
      case Kind::BoundSVar: out_ += "S" + std::to_string(p.index()); return;
      case Kind::Bot: out_ += math_ ? "⊥" : "Bot"; return;
      case Kind::App:
        emit(p.left(), LApp, false);
        out_ += " $ ";
        emit(p.right(), LPrimary, tail);
        return;
      case Kind::Imp:
        emit(p.left(), LOr, false);
        out_ += " ---> ";
        emit(p.right(), LImp, tail);
        return;
      case Kind::Exists:
        out_ += math_ ? "∃ . " : "exists . ";
        emit(p.body(), LIff, tail);
        return;
      case Kind::Mu:
        out_ += math_ ? "μ . " : "mu . ";
        emit(p.body(), LIff, tail);
        return;
      case Kind::Notation:
        if (!fold_) {
          emit_bare(p.expansion(), tail);
          return;
        }
        emit_notation(p, tail);
        return;
    }
  }

  void emit_notation(const Pattern& p, bool tail) {
    const auto& n = p.notation().name;
    auto a = p.args();
    if (n == "not") {
      out_ += "! ";
      emit(a[0], LUnary, tail);
    } else if (n == "forall" || n == "nu") {
      out_ += math_ ? (n == "forall" ? "∀ . " : "ν . ") : n + " . ";
      emit(a[0], LIff, tail);
    } else if (n == "top" && a.empty()) {
      out_ += "Top";
    } else if (n == "ceil" && a.size() == 1) {
      out_ += "⌈ ";
      emit(a[0], LIff, true);
      out_ += " ⌉";
    } else if (n == "floor" && a.size() == 1) {
      out_ += "⌊ ";
      emit(a[0], LIff, true);
      out_ += " ⌋";
    } else if (n == "pair" && a.size() == 2) {
      out_ += "<";
      emit(a[0], LIff, true);
      out_ += ", ";
      emit(a[1], LIff, true);
      out_ += ">";
    } else if (const char* op = infix(n); op && a.size() == 2) {
      int own = level_of(p);
      if (own == LRel) {
        emit(a[0], LApp, false);
        out_ += op;
        emit(a[1], LApp, tail);
      } else if (own == LIff) {
        emit(a[0], LImp, false);
        out_ += op;
        emit(a[1], LIff, tail);
      } else {
        // left-associative or / and
        emit(a[0], own, false);
        out_ += op;
        emit(a[1], own + 1, tail);
      }
    } else {
      out_ += n + "(";
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (i) out_ += ", ";
        emit(a[i], LIff, true);
      }
      out_ += ")";
    }
  }
};

}  // namespace detail

// Renders a pattern in the concrete syntax accepted by parse_pattern. With
// `fold` notation nodes keep their surface form; otherwise the core expansion
// is printed. `math` renders ⊥ ∃ μ ∀ ν instead of Bot exists mu forall nu
// (both forms parse).
inline std::string print_pattern(const Pattern& p, bool fold = true, bool math = false) {
  return detail::Printer(fold, math).run(p);
}

}  // namespace mlw
