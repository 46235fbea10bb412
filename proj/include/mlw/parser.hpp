#pragma once

#include <cctype>
#include <charconv>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mlw/notation.hpp"
#include "mlw/pattern.hpp"
#include "mlw/signature.hpp"

namespace mlw {

// Concrete syntax, loosest to tightest binding:
//
//   pattern  ::= imp ( "<--->" pattern )?
//   imp      ::= or ( "--->" imp )?
//   or       ::= and ( "or" and )*
//   and      ::= unary ( "and" unary )*
//   unary    ::= "!" unary | binder | rel
//   binder   ::= ( "exists" | "mu" | "forall" | "nu" ) name? "." pattern
//   rel      ::= app ( relop app )?      relop: = != in notin subseteq nsubseteq
//   app      ::= primary ( "$"? primary )*
//   primary  ::= ident | b<k> | S<k> | "Bot" | "Top" | "(" pattern ")"
//              | "⌈" pattern "⌉" | "⌊" pattern "⌋" | "<" pattern "," pattern ">"
//              | notation-name "(" pattern ("," pattern)* ")"
//
// Identifiers are symbols when declared in the signature, otherwise element
// variables (lowercase initial) or set variables (uppercase initial). Unicode
// aliases ∃ μ ∀ ν ⊥ ⊤ → ↔ ¬ ∨ ∧ ∈ ∉ ⊆ ⊈ ≠ are accepted.

enum class Tok {
  End,
  Ident,
  BoundE,
  BoundS,
  LParen,
  RParen,
  Dot,
  Comma,
  Dollar,
  Not,
  Imp,
  Iff,
  Or,
  And,
  Exists,
  Mu,
  Forall,
  Nu,
  Bot,
  Top,
  Eq,
  Neq,
  In,
  NotIn,
  Subseteq,
  NSubseteq,
  LCeil,
  RCeil,
  LFloor,
  RFloor,
  LAngle,
  RAngle,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  Index index = 0;
  SourceLocation loc;
  bool space_before = false;
};

namespace detail {

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      bool space = skip_space();
      Token t;
      t.loc = loc_;
      t.space_before = space;
      if (pos_ >= src_.size()) {
        out.push_back(t);
        return out;
      }
      lex_one(t);
      out.push_back(std::move(t));
    }
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;
  SourceLocation loc_;

  bool skip_space() {
    bool any = false;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\n') {
        ++pos_;
        ++loc_.line;
        loc_.column = 1;
      } else if (c == ' ' || c == '\t' || c == '\r') {
        advance(1);
      } else {
        break;
      }
      any = true;
    }
    return any;
  }

  void advance(std::size_t bytes) {
    for (std::size_t i = 0; i < bytes; ++i) {
      // count code points, not continuation bytes
      if ((static_cast<unsigned char>(src_[pos_ + i]) & 0xC0) != 0x80) ++loc_.column;
    }
    pos_ += bytes;
  }

  bool starts(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

  void lex_one(Token& t) {
    struct Fixed {
      std::string_view text;
      Tok kind;
    };
    static constexpr Fixed fixed[] = {
        {"<--->", Tok::Iff}, {"--->", Tok::Imp}, {"!=", Tok::Neq},    {"(", Tok::LParen},
        {")", Tok::RParen},  {".", Tok::Dot},    {",", Tok::Comma},   {"$", Tok::Dollar},
        {"!", Tok::Not},     {"=", Tok::Eq},     {"<", Tok::LAngle},  {">", Tok::RAngle},
        {"∃", Tok::Exists},  {"μ", Tok::Mu},     {"∀", Tok::Forall},  {"ν", Tok::Nu},
        {"⊥", Tok::Bot},     {"⊤", Tok::Top},    {"→", Tok::Imp},     {"↔", Tok::Iff},
        {"¬", Tok::Not},     {"∨", Tok::Or},     {"∧", Tok::And},     {"∈", Tok::In},
        {"∉", Tok::NotIn},   {"⊆", Tok::Subseteq}, {"⊈", Tok::NSubseteq}, {"⊄", Tok::NSubseteq},
        {"≠", Tok::Neq},     {"⌈", Tok::LCeil},  {"⌉", Tok::RCeil},   {"⌊", Tok::LFloor},
        {"⌋", Tok::RFloor},  {"⟨", Tok::LAngle}, {"⟩", Tok::RAngle},
    };
    for (const auto& f : fixed) {
      if (starts(f.text)) {
        t.kind = f.kind;
        t.text = std::string(f.text);
        advance(f.text.size());
        return;
      }
    }
    unsigned char c = static_cast<unsigned char>(src_[pos_]);
    if (std::isalpha(c) || c == '_') {
      std::size_t end = pos_ + 1;
      while (end < src_.size()) {
        unsigned char d = static_cast<unsigned char>(src_[end]);
        if (std::isalnum(d) || d == '_' || d == '\'') {
          ++end;
        } else {
          break;
        }
      }
      t.text = std::string(src_.substr(pos_, end - pos_));
      classify(t);
      advance(end - pos_);
      return;
    }
    throw ParseError(ErrorCode::Lexical, loc_,
                     "unexpected character '" + std::string(1, src_[pos_]) + "'");
  }

  void classify(Token& t) const {
    static const std::pair<std::string_view, Tok> keywords[] = {
        {"exists", Tok::Exists}, {"mu", Tok::Mu},           {"forall", Tok::Forall},
        {"nu", Tok::Nu},         {"Bot", Tok::Bot},         {"Top", Tok::Top},
        {"or", Tok::Or},         {"and", Tok::And},         {"in", Tok::In},
        {"notin", Tok::NotIn},   {"subseteq", Tok::Subseteq}, {"nsubseteq", Tok::NSubseteq},
    };
    for (const auto& [kw, kind] : keywords) {
      if (t.text == kw) {
        t.kind = kind;
        return;
      }
    }
    if ((t.text[0] == 'b' || t.text[0] == 'S') && t.text.size() > 1) {
      bool digits = true;
      for (std::size_t i = 1; i < t.text.size(); ++i) {
        digits = digits && std::isdigit(static_cast<unsigned char>(t.text[i]));
      }
      if (digits) {
        Index v = 0;
        auto [ptr, ec] = std::from_chars(t.text.data() + 1, t.text.data() + t.text.size(), v);
        if (ec != std::errc()) {
          throw ParseError(ErrorCode::MalformedIndex, loc_,
                           "de Bruijn index out of range: " + t.text);
        }
        t.kind = t.text[0] == 'b' ? Tok::BoundE : Tok::BoundS;
        t.index = v;
        return;
      }
    }
    t.kind = Tok::Ident;
  }
};

}  // namespace detail

inline bool is_keyword(std::string_view s) {
  for (std::string_view kw : {"exists", "mu", "forall", "nu", "Bot", "Top", "or", "and", "in",
                              "notin", "subseteq", "nsubseteq"}) {
    if (s == kw) return true;
  }
  return false;
}

struct ParseOptions {
  // Names parsed as template placeholders (for notation declarations).
  std::vector<std::string> params;
};

class PatternParser {
 public:
  PatternParser(std::string_view text, const Signature& sig, const NotationEnv& env,
                ParseOptions opts = {})
      : toks_(detail::Lexer(text).run()), sig_(sig), env_(env), opts_(std::move(opts)) {}

  Pattern parse_all() {
    Pattern p = pattern();
    if (peek().kind != Tok::End) fail(ErrorCode::Syntax, "unexpected '" + peek().text + "'");
    return p;
  }

 private:
  struct Frame {
    bool ex;  // ∃ frame (else μ)
    std::string name;
  };

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const Signature& sig_;
  const NotationEnv& env_;
  ParseOptions opts_;
  std::vector<Frame> frames_;

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    next();
    return true;
  }
  [[noreturn]] void fail(ErrorCode code, const std::string& msg) const {
    throw ParseError(code, peek().loc, msg);
  }
  void expect(Tok k, const char* what) {
    if (!accept(k)) {
      fail(ErrorCode::Syntax,
           std::string("expected ") + what + ", found " +
               (peek().kind == Tok::End ? std::string("end of input") : "'" + peek().text + "'"));
    }
  }

  Pattern use(const char* name, std::vector<Pattern> args) {
    auto def = env_.find(name);
    if (!def) fail(ErrorCode::UnknownNotation, std::string("unknown notation '") + name + "'");
    return notation(def, std::move(args));
  }

  Pattern pattern() {
    Pattern lhs = implication();
    if (accept(Tok::Iff)) return use("iff", {lhs, pattern()});
    return lhs;
  }

  Pattern implication() {
    Pattern lhs = disjunction();
    if (accept(Tok::Imp)) return imp(lhs, implication());
    return lhs;
  }

  Pattern disjunction() {
    Pattern lhs = conjunction();
    while (accept(Tok::Or)) lhs = use("or", {lhs, conjunction()});
    return lhs;
  }

  Pattern conjunction() {
    Pattern lhs = unary();
    while (accept(Tok::And)) lhs = use("and", {lhs, unary()});
    return lhs;
  }

  Pattern unary() {
    switch (peek().kind) {
      case Tok::Not: next(); return use("not", {unary()});
      case Tok::Exists:
      case Tok::Mu:
      case Tok::Forall:
      case Tok::Nu: return binder();
      default: return relation();
    }
  }

  Pattern binder() {
    Tok kind = next().kind;
    bool ex = kind == Tok::Exists || kind == Tok::Forall;
    std::string name;
    if (peek().kind == Tok::Ident) {
      name = next().text;
      bool upper = std::isupper(static_cast<unsigned char>(name[0]));
      if (ex == upper) {
        fail(ErrorCode::Syntax, ex ? "element binder needs a lowercase name"
                                   : "set binder needs an uppercase name");
      }
    }
    expect(Tok::Dot, "'.'");
    frames_.push_back({ex, name});
    Pattern body = pattern();
    frames_.pop_back();
    switch (kind) {
      case Tok::Exists: return exists(body);
      case Tok::Mu: return mu(body);
      case Tok::Forall: return use("forall", {body});
      default: return use("nu", {body});
    }
  }

  Pattern relation() {
    Pattern lhs = application();
    const char* op = nullptr;
    switch (peek().kind) {
      case Tok::Eq: op = "eq"; break;
      case Tok::Neq: op = "neq"; break;
      case Tok::In: op = "in"; break;
      case Tok::NotIn: op = "notin"; break;
      case Tok::Subseteq: op = "subseteq"; break;
      case Tok::NSubseteq: op = "nsubseteq"; break;
      default: return lhs;
    }
    next();
    return use(op, {lhs, application()});
  }

  bool starts_primary() const {
    switch (peek().kind) {
      case Tok::Ident:
      case Tok::BoundE:
      case Tok::BoundS:
      case Tok::Bot:
      case Tok::Top:
      case Tok::LParen:
      case Tok::LCeil:
      case Tok::LFloor:
      case Tok::LAngle: return true;
      default: return false;
    }
  }

  Pattern application() {
    Pattern lhs = primary();
    for (;;) {
      if (accept(Tok::Dollar)) {
        lhs = app(lhs, primary());
      } else if (starts_primary()) {
        lhs = app(lhs, primary());
      } else {
        return lhs;
      }
    }
  }

  Pattern primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::BoundE: next(); return bevar(t.index);
      case Tok::BoundS: next(); return bsvar(t.index);
      case Tok::Bot: next(); return bot();
      case Tok::Top: next(); return use("top", {});
      case Tok::LParen: {
        next();
        Pattern p = pattern();
        expect(Tok::RParen, "')'");
        return p;
      }
      case Tok::LCeil: {
        next();
        Pattern p = pattern();
        expect(Tok::RCeil, "'⌉'");
        return use("ceil", {p});
      }
      case Tok::LFloor: {
        next();
        Pattern p = pattern();
        expect(Tok::RFloor, "'⌋'");
        return use("floor", {p});
      }
      case Tok::LAngle: {
        next();
        Pattern a = pattern();
        expect(Tok::Comma, "','");
        Pattern b = pattern();
        expect(Tok::RAngle, "'>'");
        return use("pair", {a, b});
      }
      case Tok::Ident: return identifier();
      default:
        fail(ErrorCode::Syntax, t.kind == Tok::End ? "unexpected end of input"
                                                   : "unexpected '" + t.text + "'");
    }
  }

  Pattern identifier() {
    Token t = next();
    const std::string& name = t.text;
    for (std::size_t i = 0; i < opts_.params.size(); ++i) {
      if (opts_.params[i] == name) return placeholder(i);
    }
    if (peek().kind == Tok::LParen && !peek().space_before && !sig_.contains(name)) {
      auto def = env_.find(name);
      if (!def) {
        throw ParseError(ErrorCode::UnknownNotation, t.loc, "unknown notation '" + name + "'");
      }
      return call(def, t);
    }
    if (sig_.contains(name)) return sym(name);
    bool upper = std::isupper(static_cast<unsigned char>(name[0]));
    // named binders: count binders of the same kind between use and binder
    Index crossed = 0;
    for (auto it = frames_.rbegin(); it != frames_.rend(); ++it) {
      if (it->ex == !upper) {
        if (it->name == name) return upper ? bsvar(crossed) : bevar(crossed);
        ++crossed;
      }
    }
    return upper ? svar(name) : evar(name);
  }

  Pattern call(const NotationPtr& def, const Token& at) {
    expect(Tok::LParen, "'('");
    std::vector<Pattern> args;
    if (peek().kind != Tok::RParen) {
      do {
        BinderDepth d = args.size() < def->depths.size() ? def->depths[args.size()] : BinderDepth{};
        for (Index i = 0; i < d.ex; ++i) frames_.push_back({true, {}});
        for (Index i = 0; i < d.mu; ++i) frames_.push_back({false, {}});
        args.push_back(pattern());
        frames_.resize(frames_.size() - d.ex - d.mu);
      } while (accept(Tok::Comma));
    }
    expect(Tok::RParen, "')'");
    if (args.size() != def->arity) {
      throw ParseError(ErrorCode::ArityMismatch, at.loc,
                       "notation '" + def->name + "' expects " + std::to_string(def->arity) +
                           " argument(s), got " + std::to_string(args.size()));
    }
    return notation(def, std::move(args));
  }
};

inline Pattern parse_pattern(std::string_view text, const Signature& sig, const NotationEnv& env,
                             ParseOptions opts = {}) {
  return PatternParser(text, sig, env, std::move(opts)).parse_all();
}

// Parses with the built-in notations and no symbols.
inline Pattern parse_pattern(std::string_view text) {
  static const Signature empty;
  static const NotationEnv env = builtin_notations();
  return parse_pattern(text, empty, env);
}

}  // namespace mlw
