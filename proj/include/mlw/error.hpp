#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mlw {

// Stable error codes. Tactics and clients match on these, so values are part of
// the public contract and must not be renumbered.
enum class ErrorCode : int {
  // syntax / files
  Lexical = 100,
  UnknownSymbol = 101,
  UnknownNotation = 102,
  ArityMismatch = 103,
  MalformedIndex = 104,
  Syntax = 105,
  Schema = 106,
  NotClosed = 107,
  DuplicateName = 108,
  IllFormedAxiom = 109,
  UnknownImport = 110,
  // semantics
  DanglingIndex = 200,
  NonPositiveMu = 201,
  NonMonotone = 202,
  BudgetExceeded = 203,
  UninterpretedSymbol = 204,
  Cancelled = 205,
  PreconditionFailed = 206,
  // kernel
  RuleShapeMismatch = 300,
  SideConditionViolated = 301,
  IllFormedInstantiation = 302,
  UnknownAxiom = 303,
  MalformedProof = 304,
  // proof mode
  UnresolvedName = 400,
  ShapeMismatch = 401,
  NoOccurrence = 402,
  OpenGoals = 403,
  NotATautology = 404,
  AtomBudget = 405,
  UnsupportedContext = 406,
  Internal = 500,
};

inline std::string_view to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::Lexical: return "lexical-error";
    case ErrorCode::UnknownSymbol: return "unknown-symbol";
    case ErrorCode::UnknownNotation: return "unknown-notation";
    case ErrorCode::ArityMismatch: return "arity-mismatch";
    case ErrorCode::MalformedIndex: return "malformed-index";
    case ErrorCode::Syntax: return "syntax-error";
    case ErrorCode::Schema: return "schema-violation";
    case ErrorCode::NotClosed: return "not-closed";
    case ErrorCode::DuplicateName: return "duplicate-name";
    case ErrorCode::IllFormedAxiom: return "ill-formed-axiom";
    case ErrorCode::UnknownImport: return "unknown-import";
    case ErrorCode::DanglingIndex: return "dangling-index";
    case ErrorCode::NonPositiveMu: return "non-positive-mu";
    case ErrorCode::NonMonotone: return "non-monotone";
    case ErrorCode::BudgetExceeded: return "budget-exceeded";
    case ErrorCode::UninterpretedSymbol: return "uninterpreted-symbol";
    case ErrorCode::Cancelled: return "cancelled";
    case ErrorCode::PreconditionFailed: return "precondition-failed";
    case ErrorCode::RuleShapeMismatch: return "rule-shape-mismatch";
    case ErrorCode::SideConditionViolated: return "side-condition-violated";
    case ErrorCode::IllFormedInstantiation: return "ill-formed-instantiation";
    case ErrorCode::UnknownAxiom: return "unknown-axiom";
    case ErrorCode::MalformedProof: return "malformed-proof";
    case ErrorCode::UnresolvedName: return "unresolved-name";
    case ErrorCode::ShapeMismatch: return "shape-mismatch";
    case ErrorCode::NoOccurrence: return "no-occurrence";
    case ErrorCode::OpenGoals: return "open-goals";
    case ErrorCode::NotATautology: return "not-a-tautology";
    case ErrorCode::AtomBudget: return "atom-budget";
    case ErrorCode::UnsupportedContext: return "unsupported-context";
    case ErrorCode::Internal: return "internal-error";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct SourceLocation {
  std::size_t line = 1;
  std::size_t column = 1;
};

class ParseError : public Error {
 public:
  ParseError(ErrorCode code, SourceLocation loc, const std::string& message)
      : Error(code, std::to_string(loc.line) + ":" + std::to_string(loc.column) +
                        ": " + message),
        loc_(loc) {}

  SourceLocation location() const noexcept { return loc_; }

 private:
  SourceLocation loc_;
};

// Raised by the proof checker; `node` is the index of the offending node in
// the flattened proof (post-order), or the index given in a proof file.
class CheckError : public Error {
 public:
  CheckError(ErrorCode code, std::size_t node, const std::string& message)
      : Error(code, "node " + std::to_string(node) + ": " + message), node_(node) {}

  std::size_t node() const noexcept { return node_; }

 private:
  std::size_t node_;
};

}  // namespace mlw
