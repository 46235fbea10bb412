#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mlw/proof_mode.hpp"

namespace mlw {

// `.mlp` proof scripts:
//
//   theory DEF
//   lemma NAME : pattern
//   proof
//     mlIntro "H0". mlIntro "H1".
//     * mlExact "H0".
//   qed
//
// Tactics end with '.', bullets (* - +) focus the next goal as in Coq and
// need no '.', `--` starts a comment. The header and the `proof`/`qed` lines may be omitted when the
// caller supplies theory and goal; the file is then a plain tactic list.
struct ScriptStep {
  std::string tactic;  // as written, without the final '.'
  std::size_t line = 0;
};

struct Script {
  std::optional<std::string> theory;
  std::optional<std::string> lemma;
  std::optional<std::string> goal;  // raw pattern text
  std::size_t goal_line = 0;
  std::vector<ScriptStep> steps;
};

namespace detail {

// Splits `text` on '.' that ends a tactic: outside brackets and quotes and
// followed by whitespace or the end of the text.
inline std::vector<std::string> split_tactics(const std::string& text, bool& open_tail) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  bool quoted = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '"') quoted = !quoted;
    if (!quoted && c == '[') ++depth;
    if (!quoted && c == ']') --depth;
    bool end = c == '.' && !quoted && depth == 0 &&
               (i + 1 == text.size() || text[i + 1] == ' ' || text[i + 1] == '\t');
    if (end) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  open_tail = cur.find_first_not_of(" \t") != std::string::npos;
  if (open_tail) out.push_back(cur);
  return out;
}

// Leading bullets become steps of their own.
inline std::vector<std::string> split_bullets(std::string s) {
  std::vector<std::string> out;
  for (;;) {
    auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return out;
    s = s.substr(b);
    if ((s[0] == '*' || s[0] == '-' || s[0] == '+') && (s.size() == 1 || s[1] == ' ' || s[1] == '\t')) {
      out.emplace_back(1, s[0]);
      s = s.substr(1);
      continue;
    }
    out.push_back(s.substr(0, s.find_last_not_of(" \t") + 1));
    return out;
  }
}

}  // namespace detail

inline Script parse_script(std::string_view text) {
  using detail::file_fail;
  Script sc;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t lineno = 0;
  enum { Header, Body, Done } mode = Header;
  std::string pending;  // tactic continued across lines
  std::size_t pending_line = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = detail::strip_comment(raw);
    if (line.empty()) continue;
    if (mode == Header) {
      std::istringstream words(line);
      std::string kw;
      words >> kw;
      if (kw == "theory") {
        std::string name, extra;
        words >> name;
        if (sc.theory || name.empty() || (words >> extra)) file_fail(ErrorCode::Syntax, lineno, "expected 'theory NAME'");
        sc.theory = name;
        continue;
      } else if (kw == "lemma") {
        auto colon = line.find(':');
        if (sc.lemma || colon == std::string::npos) file_fail(ErrorCode::Syntax, lineno, "expected 'lemma NAME : pattern'");
        sc.lemma = detail::strip_comment(line.substr(5, colon - 5));
        if (!detail::valid_identifier(*sc.lemma)) file_fail(ErrorCode::Syntax, lineno, "invalid lemma name");
        sc.goal = detail::strip_comment(line.substr(colon + 1));
        sc.goal_line = lineno;
        continue;
      } else if (line == "proof") {
        mode = Body;
        continue;
      } else if (sc.theory || sc.lemma) {
        file_fail(ErrorCode::Syntax, lineno, "expected 'proof' after the header");
      }
      mode = Body;
    }
    if (mode == Done) file_fail(ErrorCode::Syntax, lineno, "text after 'qed'");
    if (line == "qed" || line == "qed.") {
      if (!pending.empty()) file_fail(ErrorCode::Syntax, pending_line, "tactic is missing its final '.'");
      mode = Done;
      continue;
    }
    if (pending.empty()) pending_line = lineno;
    std::string joined = pending.empty() ? line : pending + " " + line;
    bool open_tail = false;
    auto parts = detail::split_tactics(joined, open_tail);
    pending.clear();
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (open_tail && i + 1 == parts.size()) {
        pending = parts[i];
        break;
      }
      for (auto& t : detail::split_bullets(parts[i])) sc.steps.push_back({t, pending_line});
      pending_line = lineno;
    }
    if (!pending.empty()) {
      auto b = detail::split_bullets(pending);
      pending = b.empty() ? std::string() : b.back();
      if (!b.empty()) b.pop_back();
      for (auto& t : b) sc.steps.push_back({t, pending_line});
    }
  }
  if (!pending.empty()) file_fail(ErrorCode::Syntax, pending_line, "tactic is missing its final '.'");
  return sc;
}

struct ScriptRun {
  Theorem theorem;
  // Rendered state after each step.
  std::vector<std::pair<std::string, std::string>> transcript;
};

// Replays `script` in a fresh session. Errors name the failing step.
inline ScriptRun run_script(TheoryPtr theory, const Pattern& goal, const Script& script) {
  Session s(std::move(theory), goal);
  std::vector<std::pair<std::string, std::string>> transcript;
  for (std::size_t i = 0; i < script.steps.size(); ++i) {
    const auto& st = script.steps[i];
    try {
      s.apply(st.tactic);
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(st.line) + ", step " + std::to_string(i + 1) + " (" + st.tactic +
                                "): " + e.what());
    }
    transcript.emplace_back(st.tactic, s.render());
  }
  return ScriptRun{s.qed(), std::move(transcript)};
}

// Uses the script's own `theory` and `lemma` lines.
inline ScriptRun run_script(const TheoryLibrary& lib, const Script& script) {
  if (!script.goal) throw Error(ErrorCode::Syntax, "script has no 'lemma' line");
  TheoryPtr th = script.theory ? lib.load(*script.theory) : empty_theory();
  Pattern goal = detail::at_line(script.goal_line, 1, [&] { return th->parse(*script.goal); });
  return run_script(th, goal, script);
}

}  // namespace mlw
