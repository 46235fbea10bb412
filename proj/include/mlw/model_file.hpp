#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "mlw/model.hpp"
#include "mlw/theory.hpp"

namespace mlw {

namespace detail {

// Splits on whitespace, keeping `{...}` groups and `=` as single tokens.
inline std::vector<std::string> model_tokens(const std::string& line, std::size_t lineno) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (c == ' ' || c == '\t' || c == ',') {
      ++i;
    } else if (c == '{') {
      auto close = line.find('}', i);
      if (close == std::string::npos) file_fail(ErrorCode::Syntax, lineno, "unterminated '{'");
      out.push_back(line.substr(i, close - i + 1));
      i = close + 1;
    } else if (c == '=') {
      out.emplace_back("=");
      ++i;
    } else {
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != ',' && line[j] != '=' &&
             line[j] != '{') {
        ++j;
      }
      out.push_back(line.substr(i, j - i));
      i = j;
    }
  }
  return out;
}

inline Subset parse_set(const Model& m, const std::string& tok, std::size_t lineno) {
  if (tok == "full") return m.full_set();
  if (tok.size() < 2 || tok.front() != '{' || tok.back() != '}') {
    file_fail(ErrorCode::Syntax, lineno, "expected '{...}' or 'full', found '" + tok + "'");
  }
  Subset s = m.empty_set();
  std::string inner = tok.substr(1, tok.size() - 2);
  for (auto& c : inner) {
    if (c == ',') c = ' ';
  }
  std::istringstream ss(inner);
  std::string e;
  while (ss >> e) {
    auto i = m.find_element(e);
    if (!i) file_fail(ErrorCode::Schema, lineno, "unknown element '" + e + "'");
    s.insert(*i);
  }
  return s;
}

}  // namespace detail

// `.mlmodel` files:
//   model NAME
//   elements a b c
//   symbol s = {a, b}
//   app a b = {c}          -- entries not listed are {}
inline Model parse_model(std::string_view text) {
  using detail::file_fail;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t lineno = 0;
  std::string name;
  Model m;
  bool have_elements = false;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = detail::strip_comment(raw);
    if (line.empty()) continue;
    auto t = detail::model_tokens(line, lineno);
    const std::string& kw = t[0];
    if (kw == "model") {
      if (!name.empty() || t.size() != 2) file_fail(ErrorCode::Syntax, lineno, "expected a single 'model NAME'");
      name = t[1];
    } else if (kw == "elements") {
      if (have_elements) file_fail(ErrorCode::Syntax, lineno, "elements declared twice");
      std::vector<std::string> el(t.begin() + 1, t.end());
      try {
        m = Model(name, el);
      } catch (const Error& e) {
        file_fail(e.code(), lineno, e.what());
      }
      have_elements = true;
    } else if (kw == "symbol") {
      if (!have_elements) file_fail(ErrorCode::Syntax, lineno, "symbol before elements");
      if (t.size() != 4 || t[2] != "=") file_fail(ErrorCode::Syntax, lineno, "expected 'symbol NAME = SET'");
      if (m.has_symbol(t[1])) file_fail(ErrorCode::DuplicateName, lineno, "symbol '" + t[1] + "' interpreted twice");
      m.set_symbol(t[1], detail::parse_set(m, t[3], lineno));
    } else if (kw == "app") {
      if (!have_elements) file_fail(ErrorCode::Syntax, lineno, "app before elements");
      if (t.size() != 5 || t[3] != "=") file_fail(ErrorCode::Syntax, lineno, "expected 'app A B = SET'");
      auto a = m.find_element(t[1]);
      auto b = m.find_element(t[2]);
      if (!a || !b) file_fail(ErrorCode::Schema, lineno, "unknown element in app entry");
      m.set_app(*a, *b, detail::parse_set(m, t[4], lineno));
    } else {
      file_fail(ErrorCode::Syntax, lineno, "unknown declaration '" + kw + "'");
    }
  }
  if (name.empty()) throw Error(ErrorCode::Schema, "missing 'model NAME'");
  if (!have_elements) throw Error(ErrorCode::Schema, "missing 'elements'");
  m.set_name(name);
  return m;
}

inline std::string print_set(const Model& m, const Subset& s) { return m.render(s); }

inline std::string print_model(const Model& m) {
  std::string out = "model " + m.name() + "\nelements";
  for (const auto& e : m.elements()) out += " " + e;
  out += "\n";
  for (const auto& [s, v] : m.symbols()) out += "symbol " + s + " = " + m.render(v) + "\n";
  for (std::size_t a = 0; a < m.size(); ++a) {
    for (std::size_t b = 0; b < m.size(); ++b) {
      const Subset& v = m.app(a, b);
      if (v.empty()) continue;
      out += "app " + m.element_name(a) + " " + m.element_name(b) + " = " +
             (v.is_full() ? std::string("full") : m.render(v)) + "\n";
    }
  }
  return out;
}

inline Model load_model(const std::filesystem::path& p) { return parse_model(read_file(p)); }

// `x = a, X = {a, b}`
inline Valuation parse_valuation(std::string_view text, const Model& m) {
  Valuation v;
  std::string s(text);
  auto t = detail::model_tokens(s, 1);
  for (std::size_t i = 0; i < t.size();) {
    if (i + 2 >= t.size()) {
      throw Error(ErrorCode::Syntax, "valuation: expected 'name = value' pairs");
    }
    const std::string& n = t[i];
    if (t[i + 1] != "=") throw Error(ErrorCode::Syntax, "valuation: expected '=' after '" + n + "'");
    const std::string& val = t[i + 2];
    if (n.empty() || !detail::valid_identifier(n)) throw Error(ErrorCode::Syntax, "valuation: bad name '" + n + "'");
    if (std::isupper(static_cast<unsigned char>(n[0]))) {
      v.svars[n] = detail::parse_set(m, val, 1);
    } else {
      auto e = m.find_element(val);
      if (!e) throw Error(ErrorCode::Schema, "valuation: unknown element '" + val + "'");
      v.evars[n] = *e;
    }
    i += 3;
  }
  return v;
}

}  // namespace mlw
