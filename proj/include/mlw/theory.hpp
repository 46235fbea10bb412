#pragma once

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mlw/parser.hpp"
#include "mlw/proof.hpp"

#ifndef MLW_THEORY_DIR
#define MLW_THEORY_DIR "theories"
#endif

namespace mlw {

// A resolved specification: everything visible inside it, imports included.
struct Theory {
  std::string name;
  std::vector<std::string> imports;
  Signature signature;
  NotationEnv notations = builtin_notations();
  AxiomSet axioms;
  // Declarations made by this spec itself, in order.
  std::vector<std::string> own_symbols;
  std::vector<std::string> own_notations;
  std::vector<std::string> own_axioms;

  Pattern parse(std::string_view text) const { return parse_pattern(text, signature, notations); }
};

using TheoryPtr = std::shared_ptr<const Theory>;
using TheoryResolver = std::function<TheoryPtr(const std::string&)>;

namespace detail {

// A comment is `--` standing alone as a word, so `--->` is not one.
inline std::size_t comment_start(const std::string& line) {
  for (std::size_t pos = line.find("--"); pos != std::string::npos; pos = line.find("--", pos + 1)) {
    bool before = pos == 0 || line[pos - 1] == ' ' || line[pos - 1] == '\t';
    bool after = pos + 2 == line.size() || line[pos + 2] == ' ' || line[pos + 2] == '\t';
    if (before && after) return pos;
  }
  return std::string::npos;
}

inline std::string strip_comment(const std::string& line) {
  auto pos = comment_start(line);
  std::string s = pos == std::string::npos ? line : line.substr(0, pos);
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline bool valid_identifier(const std::string& s) {
  static const std::regex re(R"([A-Za-z_][A-Za-z0-9_']*)");
  return std::regex_match(s, re);
}

[[noreturn]] inline void file_fail(ErrorCode code, std::size_t line, const std::string& msg) {
  throw ParseError(code, SourceLocation{line, 1}, msg);
}

// Rebases a parse error from a pattern fragment onto its line in the file.
template <class F>
auto at_line(std::size_t line, std::size_t column, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ParseError& e) {
    std::string msg = e.what();
    auto colon = msg.find(": ");
    if (colon != std::string::npos) msg = msg.substr(colon + 2);
    throw ParseError(e.code(), SourceLocation{line, column + e.location().column - 1}, msg);
  }
}

}  // namespace detail

// Parses every `spec ... endspec` block of a `.mlth` file. Imports are looked
// up first among earlier blocks of the same file, then through `resolve`.
inline std::vector<TheoryPtr> parse_theories(std::string_view text, const TheoryResolver& resolve = {}) {
  using detail::file_fail;
  std::vector<TheoryPtr> out;
  std::map<std::string, TheoryPtr> local;
  std::shared_ptr<Theory> cur;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t lineno = 0;
  static const std::regex notation_re(R"(notation\s+([A-Za-z_][A-Za-z0-9_']*)\s*\(([^)]*)\)\s*:=\s*(.+))");
  static const std::regex axiom_re(R"(axiom\s+([A-Za-z_][A-Za-z0-9_']*)\s*:\s*(.+))");
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = detail::strip_comment(raw);
    if (line.empty()) continue;
    std::size_t indent = raw.find_first_not_of(" \t") + 1;
    std::istringstream words(line);
    std::string kw;
    words >> kw;
    if (kw == "spec") {
      if (cur) file_fail(ErrorCode::Syntax, lineno, "nested spec");
      std::string name, extra;
      words >> name;
      if (!detail::valid_identifier(name) || (words >> extra)) file_fail(ErrorCode::Syntax, lineno, "expected 'spec NAME'");
      cur = std::make_shared<Theory>();
      cur->name = name;
      cur->axioms = AxiomSet(name);
      continue;
    }
    if (!cur) file_fail(ErrorCode::Syntax, lineno, "declaration outside of a spec");
    if (kw == "endspec") {
      if (local.count(cur->name)) file_fail(ErrorCode::DuplicateName, lineno, "spec '" + cur->name + "' defined twice");
      local.emplace(cur->name, cur);
      out.push_back(cur);
      cur.reset();
      continue;
    }
    if (kw == "import") {
      std::string name;
      while (words >> name) {
        TheoryPtr imp;
        if (auto it = local.find(name); it != local.end()) imp = it->second;
        if (!imp && resolve) imp = resolve(name);
        if (!imp) file_fail(ErrorCode::UnknownImport, lineno, "unknown spec '" + name + "'");
        cur->imports.push_back(name);
        cur->signature.merge(imp->signature);
        cur->notations.merge(imp->notations);
        for (const auto& [n, p] : imp->axioms.axioms()) {
          if (!cur->axioms.find(n)) cur->axioms.add(n, p);
        }
      }
      continue;
    }
    if (kw == "symbol") {
      std::string name;
      bool any = false;
      while (words >> name) {
        if (name.back() == ',') name.pop_back();
        if (!detail::valid_identifier(name) || is_keyword(name)) {
          file_fail(ErrorCode::Syntax, lineno, "invalid symbol name '" + name + "'");
        }
        try {
          cur->signature.add(name);
        } catch (const Error& e) {
          file_fail(e.code(), lineno, e.what());
        }
        cur->own_symbols.push_back(name);
        any = true;
      }
      if (!any) file_fail(ErrorCode::Syntax, lineno, "expected symbol names");
      continue;
    }
    std::smatch m;
    if (kw == "notation") {
      if (!std::regex_match(line, m, notation_re)) {
        file_fail(ErrorCode::Syntax, lineno, "expected 'notation NAME(p, ...) := pattern'");
      }
      std::string name = m[1];
      ParseOptions opts;
      std::string params = m[2];
      std::istringstream ps{detail::strip_comment(params)};
      std::string param;
      while (ps.rdbuf()->in_avail() > 0 && std::getline(ps, param, ',')) {
        param = detail::strip_comment(param);
        if (!detail::valid_identifier(param)) file_fail(ErrorCode::Syntax, lineno, "invalid parameter '" + param + "'");
        opts.params.push_back(param);
      }
      std::size_t col = indent + static_cast<std::size_t>(m.position(3));
      std::string body = m[3];
      Pattern tmpl = detail::at_line(lineno, col, [&] {
        return parse_pattern(body, cur->signature, cur->notations, opts);
      });
      try {
        cur->notations.add(template_notation(name, opts.params.size(), tmpl));
      } catch (const Error& e) {
        file_fail(e.code(), lineno, e.what());
      }
      cur->own_notations.push_back(name);
      continue;
    }
    if (kw == "axiom") {
      if (!std::regex_match(line, m, axiom_re)) file_fail(ErrorCode::Syntax, lineno, "expected 'axiom NAME : pattern'");
      std::string name = m[1];
      if (cur->axioms.find(name)) file_fail(ErrorCode::DuplicateName, lineno, "axiom '" + name + "' defined twice");
      std::size_t col = indent + static_cast<std::size_t>(m.position(2));
      std::string body = m[2];
      Pattern p = detail::at_line(lineno, col, [&] { return cur->parse(body); });
      if (!well_formed(p)) file_fail(ErrorCode::IllFormedAxiom, lineno, "axiom '" + name + "' is not well-formed");
      cur->axioms.add(name, p);
      cur->own_axioms.push_back(name);
      continue;
    }
    file_fail(ErrorCode::Syntax, lineno, "unknown declaration '" + kw + "'");
  }
  if (cur) file_fail(ErrorCode::Syntax, lineno, "missing 'endspec' for spec '" + cur->name + "'");
  return out;
}

inline TheoryPtr parse_theory(std::string_view text, const TheoryResolver& resolve = {}) {
  auto all = parse_theories(text, resolve);
  if (all.size() != 1) throw Error(ErrorCode::Schema, "expected exactly one spec, found " + std::to_string(all.size()));
  return all.front();
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw Error(ErrorCode::UnresolvedName, "cannot read '" + p.string() + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Finds `NAME.mlth` on the search path: $ML_THEORY_PATH (colon separated)
// followed by the shipped theories directory.
class TheoryLibrary {
 public:
  TheoryLibrary() {
    if (const char* env = std::getenv("ML_THEORY_PATH")) {
      std::istringstream ss(env);
      std::string dir;
      while (std::getline(ss, dir, ':')) {
        if (!dir.empty()) dirs_.emplace_back(dir);
      }
    }
    dirs_.emplace_back(MLW_THEORY_DIR);
  }
  explicit TheoryLibrary(std::vector<std::filesystem::path> dirs) : dirs_(std::move(dirs)) {}
  // Copies share the search path but not the cache.
  TheoryLibrary(const TheoryLibrary& o) : dirs_(o.dirs_) {}
  TheoryLibrary& operator=(const TheoryLibrary& o) {
    if (this != &o) {
      std::lock_guard<std::mutex> lock(mu_);
      dirs_ = o.dirs_;
      cache_.clear();
    }
    return *this;
  }

  const std::vector<std::filesystem::path>& dirs() const { return dirs_; }

  std::optional<std::filesystem::path> locate(const std::string& file) const {
    for (const auto& d : dirs_) {
      auto p = d / file;
      if (std::filesystem::exists(p)) return p;
    }
    return std::nullopt;
  }

  TheoryPtr load(const std::string& name) const {
    {
      std::lock_guard<std::mutex> lock(mu_);
      if (auto it = cache_.find(name); it != cache_.end()) return it->second;
      if (loading_.count(name)) throw Error(ErrorCode::UnknownImport, "cyclic import of '" + name + "'");
      loading_.insert(name);
    }
    struct Done {
      const TheoryLibrary* lib;
      std::string name;
      ~Done() {
        std::lock_guard<std::mutex> lock(lib->mu_);
        lib->loading_.erase(name);
      }
    } done{this, name};
    auto path = locate(name + ".mlth");
    if (!path) throw Error(ErrorCode::UnknownImport, "no theory named '" + name + "'");
    auto all = parse_theories(read_file(*path), [this](const std::string& n) { return load(n); });
    TheoryPtr found;
    for (const auto& t : all) {
      if (t->name == name) found = t;
    }
    if (!found) throw Error(ErrorCode::UnknownImport, path->string() + " does not define spec '" + name + "'");
    std::lock_guard<std::mutex> lock(mu_);
    cache_.emplace(name, found);
    return found;
  }

  // Names of every `.mlth` file on the search path.
  std::vector<std::string> list() const {
    std::set<std::string> names;
    for (const auto& d : dirs_) {
      if (!std::filesystem::is_directory(d)) continue;
      for (const auto& e : std::filesystem::directory_iterator(d)) {
        if (e.path().extension() == ".mlth") names.insert(e.path().stem().string());
      }
    }
    return {names.begin(), names.end()};
  }

 private:
  std::vector<std::filesystem::path> dirs_;
  mutable std::mutex mu_;
  mutable std::map<std::string, TheoryPtr> cache_;
  mutable std::set<std::string> loading_;
};

// A theory with no symbols, no notations beyond the built-in ones, no axioms.
inline TheoryPtr empty_theory() {
  static const TheoryPtr t = [] {
    auto e = std::make_shared<Theory>();
    e->name = "empty";
    e->axioms = AxiomSet("empty");
    return e;
  }();
  return t;
}

}  // namespace mlw
