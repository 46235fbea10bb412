#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mlw/error.hpp"
#include "mlw/subset.hpp"

namespace mlw {

// A finite model: nonempty ordered carrier, total application table into
// subsets, and an interpretation for each symbol.
class Model {
 public:
  Model() = default;
  Model(std::string name, std::vector<std::string> elements) : name_(std::move(name)) {
    if (elements.empty()) throw Error(ErrorCode::Schema, "model carrier must be nonempty");
    for (std::size_t i = 0; i < elements.size(); ++i) {
      if (!index_.emplace(elements[i], i).second) {
        throw Error(ErrorCode::DuplicateName, "element '" + elements[i] + "' declared twice");
      }
    }
    elements_ = std::move(elements);
    table_.assign(elements_.size() * elements_.size(), Subset(elements_.size()));
  }

  // Anonymous carrier e0 .. e{n-1}.
  static Model with_size(std::string name, std::size_t n) {
    std::vector<std::string> el;
    for (std::size_t i = 0; i < n; ++i) el.push_back("e" + std::to_string(i));
    return Model(std::move(name), std::move(el));
  }

  const std::string& name() const { return name_; }
  void set_name(std::string n) { name_ = std::move(n); }
  std::size_t size() const { return elements_.size(); }
  const std::vector<std::string>& elements() const { return elements_; }
  const std::string& element_name(std::size_t i) const { return elements_.at(i); }

  std::optional<std::size_t> find_element(const std::string& e) const {
    auto it = index_.find(e);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  std::size_t element(const std::string& e) const {
    auto i = find_element(e);
    if (!i) throw Error(ErrorCode::Schema, "unknown element '" + e + "' in model '" + name_ + "'");
    return *i;
  }

  Subset empty_set() const { return Subset(size()); }
  Subset full_set() const { return Subset::full(size()); }

  const Subset& app(std::size_t a, std::size_t b) const { return table_[a * size() + b]; }
  void set_app(std::size_t a, std::size_t b, Subset s) { table_[a * size() + b] = std::move(s); }

  bool has_symbol(const std::string& s) const { return symbols_.count(s) != 0; }
  const Subset& symbol(const std::string& s) const {
    auto it = symbols_.find(s);
    if (it == symbols_.end()) {
      throw Error(ErrorCode::UninterpretedSymbol,
                  "symbol '" + s + "' has no interpretation in model '" + name_ + "'");
    }
    return it->second;
  }
  void set_symbol(const std::string& s, Subset v) { symbols_[s] = std::move(v); }
  const std::map<std::string, Subset>& symbols() const { return symbols_; }

  // Pointwise extension of application to sets.
  Subset apply(const Subset& l, const Subset& r) const {
    Subset out(size());
    auto rs = r.elements();
    if (rs.empty()) return out;
    for (std::size_t a : l.elements()) {
      for (std::size_t b : rs) out |= app(a, b);
    }
    return out;
  }

  std::string render(const Subset& s) const {
    std::string out = "{";
    bool first = true;
    for (std::size_t i : s.elements()) {
      if (!first) out += ", ";
      out += elements_[i];
      first = false;
    }
    return out + "}";
  }

 private:
  std::string name_;
  std::vector<std::string> elements_;
  std::map<std::string, std::size_t> index_;
  std::vector<Subset> table_;
  std::map<std::string, Subset> symbols_;
};

// Variable valuation. Unmapped element variables default to the first carrier
// element and unmapped set variables to the empty set.
struct Valuation {
  std::map<std::string, std::size_t> evars;
  std::map<std::string, Subset> svars;

  std::size_t evar(const std::string& x) const {
    auto it = evars.find(x);
    return it == evars.end() ? 0 : it->second;
  }
  Subset svar(const std::string& X, std::size_t n) const {
    auto it = svars.find(X);
    return it == svars.end() ? Subset(n) : it->second;
  }

  bool operator==(const Valuation&) const = default;
};

}  // namespace mlw
