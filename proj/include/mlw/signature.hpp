#pragma once

#include <set>
#include <string>
#include <vector>

#include "mlw/error.hpp"

namespace mlw {

// Declared constant symbols, in declaration order. Element and set variable
// universes are all strings (lowercase-initial / uppercase-initial in text).
class Signature {
 public:
  Signature() = default;
  Signature(std::initializer_list<std::string> symbols) {
    for (const auto& s : symbols) add(s);
  }

  void add(const std::string& symbol) {
    if (!lookup_.insert(symbol).second) {
      throw Error(ErrorCode::DuplicateName, "symbol '" + symbol + "' declared twice");
    }
    symbols_.push_back(symbol);
  }

  bool contains(const std::string& symbol) const { return lookup_.count(symbol) != 0; }
  const std::vector<std::string>& symbols() const { return symbols_; }
  std::size_t size() const { return symbols_.size(); }

  void merge(const Signature& other) {
    for (const auto& s : other.symbols_) {
      if (!contains(s)) add(s);
    }
  }

 private:
  std::vector<std::string> symbols_;
  std::set<std::string> lookup_;
};

}  // namespace mlw
