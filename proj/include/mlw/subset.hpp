#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

namespace mlw {

// Subset of a finite carrier {0, ..., n-1}, stored as a bitset.
class Subset {
 public:
  Subset() = default;
  explicit Subset(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}

  static Subset full(std::size_t n) {
    Subset s(n);
    for (std::size_t i = 0; i < n; ++i) s.insert(i);
    return s;
  }
  static Subset singleton(std::size_t n, std::size_t i) {
    Subset s(n);
    s.insert(i);
    return s;
  }
  // Bit i of `mask` selects element i (n <= 64).
  static Subset from_mask(std::size_t n, std::uint64_t mask) {
    Subset s(n);
    if (!s.words_.empty()) s.words_[0] = n >= 64 ? mask : (mask & ((std::uint64_t{1} << n) - 1));
    return s;
  }

  std::size_t universe() const { return n_; }

  bool contains(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }
  void insert(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  void erase(std::size_t i) { words_[i / 64] &= ~(std::uint64_t{1} << (i % 64)); }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  bool empty() const {
    for (auto w : words_) {
      if (w) return false;
    }
    return true;
  }
  bool is_full() const { return count() == n_; }

  Subset& operator|=(const Subset& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  Subset& operator&=(const Subset& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }
  Subset& operator-=(const Subset& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
    return *this;
  }
  friend Subset operator|(Subset a, const Subset& b) { return a |= b; }
  friend Subset operator&(Subset a, const Subset& b) { return a &= b; }
  friend Subset operator-(Subset a, const Subset& b) { return a -= b; }

  Subset complement() const { return full(n_) - *this; }
  bool subset_of(const Subset& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      if (words_[i] & ~o.words_[i]) return false;
    }
    return true;
  }

  std::vector<std::size_t> elements() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n_; ++i) {
      if (contains(i)) out.push_back(i);
    }
    return out;
  }

  bool operator==(const Subset& o) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace mlw
