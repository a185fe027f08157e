#pragma once

#include <algorithm>
#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace jod {

using Node = int;

// Fixed-capacity bitset over node labels 0..capacity-1.
class NodeSet {
 public:
  NodeSet() = default;
  explicit NodeSet(int capacity) : capacity_(capacity), words_((capacity + 63) / 64, 0) {}

  int capacity() const { return capacity_; }

  bool contains(Node v) const { return (words_[v >> 6] >> (v & 63)) & 1U; }
  void insert(Node v) { words_[v >> 6] |= std::uint64_t{1} << (v & 63); }
  void erase(Node v) { words_[v >> 6] &= ~(std::uint64_t{1} << (v & 63)); }
  void clear() { std::fill(words_.begin(), words_.end(), 0); }

  int size() const {
    int n = 0;
    for (auto w : words_) n += std::popcount(w);
    return n;
  }
  bool empty() const {
    for (auto w : words_) {
      if (w) return false;
    }
    return true;
  }

  // Calls f(v) for each member in increasing label order.
  template <class F>
  void for_each(F&& f) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits) {
        const int b = std::countr_zero(bits);
        f(static_cast<Node>(w * 64 + b));
        bits &= bits - 1;
      }
    }
  }

  std::vector<Node> members() const {
    std::vector<Node> out;
    out.reserve(static_cast<std::size_t>(size()));
    for_each([&](Node v) { out.push_back(v); });
    return out;
  }

  // Number of positions where the two sets differ.
  int symmetric_difference_size(const NodeSet& other) const {
    int n = 0;
    for (std::size_t w = 0; w < words_.size(); ++w) n += std::popcount(words_[w] ^ other.words_[w]);
    return n;
  }

  bool is_subset_of(const NodeSet& other) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      if (words_[w] & ~other.words_[w]) return false;
    }
    return true;
  }

  NodeSet& operator|=(const NodeSet& other) {
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] |= other.words_[w];
    return *this;
  }

  const std::vector<std::uint64_t>& words() const { return words_; }

  friend bool operator==(const NodeSet&, const NodeSet&) = default;
  friend auto operator<=>(const NodeSet& a, const NodeSet& b) {
    if (auto c = a.capacity_ <=> b.capacity_; c != 0) return c;
    return a.words_ <=> b.words_;
  }

  std::size_t hash() const {
    std::size_t h = 0x9e3779b97f4a7c15ULL;
    for (auto w : words_) h = (h ^ std::hash<std::uint64_t>{}(w)) * 0x100000001b3ULL + (h >> 7);
    return h;
  }

 private:
  int capacity_ = 0;
  std::vector<std::uint64_t> words_;
};

struct NodeSetHash {
  std::size_t operator()(const NodeSet& s) const { return s.hash(); }
};

}  // namespace jod
