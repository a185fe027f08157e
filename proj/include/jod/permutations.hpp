#pragma once

// Orderings (permutations of node labels) and the proposal moves the sampler
// uses on them.
//
// Library code is 0-indexed: labels are 0..p-1 and positions are 0..p-1.
// The textual form (`format_ordering` / `parse_ordering`) and
// `Ordering::from_labels` / `labels()` use 1-indexed labels.

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "jod/node_set.hpp"

namespace jod {

class Ordering {
 public:
  Ordering() = default;
  // `nodes[t]` is the label at position t. Throws ValidationError unless
  // `nodes` is a permutation of 0..size-1.
  explicit Ordering(std::vector<Node> nodes);

  static Ordering identity(int p);
  static Ordering from_labels(std::span<const int> one_based);
  static Ordering from_labels(std::initializer_list<int> one_based) {
    return from_labels(std::span<const int>(one_based.begin(), one_based.size()));
  }

  int size() const { return static_cast<int>(nodes_.size()); }
  Node at(int position) const { return nodes_[static_cast<std::size_t>(position)]; }
  int position(Node label) const { return inverse_[static_cast<std::size_t>(label)]; }
  std::span<const Node> nodes() const { return nodes_; }
  std::vector<int> labels() const;

  Ordering reversed() const;

  friend bool operator==(const Ordering& a, const Ordering& b) { return a.nodes_ == b.nodes_; }
  friend auto operator<=>(const Ordering& a, const Ordering& b) { return a.nodes_ <=> b.nodes_; }

 private:
  std::vector<Node> nodes_;
  std::vector<int> inverse_;
};

// Nodes placed before `j`.
NodeSet predecessors(const Ordering& sigma, Node j);

// Removes the element at position `from` and reinserts it so that it ends up
// at position `to`; elements in between shift by one.
Ordering insert_move(const Ordering& sigma, int from, int to);

// R2R(sigma, i, j): the element at position j is inserted before (i < j) or
// after (i > j) the element at position i. Equivalent to insert_move(sigma, j, i).
Ordering r2r_move(const Ordering& sigma, int i, int j);

// Swaps positions i and i+1.
Ordering adj_move(const Ordering& sigma, int i);

// Swaps positions i < j.
Ordering rts_move(const Ordering& sigma, int i, int j);

enum class Neighborhood { r2r, adj, rts };

std::string_view to_string(Neighborhood n);
Neighborhood parse_neighborhood(std::string_view s);

// One proposal move. Positions first..last (inclusive) are the only ones whose
// occupant or predecessor set can change.
struct Move {
  Neighborhood kind = Neighborhood::r2r;
  int a = 0;  // r2r: source position; adj/rts: first position
  int b = 0;  // r2r: target position; adj/rts: second position

  Ordering apply(const Ordering& sigma) const;
  int first() const { return a < b ? a : b; }
  int last() const { return a < b ? b : a; }
};

// Number of distinct neighbors: (p-1)^2 for r2r, p-1 for adj, p(p-1)/2 for rts.
std::size_t neighborhood_size(Neighborhood kind, int p);

// Canonical enumeration of the neighborhood. For r2r, indices
// [0, p(p-1)/2) are leftward insertions (to < from) and the remaining
// (p-1)(p-2)/2 are rightward insertions by at least two positions; the
// rightward adjacent swap duplicates a leftward one and is omitted.
Move neighborhood_move(Neighborhood kind, int p, std::size_t index);

std::vector<Ordering> neighborhood(Neighborhood kind, const Ordering& sigma);

// R2R_< neighbors: every leftward insertion.
std::vector<Ordering> r2r_left_neighborhood(const Ordering& sigma);

// Kendall rank correlation between the relative positions of labels.
double kendall_tau(const Ordering& a, const Ordering& b);

// Number of label pairs ordered differently by a and b.
long long discordant_pairs(const Ordering& a, const Ordering& b);

// "3,1,2" (1-indexed labels).
std::string format_ordering(const Ordering& sigma);
Ordering parse_ordering(std::string_view text);

}  // namespace jod
