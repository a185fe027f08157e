#pragma once

#include <compare>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "jod/node_set.hpp"
#include "jod/permutations.hpp"

namespace jod {

// Directed edge tail -> head (0-indexed labels).
struct Edge {
  Node tail = 0;
  Node head = 0;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Directed graph stored as parent and child bit rows. Builders that take
// edge lists validate acyclicity; the mutators do not, so callers that edit a
// graph in place check `is_acyclic()` themselves.
class Dag {
 public:
  Dag() = default;
  explicit Dag(int p);
  static Dag from_edges(int p, std::span<const Edge> edges);
  // 1-indexed pairs, e.g. {{1,3},{2,3}}.
  static Dag from_labeled_edges(int p, std::initializer_list<std::pair<int, int>> edges);

  int size() const { return p_; }
  bool has_edge(Node i, Node j) const { return children_[static_cast<std::size_t>(i)].contains(j); }
  bool adjacent(Node i, Node j) const { return has_edge(i, j) || has_edge(j, i); }
  void add_edge(Node i, Node j);
  void remove_edge(Node i, Node j);
  void reverse_edge(Node i, Node j);
  void set_parents(Node j, const NodeSet& parents);

  const NodeSet& parents(Node j) const { return parents_[static_cast<std::size_t>(j)]; }
  const NodeSet& children(Node i) const { return children_[static_cast<std::size_t>(i)]; }
  std::size_t edge_count() const;
  std::vector<Edge> edges() const;

  bool is_acyclic() const;
  std::optional<std::vector<Node>> topological_order() const;

  friend bool operator==(const Dag& a, const Dag& b) { return a.p_ == b.p_ && a.children_ == b.children_; }
  friend auto operator<=>(const Dag& a, const Dag& b) {
    if (auto c = a.p_ <=> b.p_; c != 0) return c;
    return a.children_ <=> b.children_;
  }

 private:
  void check_node(Node v) const;

  int p_ = 0;
  std::vector<NodeSet> parents_;
  std::vector<NodeSet> children_;
};

// Dag plus linear-SEM parameters: `weights` is the p x p row-major matrix B
// with B[i*p+j] the coefficient on i -> j (zero off the edge set).
struct WeightedDag {
  Dag dag;
  std::vector<double> weights;
  std::vector<double> noise_vars;

  double weight(Node i, Node j) const { return weights[static_cast<std::size_t>(i * dag.size() + j)]; }
  void set_weight(Node i, Node j, double w) { weights[static_cast<std::size_t>(i * dag.size() + j)] = w; }
  // Throws ValidationError on shape mismatch, weights off the edge set, zero
  // weights on edges or non-positive noise variances.
  void validate() const;
};

WeightedDag make_weighted(const Dag& g);

bool is_consistent(const Dag& g, const Ordering& sigma);

// Unordered adjacent pairs (i < j).
std::vector<std::pair<Node, Node>> skeleton(const Dag& g);

// Triples (i, j, k) with i -> j <- k, i and k non-adjacent, i < k.
std::vector<std::tuple<Node, Node, Node>> v_structures(const Dag& g);

// Edges i -> j with Pa(j) = Pa(i) + {i}.
std::vector<Edge> covered_edges(const Dag& g);

// Number of ordered pairs whose adjacency indicators differ.
int hamming(const Dag& g, const Dag& h);

// Edge list text: a "p=<n>" line followed by "i,j" lines (1-indexed).
void write_edge_list(std::ostream& out, const Dag& g);
Dag read_edge_list(std::istream& in);
// p lines of p comma-separated 0/1 entries.
void write_adjacency_csv(std::ostream& out, const Dag& g);
Dag read_adjacency_csv(std::istream& in);

std::string format_edges(const Dag& g);

}  // namespace jod
