#pragma once

// Population-level combinatorics on small graphs: Markov equivalence classes,
// essential arrows, linear extensions, minimal I-maps of a covariance matrix
// and the brute-force joint sparsest-permutation argmax.

#include <span>
#include <vector>

#include "jod/dag.hpp"
#include "jod/permutations.hpp"

namespace jod {

inline constexpr int kClassSearchLimit = 10;
inline constexpr int kEnumerationLimit = 8;
inline constexpr double kDefaultCoefficientTol = 1e-9;

struct Covariance {
  int p = 0;
  std::vector<double> matrix;  // row-major p x p

  double at(Node i, Node j) const { return matrix[static_cast<std::size_t>(i * p + j)]; }
  // Symmetry within 1e-12 and a successful Cholesky factorization.
  void validate() const;
};

struct EquivalenceClass {
  std::vector<Dag> members;   // sorted
  std::vector<Edge> essential;  // edges oriented the same way in every member
};

bool markov_equivalent(const Dag& g, const Dag& h);

// Closure of g under covered-edge reversals.
EquivalenceClass equivalence_class(const Dag& g, int limit = kClassSearchLimit);

// All orderings in which every edge points forward, in lexicographic order.
// Throws ValidationError if the edge set is cyclic.
std::vector<Ordering> linear_extensions(int p, std::span<const Edge> edges, int limit = kClassSearchLimit);

// Union of linear extensions over the members of a class.
std::vector<Ordering> class_orderings(const EquivalenceClass& cls);

// {s(j) -> s(j+1) : 2 <= j <= p-1} plus s(1) -> s(3) (1-indexed positions).
std::vector<Edge> e_max(const Ordering& sigma_star);

// sigma_star with its first two entries swapped.
Ordering swap_leading_pair(const Ordering& sigma_star);

Covariance population_covariance(const WeightedDag& scm);

// Regresses each node on its predecessors under `sigma` and keeps i -> j when
// |beta_i| > tol * sqrt(Sigma_jj / Sigma_ii). Throws SingularDesign when a
// predecessor block is numerically singular.
Dag population_minimal_imap(const Ordering& sigma, const Covariance& cov, double tol = kDefaultCoefficientTol);

// Negative edge count of the minimal I-map.
int psi1(const Ordering& sigma, const Covariance& cov, double tol = kDefaultCoefficientTol);

struct JointArgmax {
  std::vector<Ordering> argmax;               // maximizers of sum_k psi1_k, sorted
  int best_score = 0;
  std::vector<Ordering> class_intersection;   // intersection over k of class_orderings
  std::vector<Edge> essential_union;          // union over k of essential arrows, sorted
};

// Enumerates all p! orderings; `threads` partitions the permutation list.
JointArgmax joint_argmax(std::span<const WeightedDag> scms, double tol = kDefaultCoefficientTol, int threads = 1);

std::vector<Ordering> all_orderings(int p, int limit = kEnumerationLimit);

}  // namespace jod
