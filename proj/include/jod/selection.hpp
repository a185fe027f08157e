#pragma once

// MAP DAG estimation for a fixed ordering.

#include <atomic>
#include <span>

#include "jod/dag.hpp"
#include "jod/permutations.hpp"
#include "jod/scoring.hpp"

namespace jod {

struct ParentChoice {
  NodeSet parents;
  NodeScore score;  // score of `parents`; status != ok when even that set fails
};

// Greedy forward addition then backward deletion over `candidates` for one
// node. Gains must be strictly positive; ties go to the lowest label;
// candidates whose score fails are skipped. The forward phase stops at the
// in-degree cap.
ParentChoice forward_backward_node(const DatasetScorer& scorer, Node j, const NodeSet& candidates);

// forward_backward_node for every node with its predecessors as candidates.
Dag forward_backward(const DatasetScorer& scorer, const Ordering& sigma);

// Exhaustive argmax of the node score over predecessor subsets of size <= d.
// Ties: fewer parents, then lexicographically smallest sorted label list.
ParentChoice exhaustive_node(const DatasetScorer& scorer, Node j, const NodeSet& candidates);
Dag exhaustive_map(const DatasetScorer& scorer, const Ordering& sigma);

// Allowed problem sizes for exhaustive_map: p <= 12 with d <= 4, or p <= 8.
bool exhaustive_supported(int p, int indegree_cap);

// Number of times the forward phase stopped because of the in-degree cap.
std::size_t indegree_cap_hits();

// Log posterior of sigma with forward-backward MAP graphs per dataset.
double ordering_log_posterior(std::span<const DatasetScorer> scorers, const Ordering& sigma);

// log pi(sigma) - log pi(tau), each ordering scored with its own MAP graphs.
double log_bayes_factor(const Ordering& sigma, const Ordering& tau, std::span<const DatasetScorer> scorers);

}  // namespace jod
