#pragma once

// Synthetic linear-Gaussian SEM data.

#include <span>
#include <tuple>
#include <vector>

#include "jod/dag.hpp"
#include "jod/dataset.hpp"
#include "jod/permutations.hpp"
#include "jod/sampler.hpp"

namespace jod {

// 3 / (2p - 2), i.e. 1.5 expected parents-plus-children per node.
double default_edge_probability(int p);

// Each pair sigma(i) -> sigma(j), i < j, independently with probability p_edge.
Dag random_ordered_dag(int p, double p_edge, const Ordering& sigma, Rng& rng);

// |B_ij| ~ U[low, high] with a random sign; unit noise variances.
WeightedDag sample_weights(const Dag& g, double low, double high, Rng& rng);

// Draws n rows of X_j = sum_i B_ij X_i + e_j, e_j ~ N(0, omega_j).
Dataset simulate(const WeightedDag& scm, int n, Rng& rng);

// K graphs sharing `n_common` edges, each with `n_private` further edges that
// are absent from the common set. All edges point forward in sigma_star.
std::vector<Dag> common_private_collection(int p, int K, int n_common, int n_private, const Ordering& sigma_star,
                                           Rng& rng);

struct SimilarOrderings {
  std::vector<Ordering> orderings;
  std::vector<double> taus;  // Kendall tau against the identity
  double pairwise_u = 1.0;
};

// K orderings whose Kendall tau against (1..p) lies within `tolerance` of
// `target_tau`. Each is produced by a Metropolis walk over adjacent swaps
// that targets the matching discordant-pair count.
SimilarOrderings similar_orderings(int p, int K, double target_tau, Rng& rng, double tolerance = 0.02,
                                   int max_attempts = 200);

// Triangles (i, j, l) with i -> j, i -> l and j -> l.
std::vector<std::tuple<Node, Node, Node>> triangular_motifs(const Dag& g);

// Samples weights as sample_weights, then for `motifs` randomly chosen
// triangles (i, j, l) resets B_il so that Cov(X_j, X_l) = 0. For an isolated
// triangle with unit variances this is B_il = -a c - c / a with a = B_ij,
// c = B_jl.
WeightedDag unfaithful_scm(const Dag& g, int motifs, Rng& rng, double low = 0.5, double high = 1.0);

}  // namespace jod
