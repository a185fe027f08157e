#pragma once

// Posterior summaries and evaluation metrics over sampler traces.

#include <iosfwd>
#include <span>
#include <vector>

#include "jod/dag.hpp"
#include "jod/permutations.hpp"
#include "jod/sampler.hpp"

namespace jod {

// p x p row-major matrix of per-edge values (inclusion probabilities,
// adjacency indicators).
struct EdgeMatrix {
  int p = 0;
  std::vector<double> values;

  explicit EdgeMatrix(int p_ = 0) : p(p_), values(static_cast<std::size_t>(p_ * p_), 0.0) {}
  static EdgeMatrix from_dag(const Dag& g);
  double at(Node i, Node j) const { return values[static_cast<std::size_t>(i * p + j)]; }
  double& at(Node i, Node j) { return values[static_cast<std::size_t>(i * p + j)]; }
};

// Fraction of recorded samples whose dataset-k graph contains i -> j. With
// several traces the samples are pooled.
EdgeMatrix edge_inclusion(const ChainTrace& trace, int k);
EdgeMatrix edge_inclusion(std::span<const ChainTrace> traces, int k);

// Edges with value strictly above `threshold`. Not checked for cycles.
Dag threshold_graph(const EdgeMatrix& m, double threshold);

// Sum over ordered pairs of |truth - estimate|.
double hamming_distance(const Dag& truth, const EdgeMatrix& estimate);

// Mean over datasets of hamming_distance.
double delta(std::span<const Dag> truth, std::span<const EdgeMatrix> estimates);
double delta(std::span<const Dag> truth, std::span<const Dag> estimates);

// Mean Kendall tau between sigma_star and the recorded orderings.
double tau_star(const ChainTrace& trace, const Ordering& sigma_star);
double tau_star(std::span<const ChainTrace> traces, const Ordering& sigma_star);

struct Rates {
  double tpr = 0.0;
  double fdr = 0.0;
};

// TPR = recovered / |truth| (0 for an empty truth); FDR = spurious /
// |estimate| (0 for an empty estimate).
Rates tpr_fdr(const Dag& truth, const Dag& estimate);

inline constexpr double kRhatCap = 1e6;

// Classic (non-split) potential scale reduction for equal-length chains.
// Returns 1 when every chain is constant at the same value and kRhatCap when
// the chains are constant at different values.
double gelman_rubin_statistic(std::span<const std::vector<double>> chains);

struct GelmanRubinSummary {
  int datasets = 0;
  int p = 0;
  std::vector<double> values;  // [k][i][j] flattened, diagonal entries left at 1

  double max() const;
  // Fraction of off-diagonal entries strictly below `threshold`.
  double fraction_below(double threshold) const;
  double at(int k, Node i, Node j) const {
    return values[(static_cast<std::size_t>(k) * static_cast<std::size_t>(p) + static_cast<std::size_t>(i)) *
                      static_cast<std::size_t>(p) +
                  static_cast<std::size_t>(j)];
  }
};

// R-hat of the edge-indicator series for each dataset and ordered pair.
// Requires at least two chains with the same number of recorded samples.
GelmanRubinSummary gelman_rubin(std::span<const ChainTrace> traces);

// Mean Kendall tau over unordered pairs.
double pairwise_u(std::span<const Ordering> orderings);

struct NodeConnectivity {
  Node node = 0;
  double case_mean = 0.0;
  double control_mean = 0.0;
  double difference = 0.0;  // case - control
};

// Per-node in+out posterior mass averaged within each group, sorted by
// |difference| descending (ties by label).
std::vector<NodeConnectivity> connectivity_diff(std::span<const EdgeMatrix> cases,
                                                std::span<const EdgeMatrix> controls);

void write_matrix_csv(std::ostream& out, const EdgeMatrix& m);

}  // namespace jod
