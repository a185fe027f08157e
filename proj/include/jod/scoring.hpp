#pragma once

// Decomposable Gaussian DAG score. For node j with parent set S on a dataset
// with n rows and p columns,
//
//   phi_j(S) = -(c0 log p + 0.5 log(1 + alpha/gamma)) |S|
//              - ((alpha n + kappa) / 2) log(n * omega_j(S)),
//
// where omega_j(S) is the residual variance of regressing column j on the
// columns in S. Everything is computed from the cached Gram matrix.

#include <memory>
#include <mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "jod/dag.hpp"
#include "jod/dataset.hpp"
#include "jod/node_set.hpp"

namespace jod {

struct ScoreParams {
  double alpha = 0.99;
  double gamma = 0.01;
  double kappa = 0.0;
  double c0 = 3.0;
  int max_indegree = 0;  // 0 means unbounded (d = p)

  void validate() const;
  int indegree_cap(int p) const { return max_indegree <= 0 || max_indegree > p ? p : max_indegree; }
  // Per-edge penalty c0 log p + 0.5 log(1 + alpha/gamma).
  double edge_penalty(int p) const;
};

enum class ScoreStatus { ok, singular, degenerate };

struct NodeScore {
  double value = 0.0;
  ScoreStatus status = ScoreStatus::ok;
  bool ok() const { return status == ScoreStatus::ok; }
};

inline constexpr double kSingularPivotTol = 1e-10;
inline constexpr double kVarianceFloor = 1e-12;

// Scores one dataset. Residual sums of squares are memoized per (node, parent
// set); the memo is sharded by node with one mutex per shard, so a scorer can
// be shared by concurrently running chains.
class DatasetScorer {
 public:
  DatasetScorer(const Dataset& data, ScoreParams params);

  const Dataset& data() const { return *data_; }
  const ScoreParams& params() const { return params_; }
  int p() const { return data_->p(); }

  // n * omega_j(S) with status; never throws for valid labels.
  NodeScore try_rss(Node j, const NodeSet& parents) const;
  // omega_j(S), clamped at zero. Throws SingularDesign.
  double residual_variance(Node j, const NodeSet& parents) const;

  NodeScore try_node_score(Node j, const NodeSet& parents) const;
  // Throws SingularDesign or DegenerateVariance.
  double node_score(Node j, const NodeSet& parents) const;

  // Sum of node scores over Pa_j(g). Throws on failure or in-degree above d.
  double graph_score(const Dag& g) const;

  std::size_t cache_entries() const;
  void clear_cache() const;

 private:
  struct Shard {
    mutable std::mutex mutex;
    std::unordered_map<NodeSet, NodeScore, NodeSetHash> rss;
  };

  NodeScore compute_rss(Node j, const NodeSet& parents) const;

  const Dataset* data_;
  ScoreParams params_;
  double edge_penalty_;
  double likelihood_weight_;
  std::unique_ptr<Shard[]> shards_;
};

// Unnormalized log posterior of an ordering: sum over datasets of the graph
// score of that dataset's MAP graph (flat prior on orderings).
double log_posterior(std::span<const DatasetScorer> scorers, std::span<const Dag> map_graphs);

}  // namespace jod
