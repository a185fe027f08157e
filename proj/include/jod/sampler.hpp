#pragma once

// Random-walk Metropolis-Hastings over orderings.

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "jod/dag.hpp"
#include "jod/permutations.hpp"
#include "jod/scoring.hpp"

namespace jod {

using Rng = std::mt19937_64;

// Sampler state: the ordering, its log posterior and, for data-backed models,
// the per-dataset MAP parent sets and node scores.
struct ChainState {
  Ordering ordering;
  double log_post = 0.0;
  std::vector<std::vector<NodeSet>> parents;      // [k][j]
  std::vector<std::vector<double>> node_scores;   // [k][j]

  std::vector<Dag> graphs() const;
};

// Target distribution over orderings, known up to a constant.
class PosteriorModel {
 public:
  virtual ~PosteriorModel() = default;
  virtual int p() const = 0;
  virtual ChainState evaluate(const Ordering& sigma) const = 0;
  // State for `next`, which differs from `current.ordering` only at positions
  // first..last. The default re-evaluates from scratch.
  virtual ChainState evaluate_move(const ChainState& current, const Ordering& next, int first, int last) const {
    (void)current;
    (void)first;
    (void)last;
    return evaluate(next);
  }
};

// Joint posterior of the Gaussian DAG model: each dataset contributes the
// score of its forward-backward MAP graph.
class OrderPosterior final : public PosteriorModel {
 public:
  // With `incremental`, a move only re-selects parents for nodes whose
  // predecessor set changed.
  OrderPosterior(std::span<const DatasetScorer> scorers, bool incremental = true);

  int p() const override { return p_; }
  ChainState evaluate(const Ordering& sigma) const override;
  ChainState evaluate_move(const ChainState& current, const Ordering& next, int first, int last) const override;

  std::span<const DatasetScorer> scorers() const { return scorers_; }
  bool incremental() const { return incremental_; }

 private:
  void finalize(ChainState& s) const;

  std::span<const DatasetScorer> scorers_;
  int p_ = 0;
  bool incremental_ = true;
};

struct ChainConfig {
  long iterations = 1;
  std::optional<long> burn_in;  // default iterations / 2
  Neighborhood neighborhood = Neighborhood::r2r;
  std::uint64_t seed = 1;
  std::optional<Ordering> initial;  // random when unset
  int thin = 1;

  long effective_burn_in() const { return burn_in.value_or(iterations / 2); }
  // Throws ValidationError.
  void validate(int p) const;
};

struct TraceSample {
  long iteration = 0;
  Ordering ordering;
  double log_post = 0.0;
  bool accepted = false;     // whether the move into this iteration was accepted
  std::vector<Dag> graphs;   // per-dataset MAP graphs
};

struct ChainTrace {
  std::vector<TraceSample> samples;   // post burn-in, thinned
  std::vector<double> trajectory;     // log posterior at iterations 0..T
  std::vector<unsigned char> accepted_flags;  // per iteration 1..T
  long accepted = 0;
  long iterations = 0;
  std::string error;  // non-empty when the chain failed

  double acceptance_rate() const { return iterations ? static_cast<double>(accepted) / iterations : 0.0; }
};

// One MH transition: uniform proposal from the neighborhood, then accept with
// probability min(1, exp(new - old)). The proposal index is drawn before the
// uniform, always in that order.
ChainState mh_step(const ChainState& state, const PosteriorModel& model, Neighborhood kind, Rng& rng, bool& accepted);

ChainTrace run_chain(const ChainConfig& config, const PosteriorModel& model);

// Independent chains; `threads` workers. A failing chain records its error in
// ChainTrace::error and does not stop the others. Output order follows input.
std::vector<ChainTrace> run_ensemble(std::span<const ChainConfig> configs, const PosteriorModel& model, int threads = 1);

// Iteration count for `to` that matches the budget of `iterations` under
// `from`. The R2R/RTS to ADJ factor is p/6 (32,000 -> 213,333 at p = 40).
long equalized_iterations(long iterations, int p, Neighborhood from, Neighborhood to);

}  // namespace jod
