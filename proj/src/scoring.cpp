#include "jod/scoring.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "jod/error.hpp"
#include "jod/linalg.hpp"

namespace jod {

void ScoreParams::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ValidationError("alpha must lie in (0, 1]");
  if (!(gamma > 0.0)) throw ValidationError("gamma must be positive");
  if (!(kappa >= 0.0)) throw ValidationError("kappa must be non-negative");
  if (!(c0 > 0.0)) throw ValidationError("c0 must be positive");
  if (max_indegree < 0) throw ValidationError("max in-degree must be positive (or 0 for unbounded)");
}

double ScoreParams::edge_penalty(int p) const { return c0 * std::log(static_cast<double>(p)) + 0.5 * std::log1p(alpha / gamma); }

DatasetScorer::DatasetScorer(const Dataset& data, ScoreParams params)
    : data_(&data),
      params_(params),
      edge_penalty_(params.edge_penalty(data.p())),
      likelihood_weight_((params.alpha * data.n() + params.kappa) / 2.0),
      shards_(std::make_unique<Shard[]>(static_cast<std::size_t>(data.p()))) {
  params_.validate();
}

NodeScore DatasetScorer::compute_rss(Node j, const NodeSet& parents) const {
  const double gjj = data_->gram(j, j);
  const auto members = parents.members();
  const int m = static_cast<int>(members.size());
  if (m == 0) return {gjj, ScoreStatus::ok};
  const auto um = static_cast<std::size_t>(m);
  std::vector<double> block(um * um);
  std::vector<double> rhs(um);
  for (std::size_t a = 0; a < um; ++a) {
    rhs[a] = data_->gram(members[a], j);
    for (std::size_t b = 0; b <= a; ++b) block[a * um + b] = data_->gram(members[a], members[b]);
  }
  if (linalg::cholesky(block, m, kSingularPivotTol) != linalg::FactorStatus::ok) {
    return {0.0, ScoreStatus::singular};
  }
  // G_jj - G_jS G_SS^{-1} G_Sj = G_jj - |L^{-1} G_Sj|^2
  linalg::forward_substitute(block, m, rhs);
  double explained = 0.0;
  for (double v : rhs) explained += v * v;
  return {gjj - explained, ScoreStatus::ok};
}

NodeScore DatasetScorer::try_rss(Node j, const NodeSet& parents) const {
  Shard& shard = shards_[static_cast<std::size_t>(j)];
  {
    std::lock_guard lock(shard.mutex);
    if (auto it = shard.rss.find(parents); it != shard.rss.end()) return it->second;
  }
  const NodeScore r = compute_rss(j, parents);
  std::lock_guard lock(shard.mutex);
  shard.rss.emplace(parents, r);
  return r;
}

double DatasetScorer::residual_variance(Node j, const NodeSet& parents) const {
  if (parents.contains(j)) throw ValidationError("node cannot be its own predecessor");
  if (parents.size() >= data_->n()) throw ValidationError("more predictors than samples");
  const NodeScore r = try_rss(j, parents);
  if (r.status == ScoreStatus::singular) {
    throw SingularDesign("collinear predictors for node " + std::to_string(j + 1));
  }
  return std::max(r.value, 0.0) / data_->n();
}

NodeScore DatasetScorer::try_node_score(Node j, const NodeSet& parents) const {
  const NodeScore r = try_rss(j, parents);
  if (!r.ok()) return r;
  const double floor = kVarianceFloor * data_->gram(j, j);
  if (!(r.value > floor)) return {-std::numeric_limits<double>::infinity(), ScoreStatus::degenerate};
  return {-edge_penalty_ * parents.size() - likelihood_weight_ * std::log(r.value), ScoreStatus::ok};
}

double DatasetScorer::node_score(Node j, const NodeSet& parents) const {
  if (parents.contains(j)) throw ValidationError("node cannot be its own predecessor");
  const NodeScore s = try_node_score(j, parents);
  switch (s.status) {
    case ScoreStatus::ok: return s.value;
    case ScoreStatus::singular: throw SingularDesign("collinear predictors for node " + std::to_string(j + 1));
    case ScoreStatus::degenerate:
      throw DegenerateVariance("residual variance of node " + std::to_string(j + 1) + " hit the floor");
  }
  return s.value;
}

double DatasetScorer::graph_score(const Dag& g) const {
  if (g.size() != p()) throw ValidationError("graph and dataset differ in size");
  const int cap = params_.indegree_cap(p());
  double total = 0.0;
  for (Node j = 0; j < g.size(); ++j) {
    if (g.parents(j).size() > cap) throw ValidationError("in-degree exceeds the configured maximum");
    total += node_score(j, g.parents(j));
  }
  return total;
}

std::size_t DatasetScorer::cache_entries() const {
  std::size_t n = 0;
  for (int j = 0; j < p(); ++j) {
    std::lock_guard lock(shards_[static_cast<std::size_t>(j)].mutex);
    n += shards_[static_cast<std::size_t>(j)].rss.size();
  }
  return n;
}

void DatasetScorer::clear_cache() const {
  for (int j = 0; j < p(); ++j) {
    std::lock_guard lock(shards_[static_cast<std::size_t>(j)].mutex);
    shards_[static_cast<std::size_t>(j)].rss.clear();
  }
}

double log_posterior(std::span<const DatasetScorer> scorers, std::span<const Dag> map_graphs) {
  if (scorers.size() != map_graphs.size()) throw ValidationError("one MAP graph per dataset required");
  double total = 0.0;
  for (std::size_t k = 0; k < scorers.size(); ++k) total += scorers[k].graph_score(map_graphs[k]);
  return total;
}

}  // namespace jod
