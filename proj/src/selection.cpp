#include "jod/selection.hpp"

#include <limits>
#include <string>

#include "jod/error.hpp"

namespace jod {

namespace {

std::atomic<std::size_t> g_cap_hits{0};

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

std::size_t indegree_cap_hits() { return g_cap_hits.load(); }

ParentChoice forward_backward_node(const DatasetScorer& scorer, Node j, const NodeSet& candidates) {
  const int cap = scorer.params().indegree_cap(scorer.p());
  NodeSet current(scorer.p());
  NodeScore current_score = scorer.try_node_score(j, current);
  if (!current_score.ok()) return {current, current_score};

  // Forward.
  while (true) {
    double best_gain = kNegInf;
    Node best = -1;
    NodeScore best_score;
    bool any_candidate = false;
    candidates.for_each([&](Node i) {
      if (current.contains(i)) return;
      any_candidate = true;
      NodeSet trial = current;
      trial.insert(i);
      const NodeScore s = scorer.try_node_score(j, trial);
      if (!s.ok()) return;
      const double gain = s.value - current_score.value;
      if (gain > best_gain) {
        best_gain = gain;
        best = i;
        best_score = s;
      }
    });
    if (!any_candidate || best < 0 || !(best_gain > 0.0)) break;
    if (current.size() >= cap) {
      g_cap_hits.fetch_add(1, std::memory_order_relaxed);
      break;
    }
    current.insert(best);
    current_score = best_score;
  }

  // Backward.
  while (!current.empty()) {
    double best_gain = kNegInf;
    Node best = -1;
    NodeScore best_score;
    current.for_each([&](Node i) {
      NodeSet trial = current;
      trial.erase(i);
      const NodeScore s = scorer.try_node_score(j, trial);
      if (!s.ok()) return;
      const double gain = s.value - current_score.value;
      if (gain > best_gain) {
        best_gain = gain;
        best = i;
        best_score = s;
      }
    });
    if (best < 0 || !(best_gain > 0.0)) break;
    current.erase(best);
    current_score = best_score;
  }
  return {current, current_score};
}

Dag forward_backward(const DatasetScorer& scorer, const Ordering& sigma) {
  if (sigma.size() != scorer.p()) throw ValidationError("ordering and dataset differ in size");
  Dag g(scorer.p());
  for (int t = 0; t < sigma.size(); ++t) {
    const Node j = sigma.at(t);
    g.set_parents(j, forward_backward_node(scorer, j, predecessors(sigma, j)).parents);
  }
  return g;
}

bool exhaustive_supported(int p, int indegree_cap) { return p <= 8 || (p <= 12 && indegree_cap <= 4); }

ParentChoice exhaustive_node(const DatasetScorer& scorer, Node j, const NodeSet& candidates) {
  const int cap = scorer.params().indegree_cap(scorer.p());
  const auto pool = candidates.members();
  const int m = static_cast<int>(pool.size());
  ParentChoice best{NodeSet(scorer.p()), {kNegInf, ScoreStatus::degenerate}};
  bool found = false;
  // Sizes ascending, combinations in lexicographic order; only a strictly
  // better score replaces the incumbent.
  std::vector<int> idx;
  for (int k = 0; k <= std::min(cap, m); ++k) {
    idx.resize(static_cast<std::size_t>(k));
    for (int a = 0; a < k; ++a) idx[static_cast<std::size_t>(a)] = a;
    while (true) {
      NodeSet s(scorer.p());
      for (int a : idx) s.insert(pool[static_cast<std::size_t>(a)]);
      const NodeScore sc = scorer.try_node_score(j, s);
      if (sc.ok() && (!found || sc.value > best.score.value)) {
        best = {s, sc};
        found = true;
      }
      int a = k - 1;
      while (a >= 0 && idx[static_cast<std::size_t>(a)] == m - k + a) --a;
      if (a < 0) break;
      ++idx[static_cast<std::size_t>(a)];
      for (int b = a + 1; b < k; ++b) idx[static_cast<std::size_t>(b)] = idx[static_cast<std::size_t>(b - 1)] + 1;
    }
  }
  if (!found) best.score = scorer.try_node_score(j, NodeSet(scorer.p()));
  return best;
}

Dag exhaustive_map(const DatasetScorer& scorer, const Ordering& sigma) {
  const int p = scorer.p();
  if (sigma.size() != p) throw ValidationError("ordering and dataset differ in size");
  if (!exhaustive_supported(p, scorer.params().indegree_cap(p))) {
    throw LimitExceeded("exhaustive MAP search limited to p <= 12 with d <= 4, or p <= 8");
  }
  Dag g(p);
  for (Node j = 0; j < p; ++j) g.set_parents(j, exhaustive_node(scorer, j, predecessors(sigma, j)).parents);
  return g;
}

double ordering_log_posterior(std::span<const DatasetScorer> scorers, const Ordering& sigma) {
  double total = 0.0;
  for (const auto& s : scorers) {
    for (Node j = 0; j < s.p(); ++j) {
      const NodeScore sc = forward_backward_node(s, j, predecessors(sigma, j)).score;
      if (!sc.ok()) return kNegInf;
      total += sc.value;
    }
  }
  return total;
}

double log_bayes_factor(const Ordering& sigma, const Ordering& tau, std::span<const DatasetScorer> scorers) {
  return ordering_log_posterior(scorers, sigma) - ordering_log_posterior(scorers, tau);
}

}  // namespace jod
