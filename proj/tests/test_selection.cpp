#include <doctest.h>

#include <algorithm>
#include <random>

#include "jod/equivalence.hpp"
#include "jod/error.hpp"
#include "jod/selection.hpp"
#include "jod/synth.hpp"

using namespace jod;

namespace {

Ordering shuffled(int p, Rng& rng) {
  std::vector<Node> v(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) v[static_cast<std::size_t>(i)] = i;
  std::shuffle(v.begin(), v.end(), rng);
  return Ordering(v);
}

}  // namespace

TEST_CASE("pure noise gives the empty graph") {
  Rng rng(1);
  const Dataset ds = simulate(make_weighted(Dag(6)), 5000, rng);
  const DatasetScorer sc(ds, ScoreParams{});
  CHECK(forward_backward(sc, shuffled(6, rng)).edge_count() == 0);
  CHECK(exhaustive_map(sc, Ordering::identity(6)).edge_count() == 0);
}

TEST_CASE("true ordering and large n recover the minimal I-map") {
  Rng rng(2);
  for (int rep = 0; rep < 10; ++rep) {
    const Ordering sigma = shuffled(8, rng);
    const Dag g = random_ordered_dag(8, default_edge_probability(8), sigma, rng);
    const auto scm = sample_weights(g, 0.5, 1.0, rng);
    const Dataset ds = simulate(scm, 10000, rng);
    const DatasetScorer sc(ds, ScoreParams{});
    const Dag est = forward_backward(sc, sigma);
    CHECK(est == population_minimal_imap(sigma, population_covariance(scm)));
    CHECK(est == g);
    CHECK(is_consistent(est, sigma));
  }
}

TEST_CASE("selection invariants") {
  Rng rng(3);
  for (int rep = 0; rep < 25; ++rep) {
    const int p = 5 + rep % 4;
    const Ordering truth = shuffled(p, rng);
    const Dag g = random_ordered_dag(p, 0.5, truth, rng);
    const Dataset ds = simulate(sample_weights(g, 0.5, 1.0, rng), 300, rng);
    ScoreParams params;
    params.max_indegree = 2;
    const DatasetScorer sc(ds, params);
    const Ordering sigma = shuffled(p, rng);
    const Dag est = forward_backward(sc, sigma);
    CHECK(is_consistent(est, sigma));
    for (Node j = 0; j < p; ++j) {
      CHECK(est.parents(j).size() <= 2);
      // No single deletion strictly improves the node score.
      const double here = sc.node_score(j, est.parents(j));
      est.parents(j).for_each([&](Node i) {
        NodeSet less = est.parents(j);
        less.erase(i);
        CHECK(sc.node_score(j, less) <= here);
      });
    }
    CHECK(sc.graph_score(est) >= sc.graph_score(Dag(p)));

    // Node-wise independence: a fresh scorer visiting nodes in reverse order.
    const DatasetScorer other(ds, params);
    for (int pos = p - 1; pos >= 0; --pos) {
      const Node j = sigma.at(pos);
      CHECK(forward_backward_node(other, j, predecessors(sigma, j)).parents == est.parents(j));
    }
  }
}

TEST_CASE("in-degree cap hits are counted") {
  Rng rng(4);
  Dag g(5);
  for (Node i = 0; i < 4; ++i) g.add_edge(i, 4);
  const Dataset ds = simulate(sample_weights(g, 0.8, 1.0, rng), 2000, rng);
  ScoreParams params;
  params.max_indegree = 1;
  const DatasetScorer sc(ds, params);
  const auto before = indegree_cap_hits();
  const Dag est = forward_backward(sc, Ordering::identity(5));
  CHECK(est.parents(4).size() == 1);
  CHECK(indegree_cap_hits() > before);
}

TEST_CASE("exhaustive MAP") {
  Rng rng(5);
  const Dag g = Dag::from_labeled_edges(2, {{1, 2}});
  auto scm = sample_weights(g, 0.8, 1.0, rng);
  const Dataset ds = simulate(scm, 5000, rng);
  const DatasetScorer sc(ds, ScoreParams{});
  CHECK(exhaustive_map(sc, Ordering::identity(2)) == g);
  CHECK(exhaustive_node(sc, 0, NodeSet(2)).parents.empty());

  CHECK(exhaustive_supported(8, 8));
  CHECK(exhaustive_supported(12, 4));
  CHECK_FALSE(exhaustive_supported(12, 5));
  CHECK_FALSE(exhaustive_supported(13, 2));
  const Dataset wide = simulate(make_weighted(Dag(9)), 50, rng);
  const DatasetScorer wsc(wide, ScoreParams{});
  CHECK_THROWS_AS(exhaustive_map(wsc, Ordering::identity(9)), LimitExceeded);
}

TEST_CASE("forward-backward agrees with exhaustive search at large n") {
  Rng rng(6);
  int same = 0;
  const int trials = 20;
  for (int rep = 0; rep < trials; ++rep) {
    const int p = 4 + rep % 5;
    const Ordering sigma = shuffled(p, rng);
    const Dag g = random_ordered_dag(p, default_edge_probability(p), sigma, rng);
    const Dataset ds = simulate(sample_weights(g, 0.5, 1.0, rng), 5000, rng);
    const DatasetScorer sc(ds, ScoreParams{});
    const Dag a = forward_backward(sc, sigma);
    const Dag b = exhaustive_map(sc, sigma);
    if (a == b) {
      ++same;
    } else {
      CHECK(sc.graph_score(a) == doctest::Approx(sc.graph_score(b)).epsilon(1e-8));
    }
  }
  CHECK(same >= trials - 1);
}

TEST_CASE("ordering log posterior and Bayes factor") {
  Rng rng(7);
  const Dag g = random_ordered_dag(5, 0.5, Ordering::identity(5), rng);
  std::vector<Dataset> data;
  for (int k = 0; k < 2; ++k) data.push_back(simulate(sample_weights(g, 0.5, 1.0, rng), 200, rng));
  std::vector<DatasetScorer> scorers;
  for (const auto& d : data) scorers.emplace_back(d, ScoreParams{});
  const Ordering s = Ordering::from_labels({2, 1, 3, 5, 4});
  std::vector<Dag> maps;
  for (const auto& sc : scorers) maps.push_back(forward_backward(sc, s));
  CHECK(ordering_log_posterior(scorers, s) == log_posterior(scorers, maps));
  CHECK(log_bayes_factor(s, s, scorers) == 0.0);
  CHECK(log_bayes_factor(s, Ordering::identity(5), scorers) ==
        ordering_log_posterior(scorers, s) - ordering_log_posterior(scorers, Ordering::identity(5)));
}
