#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

#include "jod/dataset.hpp"
#include "jod/equivalence.hpp"
#include "jod/error.hpp"
#include "jod/scoring.hpp"
#include "jod/synth.hpp"

using namespace jod;

namespace {

Dataset random_dataset(int n, int p, std::mt19937_64& rng) {
  std::normal_distribution<double> z;
  std::vector<double> cols(static_cast<std::size_t>(n * p));
  for (auto& v : cols) v = z(rng);
  // Mix columns so predictors are correlated.
  for (int j = 1; j < p; ++j) {
    for (int r = 0; r < n; ++r) cols[static_cast<std::size_t>(j * n + r)] += 0.5 * cols[static_cast<std::size_t>((j - 1) * n + r)];
  }
  return Dataset::from_columns(n, p, std::move(cols));
}

NodeSet make_set(int p, std::initializer_list<Node> nodes) {
  NodeSet s(p);
  for (Node v : nodes) s.insert(v);
  return s;
}

// Least squares on the raw centered matrix.
double eigen_residual_variance(const Dataset& ds, Node j, const NodeSet& s) {
  const int n = ds.n();
  Eigen::VectorXd y(n);
  for (int r = 0; r < n; ++r) y(r) = ds.value(r, j);
  const auto members = s.members();
  if (members.empty()) return y.squaredNorm() / n;
  Eigen::MatrixXd X(n, static_cast<int>(members.size()));
  for (int c = 0; c < static_cast<int>(members.size()); ++c) {
    for (int r = 0; r < n; ++r) X(r, c) = ds.value(r, members[static_cast<std::size_t>(c)]);
  }
  const Eigen::VectorXd beta = X.colPivHouseholderQr().solve(y);
  return (y - X * beta).squaredNorm() / n;
}

}  // namespace

TEST_CASE("dataset centering, gram and csv round trip") {
  std::mt19937_64 rng(1);
  const Dataset ds = random_dataset(57, 5, rng);
  for (int j = 0; j < 5; ++j) {
    double mean = 0.0;
    for (int r = 0; r < 57; ++r) mean += ds.value(r, j);
    CHECK(std::abs(mean / 57) < 1e-10);
    for (int i = 0; i < 5; ++i) {
      double g = 0.0;
      for (int r = 0; r < 57; ++r) g += ds.value(r, i) * ds.value(r, j);
      CHECK(ds.gram(i, j) == doctest::Approx(g).epsilon(1e-8));
      CHECK(ds.gram(i, j) == ds.gram(j, i));
    }
  }
  std::stringstream buf;
  write_dataset_csv(buf, ds);
  CHECK(buf.str().rfind("x1,x2,x3,x4,x5\n", 0) == 0);
  const Dataset back = read_dataset_csv(buf);
  CHECK(back.n() == 57);
  for (int j = 0; j < 5; ++j) {
    for (int r = 0; r < 57; ++r) CHECK(std::abs(back.value(r, j) - ds.value(r, j)) < 1e-14);
  }
  std::istringstream ragged("x1,x2\n1,2\n3\n");
  CHECK_THROWS_AS(read_dataset_csv(ragged), IoError);

  const std::vector<double> rows{1, 2, 3, 4, 5, 7};
  const Dataset a = Dataset::from_rows(3, 2, rows);
  const Dataset b = Dataset::from_columns(3, 2, {1, 3, 5, 2, 4, 7});
  CHECK(a.gram_matrix() == b.gram_matrix());
}

TEST_CASE("residual variance examples") {
  const Dataset ds = Dataset::from_columns(3, 2, {1, -1, 0, 1, 1, -2});
  const DatasetScorer sc(ds, ScoreParams{});
  CHECK(sc.residual_variance(1, make_set(2, {0})) == doctest::Approx(2.0));
  CHECK(sc.residual_variance(1, NodeSet(2)) == doctest::Approx(2.0));
  CHECK(sc.residual_variance(0, NodeSet(2)) == doctest::Approx(2.0 / 3.0));

  // X3 = X1 + 2 X2 exactly.
  const Dataset span = Dataset::from_columns(4, 3, {1, 2, -1, 0, 0, 1, 3, -2, 1, 4, 5, -4});
  const DatasetScorer ssc(span, ScoreParams{});
  CHECK(ssc.residual_variance(2, make_set(3, {0, 1})) < 1e-12);
  CHECK(ssc.try_node_score(2, make_set(3, {0, 1})).status == ScoreStatus::degenerate);
  CHECK_THROWS_AS(ssc.node_score(2, make_set(3, {0, 1})), DegenerateVariance);

  // Duplicate predictor columns.
  const Dataset dup = Dataset::from_columns(4, 3, {1, 2, -1, 0, 1, 2, -1, 0, 3, 1, 4, 1});
  const DatasetScorer dsc(dup, ScoreParams{});
  CHECK_THROWS_AS(dsc.residual_variance(2, make_set(3, {0, 1})), SingularDesign);
  CHECK(dsc.try_node_score(2, make_set(3, {0, 1})).status == ScoreStatus::singular);
  CHECK_THROWS_AS(dsc.node_score(2, make_set(3, {0, 1})), SingularDesign);
  CHECK_THROWS_AS(dsc.node_score(2, make_set(3, {2})), ValidationError);
}

TEST_CASE("residual variance matches least squares and shrinks with S") {
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 60; ++rep) {
    const int p = 6;
    const Dataset ds = random_dataset(40 + rep, p, rng);
    const DatasetScorer sc(ds, ScoreParams{});
    std::uniform_int_distribution<int> pick(0, p - 1);
    const Node j = pick(rng);
    NodeSet s(p);
    double prev = sc.residual_variance(j, s);
    for (int step = 0; step < 4; ++step) {
      Node v = pick(rng);
      if (v == j || s.contains(v)) continue;
      s.insert(v);
      const double w = sc.residual_variance(j, s);
      CHECK(w == doctest::Approx(eigen_residual_variance(ds, j, s)).epsilon(1e-8));
      CHECK(w <= prev * (1 + 1e-12));
      prev = w;
    }
  }
}

TEST_CASE("node score formula") {
  // Alternating +-1 column: centered, variance exactly 1.
  const int n = 100;
  std::vector<double> cols(static_cast<std::size_t>(3 * n));
  for (int r = 0; r < n; ++r) {
    cols[static_cast<std::size_t>(r)] = r % 2 ? 1.0 : -1.0;
    cols[static_cast<std::size_t>(n + r)] = (r / 2) % 2 ? 1.0 : -1.0;  // orthogonal to column 1
    cols[static_cast<std::size_t>(2 * n + r)] = 0.3 * r;
  }
  const Dataset ds = Dataset::from_columns(n, 3, cols);
  ScoreParams params;
  params.alpha = 1.0;
  const DatasetScorer sc(ds, params);
  CHECK(sc.node_score(0, NodeSet(3)) == doctest::Approx(-50.0 * std::log(100.0)));
  // Column 2 is orthogonal to column 1, so omega is unchanged and only the
  // edge penalty applies.
  CHECK(sc.residual_variance(0, make_set(3, {1})) == doctest::Approx(1.0));
  CHECK(sc.node_score(0, make_set(3, {1})) - sc.node_score(0, NodeSet(3)) ==
        doctest::Approx(-params.edge_penalty(3)).epsilon(1e-12));
  CHECK(params.edge_penalty(3) == doctest::Approx(3.0 * std::log(3.0) + 0.5 * std::log(1.0 + 1.0 / 0.01)));
}

TEST_CASE("score increment identity") {
  std::mt19937_64 rng(3);
  ScoreParams params;
  params.kappa = 1.5;
  for (int rep = 0; rep < 50; ++rep) {
    const Dataset ds = random_dataset(80, 5, rng);
    const DatasetScorer sc(ds, params);
    const NodeSet s = make_set(5, {1});
    NodeSet t = s;
    t.insert(3);
    const double lhs = sc.node_score(4, t) - sc.node_score(4, s);
    const double rhs = -params.edge_penalty(5) +
                       ((params.alpha * 80 + params.kappa) / 2) * std::log(sc.residual_variance(4, s) / sc.residual_variance(4, t));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("score equivalence on Markov-equivalent DAGs") {
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 40; ++rep) {
    const int p = 3 + rep % 5;
    const Dataset ds = random_dataset(50, p, rng);
    const DatasetScorer sc(ds, ScoreParams{});
    const Dag g = random_ordered_dag(p, 0.6, Ordering::identity(p), rng);
    for (const Edge& e : covered_edges(g)) {
      Dag h = g;
      h.reverse_edge(e.tail, e.head);
      const double a = sc.graph_score(g), b = sc.graph_score(h);
      CHECK(std::abs(a - b) <= 1e-8 * std::abs(a));
    }
  }
  // Two-column special case.
  const Dataset two = random_dataset(30, 2, rng);
  const DatasetScorer sc2(two, ScoreParams{});
  CHECK(sc2.graph_score(Dag::from_labeled_edges(2, {{1, 2}})) ==
        doctest::Approx(sc2.graph_score(Dag::from_labeled_edges(2, {{2, 1}}))).epsilon(1e-12));
}

TEST_CASE("graph score and log posterior") {
  std::mt19937_64 rng(5);
  const Dataset ds = random_dataset(60, 4, rng);
  ScoreParams capped;
  capped.max_indegree = 1;
  const DatasetScorer sc(ds, capped);
  double empty = 0.0;
  for (int j = 0; j < 4; ++j) empty += sc.node_score(j, NodeSet(4));
  CHECK(sc.graph_score(Dag(4)) == doctest::Approx(empty));
  CHECK_THROWS_AS(sc.graph_score(Dag::from_labeled_edges(4, {{1, 3}, {2, 3}})), ValidationError);
  CHECK_THROWS_AS(sc.graph_score(Dag(3)), ValidationError);

  std::vector<DatasetScorer> scorers;
  scorers.emplace_back(ds, ScoreParams{});
  const std::vector<Dag> graphs{Dag::from_labeled_edges(4, {{1, 2}})};
  CHECK(log_posterior(scorers, graphs) == scorers[0].graph_score(graphs[0]));
}

TEST_CASE("params validation") {
  ScoreParams p;
  CHECK_NOTHROW(p.validate());
  p.alpha = 0.0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = {};
  p.gamma = -1;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = {};
  p.c0 = 0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = {};
  CHECK(p.indegree_cap(7) == 7);
  p.max_indegree = 3;
  CHECK(p.indegree_cap(7) == 3);
}

TEST_CASE("memo cache is concurrency-safe and transparent") {
  std::mt19937_64 rng(6);
  const Dataset ds = random_dataset(100, 8, rng);
  const DatasetScorer shared(ds, ScoreParams{});
  const DatasetScorer fresh(ds, ScoreParams{});
  std::vector<NodeSet> sets;
  for (int mask = 0; mask < 128; ++mask) {
    NodeSet s(8);
    for (int b = 0; b < 7; ++b) {
      if (mask >> b & 1) s.insert(b);
    }
    sets.push_back(s);
  }
  std::vector<double> got(sets.size() * 4);
  {
    std::vector<std::jthread> workers;
    for (int w = 0; w < 4; ++w) {
      workers.emplace_back([&, w] {
        for (std::size_t i = 0; i < sets.size(); ++i) got[static_cast<std::size_t>(w) * sets.size() + i] = shared.node_score(7, sets[i]);
      });
    }
  }
  for (int w = 0; w < 4; ++w) {
    for (std::size_t i = 0; i < sets.size(); ++i) CHECK(got[static_cast<std::size_t>(w) * sets.size() + i] == fresh.node_score(7, sets[i]));
  }
  CHECK(shared.cache_entries() == sets.size());
  shared.clear_cache();
  CHECK(shared.cache_entries() == 0);
}
