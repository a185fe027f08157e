#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <random>
#include <set>

#include "jod/equivalence.hpp"
#include "jod/error.hpp"
#include "jod/synth.hpp"

using namespace jod;

namespace {

Dag random_dag(int p, double prob, std::mt19937_64& rng) {
  std::vector<Node> order(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) order[static_cast<std::size_t>(i)] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::bernoulli_distribution coin(prob);
  Dag g(p);
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      if (coin(rng)) g.add_edge(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }
  }
  return g;
}

// Every acyclic orientation of g's skeleton with g's v-structures.
std::set<Dag> brute_force_class(const Dag& g) {
  const auto skel = skeleton(g);
  const auto vs = v_structures(g);
  std::set<Dag> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << skel.size()); ++mask) {
    Dag h(g.size());
    for (std::size_t e = 0; e < skel.size(); ++e) {
      const auto [a, b] = skel[e];
      if (mask >> e & 1U) {
        h.add_edge(b, a);
      } else {
        h.add_edge(a, b);
      }
    }
    if (h.is_acyclic() && v_structures(h) == vs) out.insert(h);
  }
  return out;
}

WeightedDag remark2_scm() {
  const double a = 0.8, c = 0.6;
  const double b = -a * c - c / a;
  WeightedDag w = make_weighted(Dag::from_labeled_edges(3, {{1, 2}, {1, 3}, {2, 3}}));
  w.set_weight(0, 1, a);
  w.set_weight(0, 2, b);
  w.set_weight(1, 2, c);
  return w;
}

std::vector<Ordering> sorted(std::vector<Ordering> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST_CASE("markov equivalence examples") {
  CHECK(markov_equivalent(Dag::from_labeled_edges(2, {{1, 2}}), Dag::from_labeled_edges(2, {{2, 1}})));
  CHECK_FALSE(markov_equivalent(Dag::from_labeled_edges(3, {{1, 3}, {2, 3}}), Dag::from_labeled_edges(3, {{3, 1}, {2, 3}})));
  CHECK(markov_equivalent(Dag::from_labeled_edges(3, {{1, 2}, {2, 3}}), Dag::from_labeled_edges(3, {{3, 2}, {2, 1}})));
}

TEST_CASE("equivalence class examples") {
  const auto collider = equivalence_class(Dag::from_labeled_edges(3, {{1, 3}, {2, 3}}));
  CHECK(collider.members.size() == 1);
  CHECK(collider.essential == std::vector<Edge>{{0, 2}, {1, 2}});

  const auto chain = equivalence_class(Dag::from_labeled_edges(3, {{1, 2}, {2, 3}}));
  CHECK(chain.members.size() == 3);
  CHECK(chain.essential.empty());
  CHECK(std::binary_search(chain.members.begin(), chain.members.end(), Dag::from_labeled_edges(3, {{2, 1}, {2, 3}})));
  CHECK(std::binary_search(chain.members.begin(), chain.members.end(), Dag::from_labeled_edges(3, {{3, 2}, {2, 1}})));

  CHECK_THROWS_AS(equivalence_class(Dag(11)), LimitExceeded);
}

TEST_CASE("star graph with centre 2 (three-leaf tree)") {
  // G1 = {3->2, 2->1, 2->4}. Every choice of root orients a tree without
  // colliders, so the class has one member per node: 4 DAGs, including
  // G2 = {4->2, 2->1, 2->3}. Each leaf-rooted member has 2 linear
  // extensions and the centre-rooted member has 3! = 6, giving 12.
  const auto g1 = Dag::from_labeled_edges(4, {{3, 2}, {2, 1}, {2, 4}});
  const auto g2 = Dag::from_labeled_edges(4, {{4, 2}, {2, 1}, {2, 3}});
  const auto cls = equivalence_class(g1);
  CHECK(cls.essential.empty());
  CHECK(cls.members.size() == 4);
  CHECK(std::binary_search(cls.members.begin(), cls.members.end(), g2));
  const auto e1 = g1.edges();
  CHECK(linear_extensions(4, e1).size() == 2);
  const auto all = class_orderings(cls);
  CHECK(all.size() == 12);
  CHECK(linear_extensions(4, cls.essential).size() == 24);
  // Restricted to the three leaf-rooted members the union has 6 orderings.
  std::set<Ordering> leaf_rooted;
  for (const auto& m : cls.members) {
    if (m.parents(1).empty()) continue;  // centre is the root
    const auto e = m.edges();
    for (const auto& s : linear_extensions(4, e)) leaf_rooted.insert(s);
  }
  CHECK(leaf_rooted.size() == 6);
}

TEST_CASE("class closure agrees with brute-force orientation enumeration") {
  std::mt19937_64 rng(10);
  for (int rep = 0; rep < 150; ++rep) {
    const int p = 3 + rep % 3;
    const Dag g = random_dag(p, 0.5, rng);
    const auto cls = equivalence_class(g);
    const auto brute = brute_force_class(g);
    CHECK(std::set<Dag>(cls.members.begin(), cls.members.end()) == brute);
    for (const auto& m : cls.members) {
      CHECK(skeleton(m) == skeleton(g));
      CHECK(v_structures(m) == v_structures(g));
    }
    // Essential arrows: oriented the same way in every member.
    std::vector<Edge> expect;
    for (const Edge& e : g.edges()) {
      if (std::all_of(brute.begin(), brute.end(), [&](const Dag& m) { return m.has_edge(e.tail, e.head); })) expect.push_back(e);
    }
    CHECK(cls.essential == expect);
  }
}

TEST_CASE("class orderings are contained in the essential-arrow extensions") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 60; ++rep) {
    const int p = 3 + rep % 4;
    const auto cls = equivalence_class(random_dag(p, 0.5, rng));
    const auto lu = class_orderings(cls);
    const auto le = linear_extensions(p, cls.essential);
    for (const auto& s : lu) CHECK(std::binary_search(le.begin(), le.end(), s));
  }
}

TEST_CASE("first edge of the true ordering is never essential") {
  for (int p = 3; p <= 5; ++p) {
    const Ordering id = Ordering::identity(p);
    const int pairs = p * (p - 1) / 2;
    for (int mask = 0; mask < (1 << pairs); ++mask) {
      Dag g(p);
      int bit = 0;
      for (int i = 0; i < p; ++i) {
        for (int j = i + 1; j < p; ++j, ++bit) {
          if (mask >> bit & 1) g.add_edge(i, j);
        }
      }
      if (!g.has_edge(0, 1)) continue;
      const auto cls = equivalence_class(g);
      CHECK_FALSE(std::binary_search(cls.essential.begin(), cls.essential.end(), Edge{0, 1}));
    }
  }
}

TEST_CASE("linear extensions") {
  CHECK(linear_extensions(3, std::vector<Edge>{}).size() == 6);
  const std::vector<Edge> chain{{0, 1}, {1, 2}};
  CHECK(linear_extensions(3, chain) == std::vector<Ordering>{Ordering::identity(3)});
  const std::vector<Edge> cyc{{0, 1}, {1, 0}};
  CHECK_THROWS_AS(linear_extensions(2, cyc), ValidationError);
  // Brute force against filtering all permutations.
  std::mt19937_64 rng(12);
  for (int rep = 0; rep < 30; ++rep) {
    const Dag g = random_dag(5, 0.4, rng);
    std::vector<Ordering> expect;
    for (const auto& s : all_orderings(5)) {
      if (is_consistent(g, s)) expect.push_back(s);
    }
    const auto e = g.edges();
    CHECK(linear_extensions(5, e) == expect);
  }
}

TEST_CASE("e_max") {
  CHECK(e_max(Ordering::identity(4)) == std::vector<Edge>{{0, 2}, {1, 2}, {2, 3}});
  CHECK(e_max(Ordering::from_labels({2, 1, 3})) == std::vector<Edge>{{0, 2}, {1, 2}});
  for (int p = 3; p <= 8; ++p) CHECK(e_max(Ordering::identity(p)).size() == static_cast<std::size_t>(p - 1));
  CHECK_THROWS_AS(e_max(Ordering::identity(2)), ValidationError);
  CHECK(swap_leading_pair(Ordering::identity(3)) == Ordering::from_labels({2, 1, 3}));
}

TEST_CASE("population covariance") {
  const auto empty = population_covariance(make_weighted(Dag(3)));
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) CHECK(empty.at(i, j) == (i == j ? 1.0 : 0.0));
  }
  auto w = make_weighted(Dag::from_labeled_edges(2, {{1, 2}}));
  w.set_weight(0, 1, 0.7);
  const auto c = population_covariance(w);
  CHECK(c.at(1, 1) == doctest::Approx(1.49));
  CHECK(c.at(0, 1) == doctest::Approx(0.7));

  // Against (I - B^T)^{-1} Omega (I - B)^{-1}.
  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 20; ++rep) {
    const int p = 6;
    auto scm = sample_weights(random_dag(p, 0.5, rng), 0.5, 1.0, rng);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    for (auto& v : scm.noise_vars) v = u(rng);
    Eigen::MatrixXd B(p, p), O = Eigen::MatrixXd::Zero(p, p);
    for (int i = 0; i < p; ++i) {
      O(i, i) = scm.noise_vars[static_cast<std::size_t>(i)];
      for (int j = 0; j < p; ++j) B(i, j) = scm.weight(i, j);
    }
    const Eigen::MatrixXd A = (Eigen::MatrixXd::Identity(p, p) - B).inverse();
    const Eigen::MatrixXd S = A.transpose() * O * A;
    const auto cov = population_covariance(scm);
    for (int i = 0; i < p; ++i) {
      for (int j = 0; j < p; ++j) CHECK(cov.at(i, j) == doctest::Approx(S(i, j)).epsilon(1e-12));
    }
    CHECK_NOTHROW(cov.validate());
  }
  Covariance bad{2, {1.0, 0.5, 0.4, 1.0}};
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("population minimal I-map") {
  std::mt19937_64 rng(14);
  for (int rep = 0; rep < 30; ++rep) {
    const Ordering id = Ordering::identity(6);
    const Dag g = random_ordered_dag(6, 0.5, id, rng);
    const auto cov = population_covariance(sample_weights(g, 0.5, 1.0, rng));
    CHECK(population_minimal_imap(id, cov) == g);
  }
  Covariance diag{3, {2, 0, 0, 0, 1, 0, 0, 0, 3}};
  for (const auto& s : all_orderings(3)) {
    CHECK(population_minimal_imap(s, diag).edge_count() == 0);
    CHECK(psi1(s, diag) == 0);
  }
  auto full = make_weighted(Dag::from_labeled_edges(3, {{1, 2}, {1, 3}, {2, 3}}));
  full.set_weight(0, 1, 0.9);
  full.set_weight(0, 2, 0.7);
  full.set_weight(1, 2, -0.6);
  CHECK(psi1(Ordering::identity(3), population_covariance(full)) == -3);
}

TEST_CASE("remark 2 unfaithful construction") {
  const auto cov = population_covariance(remark2_scm());
  CHECK(std::abs(cov.at(1, 2)) < 1e-12);
  const auto s = Ordering::from_labels({2, 3, 1});
  CHECK(population_minimal_imap(s, cov) == Dag::from_labeled_edges(3, {{2, 1}, {3, 1}}));
  CHECK(psi1(s, cov) == -2);
  CHECK(psi1(Ordering::identity(3), cov) == -3);
}

TEST_CASE("joint argmax") {
  SUBCASE("single collider") {
    const auto g = Dag::from_labeled_edges(3, {{1, 3}, {2, 3}});
    std::mt19937_64 rng(15);
    const std::vector<WeightedDag> scms{sample_weights(g, 0.5, 1.0, rng)};
    const auto res = joint_argmax(scms);
    const auto e = g.edges();
    CHECK(res.argmax == linear_extensions(3, e));
    CHECK(res.argmax.size() == 2);
    CHECK(res.class_intersection == res.argmax);
    CHECK(res.best_score == -2);
  }
  SUBCASE("thread count does not change the result") {
    std::mt19937_64 rng(16);
    std::vector<WeightedDag> scms;
    for (int k = 0; k < 3; ++k) scms.push_back(sample_weights(random_dag(5, 0.5, rng), 0.5, 1.0, rng));
    const auto a = joint_argmax(scms, kDefaultCoefficientTol, 1);
    const auto b = joint_argmax(scms, kDefaultCoefficientTol, 3);
    CHECK(a.argmax == b.argmax);
    CHECK(a.best_score == b.best_score);
    CHECK(a.essential_union == b.essential_union);
  }
  SUBCASE("lemma 1 on random faithful collections") {
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 10; ++rep) {
      const Ordering star = Ordering::identity(4);
      std::vector<WeightedDag> scms;
      for (int k = 0; k < 2; ++k) scms.push_back(sample_weights(random_ordered_dag(4, 0.6, star, rng), 0.5, 1.0, rng));
      const auto res = joint_argmax(scms);
      CHECK(res.argmax == sorted(res.class_intersection));
    }
  }
  CHECK_THROWS_AS(all_orderings(9), LimitExceeded);
}
