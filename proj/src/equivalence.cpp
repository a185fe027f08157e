#include "jod/equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <iterator>
#include <set>
#include <string>
#include <thread>

#include "jod/error.hpp"
#include "jod/linalg.hpp"

namespace jod {

void Covariance::validate() const {
  if (matrix.size() != static_cast<std::size_t>(p) * static_cast<std::size_t>(p)) {
    throw ValidationError("covariance has wrong shape");
  }
  for (Node i = 0; i < p; ++i) {
    for (Node j = i + 1; j < p; ++j) {
      if (std::abs(at(i, j) - at(j, i)) > 1e-12) throw ValidationError("covariance is not symmetric");
    }
  }
  std::vector<double> work = matrix;
  if (linalg::cholesky(work, p, 0.0) != linalg::FactorStatus::ok) {
    throw NumericalError("covariance is not positive definite");
  }
}

bool markov_equivalent(const Dag& g, const Dag& h) {
  if (g.size() != h.size()) throw ValidationError("graphs differ in size");
  return skeleton(g) == skeleton(h) && v_structures(g) == v_structures(h);
}

EquivalenceClass equivalence_class(const Dag& g, int limit) {
  if (g.size() > limit) {
    throw LimitExceeded("equivalence class search limited to p <= " + std::to_string(limit));
  }
  std::set<Dag> seen{g};
  std::deque<Dag> frontier{g};
  while (!frontier.empty()) {
    Dag cur = std::move(frontier.front());
    frontier.pop_front();
    for (const Edge& e : covered_edges(cur)) {
      Dag next = cur;
      next.reverse_edge(e.tail, e.head);
      if (seen.insert(next).second) frontier.push_back(std::move(next));
    }
  }
  EquivalenceClass cls;
  cls.members.assign(seen.begin(), seen.end());
  for (const Edge& e : g.edges()) {
    const bool fixed = std::all_of(cls.members.begin(), cls.members.end(),
                                   [&](const Dag& m) { return m.has_edge(e.tail, e.head); });
    if (fixed) cls.essential.push_back(e);
  }
  return cls;
}

std::vector<Ordering> linear_extensions(int p, std::span<const Edge> edges, int limit) {
  if (p > limit) throw LimitExceeded("linear extension enumeration limited to p <= " + std::to_string(limit));
  Dag g(p);
  for (const Edge& e : edges) g.add_edge(e.tail, e.head);
  if (!g.is_acyclic()) throw ValidationError("edge set contains a directed cycle");

  std::vector<int> remaining_parents(static_cast<std::size_t>(p));
  for (Node j = 0; j < p; ++j) remaining_parents[static_cast<std::size_t>(j)] = g.parents(j).size();
  std::vector<bool> placed(static_cast<std::size_t>(p), false);
  std::vector<Node> prefix;
  std::vector<Ordering> out;

  // Backtracking: place any unplaced node whose parents are all placed.
  auto recurse = [&](auto&& self) -> void {
    if (static_cast<int>(prefix.size()) == p) {
      out.emplace_back(prefix);
      return;
    }
    for (Node v = 0; v < p; ++v) {
      if (placed[static_cast<std::size_t>(v)] || remaining_parents[static_cast<std::size_t>(v)] != 0) continue;
      placed[static_cast<std::size_t>(v)] = true;
      prefix.push_back(v);
      g.children(v).for_each([&](Node c) { --remaining_parents[static_cast<std::size_t>(c)]; });
      self(self);
      g.children(v).for_each([&](Node c) { ++remaining_parents[static_cast<std::size_t>(c)]; });
      prefix.pop_back();
      placed[static_cast<std::size_t>(v)] = false;
    }
  };
  recurse(recurse);
  return out;
}

std::vector<Ordering> class_orderings(const EquivalenceClass& cls) {
  std::set<Ordering> all;
  for (const Dag& m : cls.members) {
    const auto edges = m.edges();
    for (auto& o : linear_extensions(m.size(), edges)) all.insert(std::move(o));
  }
  return {all.begin(), all.end()};
}

std::vector<Edge> e_max(const Ordering& sigma_star) {
  const int p = sigma_star.size();
  if (p < 3) throw ValidationError("E_max needs p >= 3");
  std::vector<Edge> out;
  for (int t = 1; t + 1 < p; ++t) out.push_back({sigma_star.at(t), sigma_star.at(t + 1)});
  out.push_back({sigma_star.at(0), sigma_star.at(2)});
  std::sort(out.begin(), out.end());
  return out;
}

Ordering swap_leading_pair(const Ordering& sigma_star) { return rts_move(sigma_star, 0, 1); }

Covariance population_covariance(const WeightedDag& scm) {
  scm.validate();
  const Dag& g = scm.dag;
  const int p = g.size();
  const auto order = g.topological_order();
  if (!order) throw ValidationError("SCM graph is cyclic");
  Covariance cov{p, std::vector<double>(static_cast<std::size_t>(p * p), 0.0)};
  auto at = [&](Node i, Node j) -> double& { return cov.matrix[static_cast<std::size_t>(i * p + j)]; };
  // X_j = sum_i B_ij X_i + e_j processed in topological order.
  std::vector<Node> done;
  for (Node j : *order) {
    const auto parents = g.parents(j).members();
    for (Node l : done) {
      double c = 0.0;
      for (Node i : parents) c += scm.weight(i, j) * at(i, l);
      at(j, l) = c;
      at(l, j) = c;
    }
    double v = scm.noise_vars[static_cast<std::size_t>(j)];
    for (Node i : parents) v += scm.weight(i, j) * at(i, j);
    at(j, j) = v;
    done.push_back(j);
  }
  return cov;
}

Dag population_minimal_imap(const Ordering& sigma, const Covariance& cov, double tol) {
  const int p = sigma.size();
  if (cov.p != p) throw ValidationError("covariance and ordering differ in size");
  Dag g(p);
  std::vector<double> block;
  std::vector<double> rhs;
  for (int t = 1; t < p; ++t) {
    const Node j = sigma.at(t);
    const auto m = static_cast<std::size_t>(t);
    block.assign(m * m, 0.0);
    rhs.assign(m, 0.0);
    for (std::size_t a = 0; a < m; ++a) {
      const Node ia = sigma.at(static_cast<int>(a));
      rhs[a] = cov.at(ia, j);
      for (std::size_t b = 0; b < m; ++b) block[a * m + b] = cov.at(ia, sigma.at(static_cast<int>(b)));
    }
    if (linalg::cholesky(block, t, 1e-12) != linalg::FactorStatus::ok) {
      throw SingularDesign("singular predecessor covariance block");
    }
    const auto beta = linalg::cholesky_solve(block, t, rhs);
    for (std::size_t a = 0; a < m; ++a) {
      const Node i = sigma.at(static_cast<int>(a));
      const double scale = std::sqrt(cov.at(j, j) / cov.at(i, i));
      if (std::abs(beta[a]) > tol * scale) g.add_edge(i, j);
    }
  }
  return g;
}

int psi1(const Ordering& sigma, const Covariance& cov, double tol) {
  return -static_cast<int>(population_minimal_imap(sigma, cov, tol).edge_count());
}

std::vector<Ordering> all_orderings(int p, int limit) {
  if (p > limit) throw LimitExceeded("ordering enumeration limited to p <= " + std::to_string(limit));
  std::vector<Node> nodes(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) nodes[static_cast<std::size_t>(i)] = i;
  std::vector<Ordering> out;
  do {
    out.emplace_back(nodes);
  } while (std::next_permutation(nodes.begin(), nodes.end()));
  return out;
}

JointArgmax joint_argmax(std::span<const WeightedDag> scms, double tol, int threads) {
  if (scms.empty()) throw ValidationError("joint argmax needs at least one SCM");
  const int p = scms.front().dag.size();
  for (const auto& s : scms) {
    if (s.dag.size() != p) throw ValidationError("SCMs differ in node count");
  }
  std::vector<Covariance> covs;
  for (const auto& s : scms) covs.push_back(population_covariance(s));

  const auto orderings = all_orderings(p);
  std::vector<int> scores(orderings.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      int total = 0;
      for (const auto& c : covs) total += psi1(orderings[r], c, tol);
      scores[r] = total;
    }
  };
  threads = std::max(1, threads);
  if (threads == 1) {
    work(0, orderings.size());
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (orderings.size() + static_cast<std::size_t>(threads) - 1) / static_cast<std::size_t>(threads);
    for (std::size_t b = 0; b < orderings.size(); b += chunk) {
      pool.emplace_back(work, b, std::min(orderings.size(), b + chunk));
    }
  }

  JointArgmax result;
  result.best_score = *std::max_element(scores.begin(), scores.end());
  for (std::size_t r = 0; r < orderings.size(); ++r) {
    if (scores[r] == result.best_score) result.argmax.push_back(orderings[r]);
  }

  std::set<Edge> essential;
  std::vector<Ordering> intersection;
  bool first = true;
  for (const auto& s : scms) {
    const auto cls = equivalence_class(s.dag);
    essential.insert(cls.essential.begin(), cls.essential.end());
    auto orders = class_orderings(cls);
    if (first) {
      intersection = std::move(orders);
      first = false;
    } else {
      std::vector<Ordering> kept;
      std::set_intersection(intersection.begin(), intersection.end(), orders.begin(), orders.end(),
                            std::back_inserter(kept));
      intersection = std::move(kept);
    }
  }
  result.class_intersection = std::move(intersection);
  result.essential_union.assign(essential.begin(), essential.end());
  return result;
}

}  // namespace jod
