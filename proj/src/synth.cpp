#include "jod/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "jod/analysis.hpp"
#include "jod/equivalence.hpp"
#include "jod/error.hpp"
#include "jod/kernels.hpp"

namespace jod {

double default_edge_probability(int p) {
  if (p < 2) throw ValidationError("need at least two variables");
  return 3.0 / (2.0 * p - 2.0);
}

Dag random_ordered_dag(int p, double p_edge, const Ordering& sigma, Rng& rng) {
  if (!(p_edge >= 0.0 && p_edge <= 1.0)) throw ValidationError("edge probability must lie in [0, 1]");
  if (sigma.size() != p) throw ValidationError("ordering has wrong length");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Dag g(p);
  for (int a = 0; a < p; ++a) {
    for (int b = a + 1; b < p; ++b) {
      if (unif(rng) < p_edge) g.add_edge(sigma.at(a), sigma.at(b));
    }
  }
  return g;
}

WeightedDag sample_weights(const Dag& g, double low, double high, Rng& rng) {
  if (!(low > 0.0 && low < high)) throw ValidationError("weight range needs 0 < low < high");
  WeightedDag scm = make_weighted(g);
  std::uniform_real_distribution<double> mag(low, high);
  std::bernoulli_distribution sign(0.5);
  for (const Edge& e : g.edges()) {
    const double m = mag(rng);
    scm.set_weight(e.tail, e.head, sign(rng) ? m : -m);
  }
  return scm;
}

Dataset simulate(const WeightedDag& scm, int n, Rng& rng) {
  if (n < 2) throw ValidationError("need at least 2 samples");
  scm.validate();
  const Dag& g = scm.dag;
  const int p = g.size();
  const auto order = g.topological_order();
  const auto un = static_cast<std::size_t>(n);
  std::vector<double> cols(static_cast<std::size_t>(p) * un);
  std::normal_distribution<double> normal(0.0, 1.0);
  // Noise is drawn column by column in label order so the stream does not
  // depend on the graph.
  for (Node j = 0; j < p; ++j) {
    const double sd = std::sqrt(scm.noise_vars[static_cast<std::size_t>(j)]);
    double* col = cols.data() + static_cast<std::size_t>(j) * un;
    for (std::size_t r = 0; r < un; ++r) col[r] = sd * normal(rng);
  }
  for (Node j : *order) {
    std::span<double> col(cols.data() + static_cast<std::size_t>(j) * un, un);
    g.parents(j).for_each([&](Node i) {
      std::span<const double> src(cols.data() + static_cast<std::size_t>(i) * un, un);
      kernels::axpy(scm.weight(i, j), src, col);
    });
  }
  return Dataset::from_columns(n, p, std::move(cols));
}

std::vector<Dag> common_private_collection(int p, int K, int n_common, int n_private, const Ordering& sigma_star,
                                           Rng& rng) {
  const long pairs = static_cast<long>(p) * (p - 1) / 2;
  if (K < 1 || n_common < 0 || n_private < 0 || n_common + n_private > pairs) {
    throw ValidationError("infeasible common/private edge counts");
  }
  if (sigma_star.size() != p) throw ValidationError("ordering has wrong length");
  std::vector<Edge> all;
  for (int a = 0; a < p; ++a) {
    for (int b = a + 1; b < p; ++b) all.push_back({sigma_star.at(a), sigma_star.at(b)});
  }
  std::shuffle(all.begin(), all.end(), rng);
  const std::vector<Edge> common(all.begin(), all.begin() + n_common);
  std::vector<Edge> rest(all.begin() + n_common, all.end());
  std::vector<Dag> out;
  for (int k = 0; k < K; ++k) {
    std::vector<Edge> priv;
    std::sample(rest.begin(), rest.end(), std::back_inserter(priv), n_private, rng);
    std::vector<Edge> edges = common;
    edges.insert(edges.end(), priv.begin(), priv.end());
    out.push_back(Dag::from_edges(p, edges));
  }
  return out;
}

SimilarOrderings similar_orderings(int p, int K, double target_tau, Rng& rng, double tolerance, int max_attempts) {
  if (!(target_tau >= -1.0 && target_tau <= 1.0)) throw ValidationError("target tau must lie in [-1, 1]");
  if (p < 2 || K < 1) throw ValidationError("need p >= 2 and K >= 1");
  const Ordering reference = Ordering::identity(p);
  const long pairs = static_cast<long>(p) * (p - 1) / 2;
  const double target_d = (1.0 - target_tau) / 2.0 * static_cast<double>(pairs);
  const long sweeps = 20L * p * p;
  std::uniform_int_distribution<int> pick(0, p - 2);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  SimilarOrderings result;
  for (int k = 0; k < K; ++k) {
    bool done = false;
    for (int attempt = 0; attempt < max_attempts && !done; ++attempt) {
      std::vector<Node> cur(static_cast<std::size_t>(p));
      std::iota(cur.begin(), cur.end(), 0);
      long d = 0;
      // Target density exp(-|d - d*|); an adjacent swap moves d by one.
      for (long step = 0; step < sweeps; ++step) {
        const int i = pick(rng);
        const long nd = cur[static_cast<std::size_t>(i)] < cur[static_cast<std::size_t>(i + 1)] ? d + 1 : d - 1;
        const double gap = std::abs(static_cast<double>(nd) - target_d) - std::abs(static_cast<double>(d) - target_d);
        if (gap <= 0.0 || unif(rng) < std::exp(-gap)) {
          std::swap(cur[static_cast<std::size_t>(i)], cur[static_cast<std::size_t>(i + 1)]);
          d = nd;
        }
      }
      const double tau = 1.0 - 2.0 * static_cast<double>(d) / static_cast<double>(pairs);
      if (std::abs(tau - target_tau) <= tolerance + 1e-12) {
        result.orderings.emplace_back(cur);
        result.taus.push_back(tau);
        done = true;
      }
    }
    if (!done) {
      throw ValidationError("could not reach Kendall tau " + std::to_string(target_tau) + " within tolerance for p=" +
                            std::to_string(p));
    }
  }
  result.pairwise_u = K >= 2 ? pairwise_u(result.orderings) : 1.0;
  return result;
}

std::vector<std::tuple<Node, Node, Node>> triangular_motifs(const Dag& g) {
  std::vector<std::tuple<Node, Node, Node>> out;
  for (const Edge& e : g.edges()) {
    const Node i = e.tail;
    const Node j = e.head;
    g.children(j).for_each([&](Node l) {
      if (g.has_edge(i, l)) out.emplace_back(i, j, l);
    });
  }
  std::sort(out.begin(), out.end());
  return out;
}

WeightedDag unfaithful_scm(const Dag& g, int motifs, Rng& rng, double low, double high) {
  if (motifs < 0) throw ValidationError("motif count must be non-negative");
  WeightedDag scm = sample_weights(g, low, high, rng);
  if (motifs == 0) return scm;
  auto candidates = triangular_motifs(g);
  if (static_cast<int>(candidates.size()) < motifs) {
    throw ValidationError("graph has " + std::to_string(candidates.size()) + " triangular motifs, " +
                          std::to_string(motifs) + " requested");
  }
  std::shuffle(candidates.begin(), candidates.end(), rng);
  // Pick motifs whose cancelled edge i -> l is not used by another pick. Sinks
  // are distinct: two edits into the same sink would interfere.
  std::vector<std::tuple<Node, Node, Node>> chosen;
  std::set<Edge> cancelled;
  std::set<Edge> used;
  std::set<Node> sinks;
  std::set<Edge> zeroed;  // covariance pairs (j, l) forced to zero
  std::set<Edge> slopes;  // pairs (i, j) whose covariance must stay non-zero
  for (const auto& [i, j, l] : candidates) {
    if (static_cast<int>(chosen.size()) == motifs) break;
    const Edge target{i, l};
    if (sinks.count(l) || cancelled.count(target) || used.count(target) || cancelled.count({i, j}) ||
        cancelled.count({j, l}) || zeroed.count({i, j}) || slopes.count({j, l}))
      continue;
    chosen.emplace_back(i, j, l);
    sinks.insert(l);
    cancelled.insert(target);
    used.insert({i, j});
    used.insert({j, l});
    zeroed.insert({j, l});
    slopes.insert({i, j});
  }
  if (static_cast<int>(chosen.size()) < motifs) {
    throw ValidationError("not enough edge-disjoint triangular motifs");
  }
  // Resolve in topological order of the sink so later edits cannot reach
  // covariances fixed earlier.
  const auto topo = *g.topological_order();
  std::vector<int> rank(static_cast<std::size_t>(g.size()));
  for (std::size_t r = 0; r < topo.size(); ++r) rank[static_cast<std::size_t>(topo[r])] = static_cast<int>(r);
  std::sort(chosen.begin(), chosen.end(), [&](const auto& a, const auto& b) {
    return rank[static_cast<std::size_t>(std::get<2>(a))] < rank[static_cast<std::size_t>(std::get<2>(b))];
  });
  for (const auto& [i, j, l] : chosen) {
    // Cov(X_j, X_l) is affine in b = B_il: c(b) = c(0) + b * Cov(X_j, X_i).
    scm.set_weight(i, l, 1.0);  // placeholder keeps validate() happy
    WeightedDag probe = scm;
    probe.set_weight(i, l, 0.0);
    probe.dag.remove_edge(i, l);
    const Covariance base = population_covariance(probe);
    const double slope = base.at(j, i);
    if (std::abs(slope) < 1e-12) throw NumericalError("cannot cancel a path through an uncorrelated pair");
    const double b = -base.at(j, l) / slope;
    if (b == 0.0) throw NumericalError("cancellation would remove the edge");
    scm.set_weight(i, l, b);
  }
  return scm;
}

}  // namespace jod
