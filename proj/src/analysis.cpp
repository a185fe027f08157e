#include "jod/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "jod/error.hpp"
#include "jod/io.hpp"

namespace jod {

EdgeMatrix EdgeMatrix::from_dag(const Dag& g) {
  EdgeMatrix m(g.size());
  for (const Edge& e : g.edges()) m.at(e.tail, e.head) = 1.0;
  return m;
}

EdgeMatrix edge_inclusion(const ChainTrace& trace, int k) { return edge_inclusion(std::span<const ChainTrace>(&trace, 1), k); }

EdgeMatrix edge_inclusion(std::span<const ChainTrace> traces, int k) {
  std::size_t count = 0;
  int p = -1;
  for (const auto& t : traces) {
    for (const auto& s : t.samples) {
      if (k < 0 || k >= static_cast<int>(s.graphs.size())) throw ValidationError("dataset index out of range");
      p = s.graphs[static_cast<std::size_t>(k)].size();
      ++count;
    }
  }
  if (count == 0) throw ValidationError("trace has no recorded samples");
  EdgeMatrix m(p);
  for (const auto& t : traces) {
    for (const auto& s : t.samples) {
      for (const Edge& e : s.graphs[static_cast<std::size_t>(k)].edges()) m.at(e.tail, e.head) += 1.0;
    }
  }
  for (double& v : m.values) v /= static_cast<double>(count);
  return m;
}

Dag threshold_graph(const EdgeMatrix& m, double threshold) {
  Dag g(m.p);
  for (Node i = 0; i < m.p; ++i) {
    for (Node j = 0; j < m.p; ++j) {
      if (i != j && m.at(i, j) > threshold) g.add_edge(i, j);
    }
  }
  return g;
}

double hamming_distance(const Dag& truth, const EdgeMatrix& estimate) {
  if (truth.size() != estimate.p) throw ValidationError("shape mismatch between truth and estimate");
  double d = 0.0;
  for (Node i = 0; i < truth.size(); ++i) {
    for (Node j = 0; j < truth.size(); ++j) {
      if (i != j) d += std::abs((truth.has_edge(i, j) ? 1.0 : 0.0) - estimate.at(i, j));
    }
  }
  return d;
}

double delta(std::span<const Dag> truth, std::span<const EdgeMatrix> estimates) {
  if (truth.size() != estimates.size() || truth.empty()) throw ValidationError("shape mismatch between truth and estimates");
  double total = 0.0;
  for (std::size_t k = 0; k < truth.size(); ++k) total += hamming_distance(truth[k], estimates[k]);
  return total / static_cast<double>(truth.size());
}

double delta(std::span<const Dag> truth, std::span<const Dag> estimates) {
  if (truth.size() != estimates.size() || truth.empty()) throw ValidationError("shape mismatch between truth and estimates");
  double total = 0.0;
  for (std::size_t k = 0; k < truth.size(); ++k) total += hamming(truth[k], estimates[k]);
  return total / static_cast<double>(truth.size());
}

double tau_star(const ChainTrace& trace, const Ordering& sigma_star) {
  return tau_star(std::span<const ChainTrace>(&trace, 1), sigma_star);
}

double tau_star(std::span<const ChainTrace> traces, const Ordering& sigma_star) {
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& t : traces) {
    for (const auto& s : t.samples) {
      total += kendall_tau(sigma_star, s.ordering);
      ++count;
    }
  }
  if (count == 0) throw ValidationError("trace has no recorded samples");
  return total / static_cast<double>(count);
}

Rates tpr_fdr(const Dag& truth, const Dag& estimate) {
  if (truth.size() != estimate.size()) throw ValidationError("graphs differ in size");
  std::size_t hit = 0;
  std::size_t spurious = 0;
  for (const Edge& e : estimate.edges()) {
    if (truth.has_edge(e.tail, e.head)) {
      ++hit;
    } else {
      ++spurious;
    }
  }
  const std::size_t n_truth = truth.edge_count();
  const std::size_t n_est = estimate.edge_count();
  return {n_truth ? static_cast<double>(hit) / static_cast<double>(n_truth) : 0.0,
          n_est ? static_cast<double>(spurious) / static_cast<double>(n_est) : 0.0};
}

double gelman_rubin_statistic(std::span<const std::vector<double>> chains) {
  const std::size_t m = chains.size();
  if (m < 2) throw ValidationError("≥2 chains required");
  const std::size_t n = chains.front().size();
  if (n < 2) throw ValidationError("each chain needs at least two samples");
  for (const auto& c : chains) {
    if (c.size() != n) throw ValidationError("chains must have equal length");
  }
  std::vector<double> means(m);
  double grand = 0.0;
  double within = 0.0;
  for (std::size_t c = 0; c < m; ++c) {
    double s = 0.0;
    for (double v : chains[c]) s += v;
    means[c] = s / static_cast<double>(n);
    grand += means[c];
    double ss = 0.0;
    for (double v : chains[c]) ss += (v - means[c]) * (v - means[c]);
    within += ss / static_cast<double>(n - 1);
  }
  grand /= static_cast<double>(m);
  within /= static_cast<double>(m);
  double between = 0.0;
  for (double mu : means) between += (mu - grand) * (mu - grand);
  between *= static_cast<double>(n) / static_cast<double>(m - 1);

  if (within == 0.0) return between == 0.0 ? 1.0 : kRhatCap;
  const double pooled = (static_cast<double>(n - 1) / static_cast<double>(n)) * within + between / static_cast<double>(n);
  return std::min(kRhatCap, std::sqrt(pooled / within));
}

double GelmanRubinSummary::max() const {
  double best = 1.0;
  for (int k = 0; k < datasets; ++k) {
    for (Node i = 0; i < p; ++i) {
      for (Node j = 0; j < p; ++j) {
        if (i != j) best = std::max(best, at(k, i, j));
      }
    }
  }
  return best;
}

double GelmanRubinSummary::fraction_below(double threshold) const {
  std::size_t below = 0;
  std::size_t total = 0;
  for (int k = 0; k < datasets; ++k) {
    for (Node i = 0; i < p; ++i) {
      for (Node j = 0; j < p; ++j) {
        if (i == j) continue;
        ++total;
        if (at(k, i, j) < threshold) ++below;
      }
    }
  }
  return total ? static_cast<double>(below) / static_cast<double>(total) : 1.0;
}

GelmanRubinSummary gelman_rubin(std::span<const ChainTrace> traces) {
  if (traces.size() < 2) throw ValidationError("≥2 chains required");
  const std::size_t n = traces.front().samples.size();
  for (const auto& t : traces) {
    if (t.samples.size() != n) throw ValidationError("chains must have equal recorded lengths");
  }
  if (n < 2) throw ValidationError("each chain needs at least two recorded samples");
  const auto& first = traces.front().samples.front();
  GelmanRubinSummary out;
  out.datasets = static_cast<int>(first.graphs.size());
  out.p = first.graphs.empty() ? 0 : first.graphs.front().size();
  const auto up = static_cast<std::size_t>(out.p);
  out.values.assign(static_cast<std::size_t>(out.datasets) * up * up, 1.0);
  std::vector<std::vector<double>> series(traces.size(), std::vector<double>(n));
  for (int k = 0; k < out.datasets; ++k) {
    for (Node i = 0; i < out.p; ++i) {
      for (Node j = 0; j < out.p; ++j) {
        if (i == j) continue;
        for (std::size_t c = 0; c < traces.size(); ++c) {
          for (std::size_t t = 0; t < n; ++t) {
            series[c][t] = traces[c].samples[t].graphs[static_cast<std::size_t>(k)].has_edge(i, j) ? 1.0 : 0.0;
          }
        }
        out.values[(static_cast<std::size_t>(k) * up + static_cast<std::size_t>(i)) * up + static_cast<std::size_t>(j)] =
            gelman_rubin_statistic(series);
      }
    }
  }
  return out;
}

double pairwise_u(std::span<const Ordering> orderings) {
  if (orderings.size() < 2) throw ValidationError("U needs at least two orderings");
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < orderings.size(); ++a) {
    for (std::size_t b = a + 1; b < orderings.size(); ++b) {
      total += kendall_tau(orderings[a], orderings[b]);
      ++pairs;
    }
  }
  return total / static_cast<double>(pairs);
}

std::vector<NodeConnectivity> connectivity_diff(std::span<const EdgeMatrix> cases, std::span<const EdgeMatrix> controls) {
  if (cases.empty() || controls.empty()) throw ValidationError("both groups need at least one matrix");
  const int p = cases.front().p;
  auto group_mean = [&](std::span<const EdgeMatrix> group, Node v) {
    double total = 0.0;
    for (const auto& m : group) {
      if (m.p != p) throw ValidationError("matrices differ in size");
      for (Node u = 0; u < p; ++u) {
        if (u != v) total += m.at(v, u) + m.at(u, v);
      }
    }
    return total / static_cast<double>(group.size());
  };
  std::vector<NodeConnectivity> out;
  for (Node v = 0; v < p; ++v) {
    const double c = group_mean(cases, v);
    const double h = group_mean(controls, v);
    out.push_back({v, c, h, c - h});
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::abs(a.difference) > std::abs(b.difference);
  });
  return out;
}

void write_matrix_csv(std::ostream& out, const EdgeMatrix& m) {
  for (Node i = 0; i < m.p; ++i) {
    for (Node j = 0; j < m.p; ++j) out << (j ? "," : "") << io::format_double(m.at(i, j));
    out << '\n';
  }
}

}  // namespace jod
