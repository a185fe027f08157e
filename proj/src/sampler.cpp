#include "jod/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "jod/error.hpp"
#include "jod/selection.hpp"

namespace jod {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

std::vector<Dag> ChainState::graphs() const {
  std::vector<Dag> out;
  out.reserve(parents.size());
  for (const auto& row : parents) {
    Dag g(static_cast<int>(row.size()));
    for (std::size_t j = 0; j < row.size(); ++j) g.set_parents(static_cast<Node>(j), row[j]);
    out.push_back(std::move(g));
  }
  return out;
}

OrderPosterior::OrderPosterior(std::span<const DatasetScorer> scorers, bool incremental)
    : scorers_(scorers), incremental_(incremental) {
  if (scorers.empty()) throw ValidationError("at least one dataset is required");
  p_ = scorers.front().p();
  for (const auto& s : scorers) {
    if (s.p() != p_) throw ValidationError("datasets differ in column count");
  }
  if (p_ < 2) throw ValidationError("need at least two variables");
}

void OrderPosterior::finalize(ChainState& s) const {
  // Summation order is fixed (dataset, then node label) so incremental and
  // full evaluation agree bit for bit.
  double total = 0.0;
  for (const auto& row : s.node_scores) {
    for (double v : row) total += v;
  }
  s.log_post = std::isnan(total) ? kNegInf : total;
}

ChainState OrderPosterior::evaluate(const Ordering& sigma) const {
  if (sigma.size() != p_) throw ValidationError("ordering has wrong length");
  ChainState s;
  s.ordering = sigma;
  s.parents.resize(scorers_.size());
  s.node_scores.resize(scorers_.size());
  for (std::size_t k = 0; k < scorers_.size(); ++k) {
    s.parents[k].resize(static_cast<std::size_t>(p_));
    s.node_scores[k].resize(static_cast<std::size_t>(p_));
    for (Node j = 0; j < p_; ++j) {
      auto choice = forward_backward_node(scorers_[k], j, predecessors(sigma, j));
      s.parents[k][static_cast<std::size_t>(j)] = std::move(choice.parents);
      s.node_scores[k][static_cast<std::size_t>(j)] = choice.score.ok() ? choice.score.value : kNegInf;
    }
  }
  finalize(s);
  return s;
}

ChainState OrderPosterior::evaluate_move(const ChainState& current, const Ordering& next, int first, int last) const {
  if (!incremental_ || current.parents.size() != scorers_.size()) return evaluate(next);
  ChainState s = current;
  s.ordering = next;
  for (std::size_t k = 0; k < scorers_.size(); ++k) {
    for (int t = first; t <= last; ++t) {
      const Node j = next.at(t);
      auto choice = forward_backward_node(scorers_[k], j, predecessors(next, j));
      s.parents[k][static_cast<std::size_t>(j)] = std::move(choice.parents);
      s.node_scores[k][static_cast<std::size_t>(j)] = choice.score.ok() ? choice.score.value : kNegInf;
    }
  }
  finalize(s);
  return s;
}

void ChainConfig::validate(int p) const {
  if (iterations <= 0) throw ValidationError("iterations must be positive");
  const long b = effective_burn_in();
  if (b < 0 || b >= iterations) throw ValidationError("burn-in must satisfy 0 <= burn-in < iterations");
  if (thin < 1) throw ValidationError("thin must be a positive integer");
  if (initial && initial->size() != p) throw ValidationError("initial ordering has wrong length");
  if (p < 2) throw ValidationError("need at least two variables");
}

ChainState mh_step(const ChainState& state, const PosteriorModel& model, Neighborhood kind, Rng& rng, bool& accepted) {
  const int p = model.p();
  std::uniform_int_distribution<std::size_t> pick(0, neighborhood_size(kind, p) - 1);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const Move move = neighborhood_move(kind, p, pick(rng));
  const double u = unif(rng);
  const Ordering next = move.apply(state.ordering);

  ChainState proposal;
  try {
    proposal = model.evaluate_move(state, next, move.first(), move.last());
  } catch (const NumericalError&) {
    accepted = false;
    return state;
  }
  const double delta = proposal.log_post - state.log_post;
  if (proposal.log_post == kNegInf || std::isnan(proposal.log_post)) {
    accepted = false;
  } else if (state.log_post == kNegInf || delta >= 0.0) {
    accepted = true;
  } else {
    accepted = std::log(u) <= delta;
  }
  return accepted ? proposal : state;
}

ChainTrace run_chain(const ChainConfig& config, const PosteriorModel& model) {
  const int p = model.p();
  config.validate(p);
  Rng rng(config.seed);
  Ordering start;
  if (config.initial) {
    start = *config.initial;
  } else {
    std::vector<Node> nodes(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) nodes[static_cast<std::size_t>(i)] = i;
    std::shuffle(nodes.begin(), nodes.end(), rng);
    start = Ordering(std::move(nodes));
  }

  ChainTrace trace;
  trace.iterations = config.iterations;
  const long burn = config.effective_burn_in();
  trace.trajectory.reserve(static_cast<std::size_t>(config.iterations + 1));
  trace.accepted_flags.reserve(static_cast<std::size_t>(config.iterations));
  trace.samples.reserve(static_cast<std::size_t>((config.iterations - burn + config.thin - 1) / config.thin));

  ChainState state = model.evaluate(start);
  trace.trajectory.push_back(state.log_post);
  for (long t = 1; t <= config.iterations; ++t) {
    bool accepted = false;
    state = mh_step(state, model, config.neighborhood, rng, accepted);
    trace.accepted += accepted ? 1 : 0;
    trace.accepted_flags.push_back(accepted ? 1 : 0);
    trace.trajectory.push_back(state.log_post);
    if (t > burn && (t - burn - 1) % config.thin == 0) {
      trace.samples.push_back({t, state.ordering, state.log_post, accepted, state.graphs()});
    }
  }
  return trace;
}

std::vector<ChainTrace> run_ensemble(std::span<const ChainConfig> configs, const PosteriorModel& model, int threads) {
  std::vector<ChainTrace> out(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next++; c < configs.size(); c = next++) {
      try {
        out[c] = run_chain(configs[c], model);
      } catch (const std::exception& e) {
        out[c] = ChainTrace{};
        out[c].error = e.what();
      }
    }
  };
  const auto n_workers = static_cast<std::size_t>(std::max(1, threads));
  if (n_workers == 1 || configs.size() <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(n_workers, configs.size()); ++w) pool.emplace_back(worker);
  }
  return out;
}

long equalized_iterations(long iterations, int p, Neighborhood from, Neighborhood to) {
  if (p < 2) throw ValidationError("need at least two variables");
  auto weight = [&](Neighborhood n) { return n == Neighborhood::adj ? static_cast<double>(p) / 6.0 : 1.0; };
  return std::lround(static_cast<double>(iterations) * weight(to) / weight(from));
}

}  // namespace jod
