#include <doctest.h>

#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "jod/equivalence.hpp"
#include "jod/error.hpp"
#include "jod/sampler.hpp"
#include "jod/selection.hpp"
#include "jod/synth.hpp"

using namespace jod;

namespace {

// Log posterior given by a lookup table over orderings.
class TableModel final : public PosteriorModel {
 public:
  TableModel(int p, std::map<Ordering, double> table) : p_(p), table_(std::move(table)) {}
  int p() const override { return p_; }
  ChainState evaluate(const Ordering& sigma) const override {
    ChainState s;
    s.ordering = sigma;
    auto it = table_.find(sigma);
    s.log_post = it == table_.end() ? 0.0 : it->second;
    return s;
  }

 private:
  int p_;
  std::map<Ordering, double> table_;
};

// Every ordering other than the identity has log posterior -inf.
class StuckModel final : public PosteriorModel {
 public:
  int p() const override { return 3; }
  ChainState evaluate(const Ordering& sigma) const override {
    ChainState s;
    s.ordering = sigma;
    s.log_post = sigma == Ordering::identity(3) ? 0.0 : -std::numeric_limits<double>::infinity();
    return s;
  }
};

// Throws a numerical error for any ordering not starting with label 1.
class FragileModel final : public PosteriorModel {
 public:
  int p() const override { return 3; }
  ChainState evaluate(const Ordering& sigma) const override {
    if (sigma.at(0) != 0) throw NumericalError("boom");
    ChainState s;
    s.ordering = sigma;
    return s;
  }
};

struct Fixture {
  std::vector<Dataset> data;
  std::vector<DatasetScorer> scorers;
  Dag truth;
  Fixture(int p, int K, int n, std::uint64_t seed) {
    Rng rng(seed);
    for (int k = 0; k < K; ++k) {
      truth = random_ordered_dag(p, default_edge_probability(p), Ordering::identity(p), rng);
      data.push_back(simulate(sample_weights(truth, 0.5, 1.0, rng), n, rng));
    }
    for (const auto& d : data) scorers.emplace_back(d, ScoreParams{});
  }
};

}  // namespace

TEST_CASE("chain config validation") {
  ChainConfig c;
  c.iterations = 10;
  CHECK_NOTHROW(c.validate(3));
  c.burn_in = 10;
  CHECK_THROWS_AS(c.validate(3), ValidationError);
  c.burn_in = 2;
  c.thin = 0;
  CHECK_THROWS_AS(c.validate(3), ValidationError);
  c.thin = 1;
  c.initial = Ordering::identity(4);
  CHECK_THROWS_AS(c.validate(3), ValidationError);
  c.initial.reset();
  c.iterations = 0;
  CHECK_THROWS_AS(c.validate(3), ValidationError);
}

TEST_CASE("uphill and flat proposals are always accepted") {
  std::map<Ordering, double> table;
  for (const auto& s : all_orderings(3)) table[s] = 0.0;
  table[Ordering::identity(3)] = -5.0;
  const TableModel model(3, table);
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    bool acc = false;
    const auto next = mh_step(model.evaluate(Ordering::identity(3)), model, Neighborhood::r2r, rng, acc);
    CHECK(acc);
    CHECK(next.log_post == 0.0);
  }
  // p = 2, flat: the two-state chain always moves.
  const TableModel flat(2, {});
  ChainConfig c;
  c.iterations = 10000;
  c.seed = 3;
  const auto t = run_chain(c, flat);
  CHECK(t.acceptance_rate() == 1.0);
}

TEST_CASE("large log-posterior differences do not overflow") {
  std::map<Ordering, double> table;
  for (const auto& s : all_orderings(3)) table[s] = -1e6;
  table[Ordering::identity(3)] = 1e6;
  const TableModel model(3, table);
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    bool acc = true;
    const auto st = mh_step(model.evaluate(Ordering::identity(3)), model, Neighborhood::rts, rng, acc);
    CHECK_FALSE(acc);
    CHECK(st.ordering == Ordering::identity(3));
  }
}

TEST_CASE("forced rejection keeps the initial state") {
  const StuckModel model;
  ChainConfig c;
  c.iterations = 1;
  c.initial = Ordering::identity(3);
  const auto t = run_chain(c, model);
  REQUIRE(t.samples.size() == 1);
  CHECK(t.samples[0].ordering == Ordering::identity(3));
  CHECK(t.accepted == 0);
  CHECK(t.trajectory.size() == 2);

  const FragileModel fragile;
  c.iterations = 500;
  const auto f = run_chain(c, fragile);
  for (const auto& s : f.samples) CHECK(s.ordering.at(0) == 0);
}

TEST_CASE("trace length and recording stride") {
  const TableModel model(4, {});
  for (int thin : {1, 3, 7}) {
    for (long burn : {0L, 5L, 33L}) {
      ChainConfig c;
      c.iterations = 100;
      c.burn_in = burn;
      c.thin = thin;
      const auto t = run_chain(c, model);
      CHECK(t.samples.size() == static_cast<std::size_t>((100 - burn + thin - 1) / thin));
      CHECK(t.samples.front().iteration == burn + 1);
      CHECK(t.trajectory.size() == 101);
      CHECK(t.accepted_flags.size() == 100);
    }
  }
  ChainConfig d;
  d.iterations = 9;
  CHECK(d.effective_burn_in() == 4);
}

TEST_CASE("determinism and ensemble ordering") {
  Fixture fx(6, 2, 200, 4);
  const OrderPosterior model(fx.scorers);
  ChainConfig c;
  c.iterations = 300;
  c.seed = 42;
  const auto a = run_chain(c, model);
  const auto b = run_chain(c, model);
  CHECK(a.trajectory == b.trajectory);
  CHECK(a.accepted_flags == b.accepted_flags);

  std::vector<ChainConfig> configs(4, c);
  for (std::size_t i = 0; i < configs.size(); ++i) configs[i].seed = 100 + i;
  const auto one = run_ensemble(configs, model, 1);
  const auto many = run_ensemble(configs, model, 3);
  REQUIRE(one.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(one[i].trajectory == many[i].trajectory);
    CHECK(one[i].trajectory == run_chain(configs[i], model).trajectory);
  }
  CHECK(run_ensemble(std::span<const ChainConfig>{}, model, 2).empty());

  // A failing chain does not stop its siblings.
  configs[1].thin = 0;
  const auto mixed = run_ensemble(configs, model, 2);
  CHECK_FALSE(mixed[1].error.empty());
  CHECK(mixed[0].error.empty());
  CHECK(mixed[0].trajectory == one[0].trajectory);
}

TEST_CASE("incremental evaluation matches full recomputation") {
  Fixture fx(9, 3, 150, 5);
  const OrderPosterior inc(fx.scorers, true);
  const OrderPosterior full(fx.scorers, false);
  for (auto kind : {Neighborhood::r2r, Neighborhood::adj, Neighborhood::rts}) {
    ChainConfig c;
    c.iterations = 400;
    c.burn_in = 0;
    c.neighborhood = kind;
    c.seed = 7;
    const auto a = run_chain(c, inc);
    const auto b = run_chain(c, full);
    CHECK(a.trajectory == b.trajectory);
    CHECK(a.accepted_flags == b.accepted_flags);
    CHECK(a.samples.back().ordering == b.samples.back().ordering);
    CHECK(a.samples.back().graphs == b.samples.back().graphs);
  }
}

TEST_CASE("recorded log posteriors match recomputation") {
  Fixture fx(6, 2, 200, 6);
  const OrderPosterior model(fx.scorers);
  ChainConfig c;
  c.iterations = 200;
  c.thin = 10;
  const auto t = run_chain(c, model);
  for (const auto& s : t.samples) {
    CHECK(s.log_post == doctest::Approx(ordering_log_posterior(fx.scorers, s.ordering)).epsilon(1e-12));
    for (std::size_t k = 0; k < fx.scorers.size(); ++k) {
      CHECK(s.graphs[k] == forward_backward(fx.scorers[k], s.ordering));
      CHECK(is_consistent(s.graphs[k], s.ordering));
    }
  }
}

TEST_CASE("stationary distribution on S3 (short run)") {
  std::map<Ordering, double> table;
  const auto perms = all_orderings(3);
  double z = 0.0;
  for (std::size_t i = 0; i < perms.size(); ++i) {
    table[perms[i]] = 0.4 * static_cast<double>(i) - 1.0;
    z += std::exp(table[perms[i]]);
  }
  const TableModel model(3, table);
  ChainConfig c;
  c.iterations = 200000;
  c.burn_in = 1000;
  c.seed = 9;
  const auto t = run_chain(c, model);
  std::map<Ordering, double> freq;
  for (const auto& s : t.samples) freq[s.ordering] += 1.0;
  double tv = 0.0;
  for (const auto& s : perms) tv += std::abs(freq[s] / static_cast<double>(t.samples.size()) - std::exp(table[s]) / z);
  CHECK(0.5 * tv < 0.03);
}

TEST_CASE("iteration budget equalization") {
  CHECK(equalized_iterations(32000, 40, Neighborhood::r2r, Neighborhood::adj) == 213333);
  CHECK(equalized_iterations(32000, 40, Neighborhood::r2r, Neighborhood::rts) == 32000);
  CHECK(equalized_iterations(213333, 40, Neighborhood::adj, Neighborhood::r2r) == 32000);
  CHECK_THROWS_AS(equalized_iterations(10, 1, Neighborhood::r2r, Neighborhood::adj), ValidationError);
}
