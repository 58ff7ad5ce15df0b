// Copyright 2026 The bb2vec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "bb2vec/baselines.hpp"
#include "bb2vec/evaluation.hpp"
#include "bb2vec/synthgen.hpp"
#include "bb2vec/trainer.hpp"

using namespace bb2vec;

namespace {

ItemSet make_set(std::initializer_list<ItemId> items) {
  ItemSet set;
  set.items = items;
  return set;
}

SynthResult small_corpus(double rho = 1.0, double zero_fraction = 0.0,
                         std::uint64_t seed = 7) {
  SynthSpec spec;
  spec.vocab_size = 30;
  spec.n_baskets = 4000;
  spec.n_sessions = 20000;
  spec.view_purchase_correlation = rho;
  spec.zero_purchase_fraction = zero_fraction;
  spec.seed = seed;
  return generate(spec);
}

SpmiMatrix session_spmi(const Corpus& corpus, int shift_k) {
  const auto stats = count_cooccurrences(
      std::span<const ItemSet>(corpus.train_sessions), corpus.vocab_size());
  return build_spmi(stats, shift_k, 3);
}

}  // namespace

TEST_CASE("task sampling follows the weights") {
  Rng rng(1);
  const std::vector<TaskSpec> single{
      {TaskSource::kBasketPairs, LossKind::kRanking, 0, 0, 2.0}};
  for (int i = 0; i < 50; ++i) {
    CHECK(sample_task(std::span<const TaskSpec>(single), rng) == 0);
  }

  std::vector<TaskSpec> even(2, single[0]);
  even[0].weight = 1.0;
  even[1].weight = 1.0;
  int first = 0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    first += sample_task(std::span<const TaskSpec>(even), rng) == 0;
  }
  CHECK(std::abs(first / static_cast<double>(draws) - 0.5) < 0.01);

  std::vector<TaskSpec> skewed = even;
  skewed[1].weight = 3.0;
  int counts[2] = {0, 0};
  for (int i = 0; i < draws; ++i) {
    ++counts[sample_task(std::span<const TaskSpec>(skewed), rng)];
  }
  CHECK(std::abs(counts[0] / static_cast<double>(draws) - 0.25) < 0.01);
  CHECK(std::abs(counts[1] / static_cast<double>(draws) - 0.75) < 0.01);

  std::vector<TaskSpec> zeros = even;
  zeros[0].weight = 0.0;
  zeros[1].weight = 0.0;
  CHECK_THROWS_AS(sample_task(std::span<const TaskSpec>(zeros), rng),
                  DataError);

  // Zero-weight tasks are never selected.
  std::vector<TaskSpec> mixed = even;
  mixed[0].weight = 0.0;
  for (int i = 0; i < 1000; ++i) {
    CHECK(sample_task(std::span<const TaskSpec>(mixed), rng) == 1);
  }
}

TEST_CASE("pair sampling is uniform over ordered pairs") {
  const std::vector<ItemSet> two{make_set({0, 1})};
  PairSampler sampler{std::span<const ItemSet>(two)};
  CHECK(sampler.total_ordered_pairs() == 2);
  Rng rng(2);
  int forward = 0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const auto [a, b] = sampler.sample(rng);
    forward += a == 0;
  }
  CHECK(std::abs(forward / static_cast<double>(draws) - 0.5) < 0.01);

  // {A,B} and {C,D,E}: 2 + 6 = 8 ordered pairs, each with probability 1/8.
  const std::vector<ItemSet> sets{make_set({0, 1}), make_set({2, 3, 4})};
  PairSampler mixed{std::span<const ItemSet>(sets)};
  CHECK(mixed.total_ordered_pairs() == 8);
  std::map<std::pair<ItemId, ItemId>, int> counts;
  for (int i = 0; i < draws; ++i) ++counts[mixed.sample(rng)];
  CHECK(counts.size() == 8);
  CHECK(std::abs(counts[{2, 3}] / static_cast<double>(draws) - 0.125) < 0.01);
  CHECK(std::abs(counts[{0, 1}] / static_cast<double>(draws) - 0.125) < 0.01);

  const std::vector<ItemSet> singleton{make_set({0})};
  CHECK_THROWS_AS(PairSampler{std::span<const ItemSet>(singleton)}, DataError);
}

TEST_CASE("mf cell sampling covers both orientations uniformly") {
  SpmiMatrix spmi;
  spmi.entries = {{0, 1, 0.5}};
  CellSampler sampler(spmi);
  Rng rng(3);
  int flipped = 0;
  for (int i = 0; i < 1000; ++i) {
    const MfCell cell = sampler.sample(rng);
    CHECK(cell.target == 0.5);
    CHECK(((cell.i == 0 && cell.j == 1) || (cell.i == 1 && cell.j == 0)));
    flipped += cell.i == 1;
  }
  CHECK(flipped > 0);
  CHECK(flipped < 1000);

  SpmiMatrix pair2;
  pair2.entries = {{0, 1, 0.5}, {2, 3, -1.25}};
  CellSampler sampler2(pair2);
  std::map<std::pair<ItemId, ItemId>, int> counts;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const MfCell cell = sampler2.sample(rng);
    ++counts[{cell.i, cell.j}];
    CHECK((cell.target == 0.5 || cell.target == -1.25));
  }
  for (const auto& [key, count] : counts) {
    CHECK(std::abs(count / static_cast<double>(draws) - 0.25) < 0.01);
  }

  SpmiMatrix empty;
  CHECK_THROWS_AS(CellSampler{empty}, DataError);
}

TEST_CASE("negative sampler exponent") {
  const std::vector<std::int64_t> counts{0, 1, 3};
  // alpha = 0: uniform over the whole vocabulary, zero-count items included.
  NegativeSampler uniform{std::span<const std::int64_t>(counts), 0.0};
  CHECK(uniform.probability(0) == doctest::Approx(1.0 / 3.0));
  CHECK(uniform.probability(2) == doctest::Approx(1.0 / 3.0));

  // alpha = 1: proportional to counts, zero-count items never drawn.
  NegativeSampler unigram{std::span<const std::int64_t>(counts), 1.0};
  CHECK(unigram.probability(0) == doctest::Approx(0.0));
  CHECK(unigram.probability(1) == doctest::Approx(0.25));
  CHECK(unigram.probability(2) == doctest::Approx(0.75));
  Rng rng(4);
  int hits[3] = {0, 0, 0};
  for (int i = 0; i < 100000; ++i) ++hits[unigram.sample(rng)];
  CHECK(hits[0] == 0);
  CHECK(std::abs(hits[2] / 100000.0 - 0.75) < 0.01);

  const std::vector<std::int64_t> empty_counts{0, 0};
  CHECK_THROWS_AS(
      (NegativeSampler{std::span<const std::int64_t>(empty_counts), 1.0}),
      DataError);
}

TEST_CASE("training is deterministic under the seed") {
  const SynthResult synth = small_corpus();
  TrainConfig config;
  config.dim = 8;
  config.negatives = 5;
  config.max_epochs = 2;
  config.epoch_size = 2000;
  config.seed = 11;
  const auto tasks = prod2vec_tasks(LossKind::kRanking);
  const TrainResult a =
      train(synth.corpus, nullptr, std::span<const TaskSpec>(tasks), config);
  const TrainResult b =
      train(synth.corpus, nullptr, std::span<const TaskSpec>(tasks), config);
  CHECK(a.embeddings.pairs[0].input.values ==
        b.embeddings.pairs[0].input.values);
  CHECK(a.embeddings.pairs[0].output.values ==
        b.embeddings.pairs[0].output.values);
  CHECK(a.history.size() == b.history.size());
}

TEST_CASE("lambda zero reduces bitwise to prod2vec") {
  const SynthResult synth = small_corpus();
  const SpmiMatrix spmi = session_spmi(synth.corpus, 5);
  TrainConfig config;
  config.dim = 8;
  config.negatives = 5;
  config.max_epochs = 3;
  config.epoch_size = 3000;
  config.seed = 13;

  const auto solo = prod2vec_tasks(LossKind::kClassification);
  const auto wired = bb2vec_tasks(LossKind::kClassification, {0.0});
  const TrainResult a =
      train(synth.corpus, nullptr, std::span<const TaskSpec>(solo), config);
  const TrainResult b =
      train(synth.corpus, &spmi, std::span<const TaskSpec>(wired), config);

  CHECK(a.embeddings.pairs[0].input.values ==
        b.embeddings.pairs[0].input.values);
  CHECK(a.embeddings.pairs[0].output.values ==
        b.embeddings.pairs[0].output.values);

  // The session representations keep their initialization exactly.
  const EmbeddingMatrix fresh_in = init_matrix(
      synth.corpus.vocab_size(), config.dim, mix_seed(config.seed, 102));
  const EmbeddingMatrix fresh_out = init_matrix(
      synth.corpus.vocab_size(), config.dim, mix_seed(config.seed, 103));
  CHECK(b.embeddings.pairs[1].input.values == fresh_in.values);
  CHECK(b.embeddings.pairs[1].output.values == fresh_out.values);

  // And a zero-lambda run never needs the SPMI at all.
  const TrainResult c =
      train(synth.corpus, nullptr, std::span<const TaskSpec>(wired), config);
  CHECK(c.embeddings.pairs[0].input.values ==
        a.embeddings.pairs[0].input.values);
}

TEST_CASE("best-epoch snapshot equals rerunning up to that epoch") {
  const SynthResult synth = small_corpus();
  TrainConfig config;
  config.dim = 8;
  config.negatives = 5;
  config.max_epochs = 6;
  config.epoch_size = 1500;
  config.patience = 6;
  config.seed = 17;
  const auto tasks = prod2vec_tasks(LossKind::kRanking);
  const TrainResult full =
      train(synth.corpus, nullptr, std::span<const TaskSpec>(tasks), config);
  REQUIRE(full.best_epoch >= 1);

  TrainConfig prefix = config;
  prefix.max_epochs = full.best_epoch;
  const TrainResult partial =
      train(synth.corpus, nullptr, std::span<const TaskSpec>(tasks), prefix);
  CHECK(partial.best_epoch == full.best_epoch);
  CHECK(full.embeddings.pairs[0].input.values ==
        partial.embeddings.pairs[0].input.values);
  CHECK(full.embeddings.pairs[0].output.values ==
        partial.embeddings.pairs[0].output.values);
}

TEST_CASE("early stopping respects patience") {
  const SynthResult synth = small_corpus();
  TrainConfig config;
  config.dim = 4;
  config.negatives = 2;
  config.max_epochs = 50;
  config.epoch_size = 200;
  config.patience = 2;
  config.seed = 19;
  const auto tasks = prod2vec_tasks(LossKind::kRanking);
  const TrainResult result =
      train(synth.corpus, nullptr, std::span<const TaskSpec>(tasks), config);
  CHECK(result.history.size() < 50);
  CHECK(result.history.size() >=
        static_cast<std::size_t>(result.best_epoch));
  const auto& last = result.history.back();
  double best = -1.0;
  for (const auto& record : result.history) {
    best = std::max(best, record.val_hitrate10);
  }
  CHECK(best == result.history[result.best_epoch - 1].val_hitrate10);
  (void)last;
}

TEST_CASE("mf task counters are exact") {
  const SynthResult synth = small_corpus();
  const SpmiMatrix spmi = session_spmi(synth.corpus, 5);
  TrainConfig config;
  config.dim = 6;
  config.negatives = 3;
  config.max_epochs = 2;
  config.epoch_size = 500;
  config.patience = 10;
  config.seed = 23;
  // MF-only task set.
  const std::vector<TaskSpec> tasks{
      {TaskSource::kSpmiCells, LossKind::kMatrixFactorization, 0, 1, 1.0}};
  const TrainResult result =
      train(synth.corpus, &spmi, std::span<const TaskSpec>(tasks), config);
  const auto& counter = result.counters[0];
  const std::int64_t epochs =
      static_cast<std::int64_t>(result.history.size());
  CHECK(counter.examples == epochs * config.epoch_size);
  CHECK(counter.row_updates == counter.examples * 2);
  CHECK(counter.cell_updates == counter.examples * 2 * config.dim);
}

TEST_CASE("sg task counters respect the per-example bounds") {
  const SynthResult synth = small_corpus();
  TrainConfig config;
  config.dim = 6;
  config.negatives = 4;
  config.max_epochs = 1;
  config.epoch_size = 800;
  config.seed = 29;
  const auto tasks = prod2vec_tasks(LossKind::kClassification);
  const TrainResult result =
      train(synth.corpus, nullptr, std::span<const TaskSpec>(tasks), config);
  const auto& counter = result.counters[0];
  CHECK(counter.examples == config.epoch_size);
  CHECK(counter.row_updates >= counter.examples * 2);
  CHECK(counter.row_updates <= counter.examples * (2 + config.negatives));
  CHECK(counter.cell_updates == counter.row_updates * config.dim);
}

TEST_CASE("divergence raises a numeric error with diagnostics") {
  const SynthResult synth = small_corpus();
  SpmiMatrix spmi;
  spmi.entries = {{0, 1, 1.0}};
  TrainConfig config;
  config.dim = 4;
  config.max_epochs = 1;
  config.epoch_size = 50;
  config.base_lr = 1e200;
  const std::vector<TaskSpec> tasks{
      {TaskSource::kSpmiCells, LossKind::kMatrixFactorization, 0, 0, 1.0}};
  CHECK_THROWS_AS(
      train(synth.corpus, &spmi, std::span<const TaskSpec>(tasks), config),
      NumericError);
}

TEST_CASE("hogwild mode runs and keeps counters consistent") {
  const SynthResult synth = small_corpus();
  TrainConfig config;
  config.dim = 8;
  config.negatives = 5;
  config.max_epochs = 2;
  config.epoch_size = 4000;
  config.hogwild_threads = 2;
  config.seed = 31;
  const auto tasks = prod2vec_tasks(LossKind::kRanking);
  const TrainResult result =
      train(synth.corpus, nullptr, std::span<const TaskSpec>(tasks), config);
  std::int64_t total = 0;
  for (const auto& record : result.history) {
    for (auto count : record.task_examples) total += count;
  }
  CHECK(total == static_cast<std::int64_t>(result.history.size()) *
                     config.epoch_size);
  for (double v : result.embeddings.pairs[0].input.values) {
    CHECK(std::isfinite(v));
  }
}

TEST_CASE("mf substitution keeps the browsing benefit of sg browse tasks") {
  // Cold items can only be placed through sessions; both the SG browsing
  // wiring and its MF replacement must beat popularity on them. The grouped
  // complement graph gives cold items warm session twins while keeping
  // popularity uninformative.
  SynthSpec spec;
  spec.vocab_size = 60;
  spec.n_baskets = 8000;
  spec.n_sessions = 50000;
  spec.max_set_size = 5;
  spec.complement_graph = grouped_complement_graph(60, 5);
  spec.view_purchase_correlation = 1.0;
  spec.zero_purchase_fraction = 0.2;
  spec.seed = 43;
  const SynthResult synth = generate(spec);
  const SpmiMatrix spmi = session_spmi(synth.corpus, 5);
  TrainConfig config;
  config.dim = 16;
  config.negatives = 5;
  config.max_epochs = 10;
  config.patience = 10;
  config.epoch_size = 30000;
  config.seed = 37;

  const auto mf_tasks = bb2vec_tasks(LossKind::kRanking, {4.0});
  const auto sg_tasks = bb2vec_sg_browse_tasks(LossKind::kRanking, {4.0});
  const TrainResult mf =
      train(synth.corpus, &spmi, std::span<const TaskSpec>(mf_tasks), config);
  const TrainResult sg =
      train(synth.corpus, nullptr, std::span<const TaskSpec>(sg_tasks), config);

  auto pairs = extract_pairs(
      std::span<const ItemSet>(synth.corpus.test_baskets),
      std::span<const std::int64_t>(synth.corpus.train_purchase_count));
  std::erase_if(pairs,
                [](const EvalPair& p) { return p.query_train_purchases > 0; });
  REQUIRE(pairs.size() > 50);

  const PopularityModel popularity{
      std::span<const std::int64_t>(synth.corpus.train_purchase_count)};
  const EmbeddingRecommender mf_rec(mf.embeddings.pairs[0].input,
                                    mf.embeddings.pairs[0].output);
  const EmbeddingRecommender sg_rec(sg.embeddings.pairs[0].input,
                                    sg.embeddings.pairs[0].output);
  const auto span = std::span<const EvalPair>(pairs);
  const double hr_pop = mean_hitrate_at_k(popularity, span, 10);
  const double hr_mf = mean_hitrate_at_k(mf_rec, span, 10);
  const double hr_sg = mean_hitrate_at_k(sg_rec, span, 10);
  CHECK(hr_mf > hr_pop);
  CHECK(hr_sg > hr_pop);
}
