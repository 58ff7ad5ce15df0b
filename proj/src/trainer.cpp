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

#include "bb2vec/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <mutex>
#include <thread>

#include "bb2vec/evaluation.hpp"

namespace bb2vec {

NegativeSampler::NegativeSampler(std::span<const std::int64_t> counts,
                                 double alpha) {
  cdf_.resize(counts.size());
  double total = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    total += std::pow(static_cast<double>(counts[i]), alpha);
    cdf_[i] = total;
  }
  if (!(total > 0.0)) {
    throw DataError("negative sampler has zero total weight");
  }
}

ItemId NegativeSampler::sample(Rng& rng) const {
  std::uniform_real_distribution<double> uniform(0.0, cdf_.back());
  const double u = uniform(rng);
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const auto idx = std::min<std::size_t>(it - cdf_.begin(), cdf_.size() - 1);
  return static_cast<ItemId>(idx);
}

double NegativeSampler::probability(ItemId item) const {
  const double prev = item == 0 ? 0.0 : cdf_[item - 1];
  return (cdf_[item] - prev) / cdf_.back();
}

PairSampler::PairSampler(std::span<const ItemSet> sets) : sets_(sets) {
  cum_pairs_.resize(sets.size());
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const auto s = static_cast<std::int64_t>(sets[i].items.size());
    total_pairs_ += s >= 2 ? s * (s - 1) : 0;
    cum_pairs_[i] = total_pairs_;
  }
  if (total_pairs_ == 0) {
    throw DataError("no set with >= 2 items to sample pairs from");
  }
}

std::pair<ItemId, ItemId> PairSampler::sample(Rng& rng) const {
  std::uniform_int_distribution<std::int64_t> uniform(0, total_pairs_ - 1);
  const std::int64_t u = uniform(rng);
  const auto it = std::upper_bound(cum_pairs_.begin(), cum_pairs_.end(), u);
  const auto set_idx = static_cast<std::size_t>(it - cum_pairs_.begin());
  const std::int64_t base = set_idx == 0 ? 0 : cum_pairs_[set_idx - 1];
  const auto& items = sets_[set_idx].items;
  const auto s = static_cast<std::int64_t>(items.size());
  const std::int64_t r = u - base;
  const std::int64_t input_idx = r / (s - 1);
  std::int64_t output_idx = r % (s - 1);
  if (output_idx >= input_idx) ++output_idx;
  return {items[input_idx], items[output_idx]};
}

CellSampler::CellSampler(const SpmiMatrix& spmi) : spmi_(&spmi) {
  if (spmi.entries.empty()) {
    throw DataError("cannot sample from an empty SPMI matrix");
  }
}

MfCell CellSampler::sample(Rng& rng) const {
  std::uniform_int_distribution<std::int64_t> uniform(
      0, static_cast<std::int64_t>(spmi_->entries.size()) * 2 - 1);
  const std::int64_t u = uniform(rng);
  const SpmiEntry& entry = spmi_->entries[static_cast<std::size_t>(u / 2)];
  if (u % 2 == 0) return {entry.i, entry.j, entry.value};
  return {entry.j, entry.i, entry.value};
}

int sample_task(std::span<const TaskSpec> specs, Rng& rng) {
  if (specs.empty()) throw DataError("no tasks to sample");
  double total = 0.0;
  for (const auto& spec : specs) {
    if (spec.weight < 0.0) throw DataError("negative task weight");
    total += spec.weight;
  }
  if (!(total > 0.0)) throw DataError("all task weights are zero");
  std::uniform_real_distribution<double> uniform(0.0, total);
  const double u = uniform(rng);
  double cum = 0.0;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    cum += specs[i].weight;
    if (u < cum) return static_cast<int>(i);
  }
  return static_cast<int>(specs.size()) - 1;
}

std::vector<TaskSpec> prod2vec_tasks(LossKind sg_loss) {
  if (sg_loss == LossKind::kMatrixFactorization) {
    throw DataError("prod2vec basket task needs an SG loss");
  }
  return {{TaskSource::kBasketPairs, sg_loss, 0, 0, 1.0}};
}

std::vector<TaskSpec> bb2vec_tasks(LossKind sg_loss,
                                   const BB2vecWiring& wiring) {
  if (wiring.lambda < 0.0) throw DataError("lambda must be >= 0");
  if (sg_loss == LossKind::kMatrixFactorization) {
    throw DataError("bb2vec basket task needs an SG loss");
  }
  return {
      {TaskSource::kBasketPairs, sg_loss, 0, 0, 1.0},
      {TaskSource::kSpmiCells, LossKind::kMatrixFactorization, 0, 1,
       wiring.lambda},
      {TaskSource::kSpmiCells, LossKind::kMatrixFactorization, 1, 0,
       wiring.lambda},
  };
}

std::vector<TaskSpec> bb2vec_sg_browse_tasks(LossKind sg_loss,
                                             const BB2vecWiring& wiring) {
  if (wiring.lambda < 0.0) throw DataError("lambda must be >= 0");
  return {
      {TaskSource::kBasketPairs, sg_loss, 0, 0, 1.0},
      {TaskSource::kSessionPairs, sg_loss, 0, 1, wiring.lambda},
      {TaskSource::kSessionPairs, sg_loss, 1, 0, wiring.lambda},
  };
}

namespace {

void validate(const Corpus& corpus, const SpmiMatrix* spmi,
              std::span<const TaskSpec> specs, const TrainConfig& config) {
  if (specs.empty()) throw DataError("no training tasks");
  if (config.dim < 1) throw DataError("dim must be >= 1");
  if (config.negatives < 1) throw DataError("negatives must be >= 1");
  if (config.patience < 1) throw DataError("patience must be >= 1");
  if (config.base_lr <= 0.0) throw DataError("base_lr must be > 0");
  for (const auto& spec : specs) {
    const bool mf = spec.loss == LossKind::kMatrixFactorization;
    if (mf != (spec.source == TaskSource::kSpmiCells)) {
      throw DataError("MF loss pairs with spmi_cells, SG losses with pair sources");
    }
    if (spec.input_pair < 0 || spec.output_pair < 0) {
      throw DataError("negative matrix index");
    }
    if (spec.weight > 0.0 && spec.source == TaskSource::kSpmiCells &&
        spmi == nullptr) {
      throw DataError("task requires an SPMI matrix");
    }
  }
  if (corpus.vocab_size() == 0) throw DataError("empty vocabulary");
}

struct UpdateStreams {
  Rng task;
  Rng pair;
  Rng neg;
};

class UpdateEngine {
 public:
  UpdateEngine(const Corpus& corpus, const SpmiMatrix* spmi,
               std::span<const TaskSpec> specs, const TrainConfig& config,
               EmbeddingSet& set)
      : specs_(specs), config_(config), set_(&set) {
    // Samplers are built only for sources reachable through a positive
    // task weight, so a zero-lambda wiring needs no SPMI at all.
    auto needs = [&](TaskSource source) {
      for (const auto& spec : specs_) {
        if (spec.weight > 0.0 && spec.source == source) return true;
      }
      return false;
    };
    if (needs(TaskSource::kBasketPairs)) {
      basket_pairs_ = std::make_unique<PairSampler>(
          std::span<const ItemSet>(corpus.train_baskets));
      basket_negs_ = std::make_unique<NegativeSampler>(
          std::span<const std::int64_t>(corpus.train_purchase_count),
          config.neg_alpha);
    }
    if (needs(TaskSource::kSessionPairs)) {
      session_pairs_ = std::make_unique<PairSampler>(
          std::span<const ItemSet>(corpus.train_sessions));
      session_negs_ = std::make_unique<NegativeSampler>(
          std::span<const std::int64_t>(corpus.train_view_count),
          config.neg_alpha);
    }
    if (needs(TaskSource::kSpmiCells)) {
      cells_ = std::make_unique<CellSampler>(*spmi);
    }
  }

  std::int64_t default_epoch_size() const {
    if (basket_pairs_) return basket_pairs_->total_ordered_pairs();
    if (session_pairs_) return session_pairs_->total_ordered_pairs();
    return 0;
  }

  // One SGD update; returns the sampled task index.
  int step(UpdateStreams& streams, LossResult& scratch, PairExample& example,
           std::vector<TaskCounters>& counters) {
    const int t = sample_task(specs_, streams.task);
    const TaskSpec& task = specs_[static_cast<std::size_t>(t)];
    EmbeddingMatrix& in_mat = set_->pairs[task.input_pair].input;
    EmbeddingMatrix& out_mat = set_->pairs[task.output_pair].output;

    if (task.source == TaskSource::kSpmiCells) {
      const MfCell cell = cells_->sample(streams.pair);
      loss_mf(cell, in_mat, out_mat, scratch);
    } else {
      const bool sessions = task.source == TaskSource::kSessionPairs;
      const PairSampler& pairs = sessions ? *session_pairs_ : *basket_pairs_;
      const NegativeSampler& negs = sessions ? *session_negs_ : *basket_negs_;
      const auto [w_in, w_out] = pairs.sample(streams.pair);
      example.input_item = w_in;
      example.output_item = w_out;
      example.negatives.clear();
      for (int i = 0; i < config_.negatives; ++i) {
        example.negatives.push_back(negs.sample(streams.neg));
      }
      if (task.loss == LossKind::kClassification) {
        loss_classification(example, in_mat, out_mat, scratch);
      } else {
        loss_ranking(example, in_mat, out_mat, scratch);
      }
    }
    if (!std::isfinite(scratch.loss)) {
      throw NumericError("non-finite loss on task " + std::to_string(t));
    }

    for (std::size_t r = 0; r < scratch.input.size(); ++r) {
      adagrad_step(in_mat, scratch.input.rows[r], scratch.input.grad(r),
                   config_.base_lr);
    }
    for (std::size_t r = 0; r < scratch.output.size(); ++r) {
      adagrad_step(out_mat, scratch.output.rows[r], scratch.output.grad(r),
                   config_.base_lr);
    }

    auto& counter = counters[static_cast<std::size_t>(t)];
    const auto rows = static_cast<std::int64_t>(scratch.input.size() +
                                                scratch.output.size());
    counter.examples += 1;
    counter.row_updates += rows;
    counter.cell_updates += rows * config_.dim;
    return t;
  }

 private:
  std::span<const TaskSpec> specs_;
  const TrainConfig& config_;
  EmbeddingSet* set_;
  std::unique_ptr<PairSampler> basket_pairs_;
  std::unique_ptr<PairSampler> session_pairs_;
  std::unique_ptr<NegativeSampler> basket_negs_;
  std::unique_ptr<NegativeSampler> session_negs_;
  std::unique_ptr<CellSampler> cells_;
};

}  // namespace

TrainResult train(const Corpus& corpus, const SpmiMatrix* spmi,
                  std::span<const TaskSpec> specs, const TrainConfig& config) {
  validate(corpus, spmi, specs, config);

  TrainResult result;
  auto& set = result.embeddings;
  set.tokens = corpus.tokens;
  int n_pairs_needed = 1;
  for (const auto& spec : specs) {
    n_pairs_needed = std::max(
        {n_pairs_needed, spec.input_pair + 1, spec.output_pair + 1});
  }
  for (int p = 0; p < n_pairs_needed; ++p) {
    EmbeddingPair pair;
    pair.input = init_matrix(corpus.vocab_size(), config.dim,
                             mix_seed(config.seed, 100 + 2 * p));
    pair.output = init_matrix(corpus.vocab_size(), config.dim,
                              mix_seed(config.seed, 101 + 2 * p));
    set.pairs.push_back(std::move(pair));
  }

  UpdateEngine engine(corpus, spmi, specs, config, set);
  std::int64_t epoch_size = config.epoch_size > 0 ? config.epoch_size
                                                  : engine.default_epoch_size();
  if (epoch_size <= 0) {
    throw DataError("epoch_size is 0 and no pair source to derive it from");
  }

  // Validation pairs, optionally capped by a seeded subsample.
  std::vector<EvalPair> val_pairs = extract_pairs(
      std::span<const ItemSet>(corpus.val_baskets),
      std::span<const std::int64_t>(corpus.train_purchase_count));
  if (config.max_val_pairs > 0 &&
      static_cast<std::int64_t>(val_pairs.size()) > config.max_val_pairs) {
    Rng rng(mix_seed(config.seed, 4));
    std::shuffle(val_pairs.begin(), val_pairs.end(), rng);
    val_pairs.resize(static_cast<std::size_t>(config.max_val_pairs));
  }
  const bool have_val = !val_pairs.empty();

  result.counters.assign(specs.size(), TaskCounters{});
  EmbeddingSet best;
  double best_hr = -1.0;
  int epochs_since_best = 0;

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    EpochRecord record;
    record.epoch = epoch;
    record.task_examples.assign(specs.size(), 0);

    if (config.hogwild_threads <= 1) {
      // Independent per-purpose streams, re-derived per epoch. A task that is
      // never sampled therefore never shifts the example or negative draws.
      UpdateStreams streams{Rng(mix_seed(config.seed, 10 + 3ULL * epoch)),
                            Rng(mix_seed(config.seed, 11 + 3ULL * epoch)),
                            Rng(mix_seed(config.seed, 12 + 3ULL * epoch))};
      LossResult scratch;
      PairExample example;
      for (std::int64_t step = 0; step < epoch_size; ++step) {
        try {
          const int t = engine.step(streams, scratch, example, result.counters);
          ++record.task_examples[static_cast<std::size_t>(t)];
        } catch (const NumericError& e) {
          throw NumericError(std::string(e.what()) + " (epoch " +
                             std::to_string(epoch) + ", step " +
                             std::to_string(step) + ")");
        }
      }
    } else {
      // Hogwild: racy lock-free updates, reproducible only in distribution.
      const int n_threads = config.hogwild_threads;
      std::vector<std::vector<TaskCounters>> thread_counters(
          n_threads, std::vector<TaskCounters>(specs.size()));
      std::vector<std::thread> threads;
      std::exception_ptr first_error;
      std::mutex error_mutex;
      for (int tid = 0; tid < n_threads; ++tid) {
        threads.emplace_back([&, tid] {
          try {
            const std::uint64_t base =
                mix_seed(config.seed, 1000 + 3ULL * (epoch * n_threads + tid));
            UpdateStreams streams{Rng(base), Rng(base + 1), Rng(base + 2)};
            LossResult scratch;
            PairExample example;
            const std::int64_t n =
                epoch_size / n_threads + (tid < epoch_size % n_threads ? 1 : 0);
            for (std::int64_t step = 0; step < n; ++step) {
              engine.step(streams, scratch, example, thread_counters[tid]);
            }
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
          }
        });
      }
      for (auto& thread : threads) thread.join();
      if (first_error) std::rethrow_exception(first_error);
      for (int tid = 0; tid < n_threads; ++tid) {
        for (std::size_t t = 0; t < specs.size(); ++t) {
          result.counters[t].examples += thread_counters[tid][t].examples;
          result.counters[t].row_updates += thread_counters[tid][t].row_updates;
          result.counters[t].cell_updates +=
              thread_counters[tid][t].cell_updates;
          record.task_examples[t] += thread_counters[tid][t].examples;
        }
      }
    }

    if (have_val) {
      EmbeddingRecommender recommender(set.pairs[0].input,
                                       set.pairs[0].output);
      record.val_hitrate10 = mean_hitrate_at_k(
          recommender, std::span<const EvalPair>(val_pairs), 10);
    }
    result.history.push_back(record);

    if (have_val) {
      if (record.val_hitrate10 > best_hr) {
        best_hr = record.val_hitrate10;
        result.best_epoch = epoch;
        best = set;  // deep copy snapshot
        epochs_since_best = 0;
      } else if (++epochs_since_best >= config.patience) {
        break;
      }
    }
  }

  if (have_val) {
    result.embeddings = std::move(best);
  } else {
    result.best_epoch =
        result.history.empty() ? 0 : result.history.back().epoch;
  }
  return result;
}

void write_history_tsv(const TrainResult& result,
                       std::span<const TaskSpec> specs,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "epoch";
  for (std::size_t t = 0; t < specs.size(); ++t) out << "\ttask" << t;
  out << "\tval_hitrate10\n";
  for (const auto& record : result.history) {
    out << record.epoch;
    for (const auto count : record.task_examples) out << '\t' << count;
    out << '\t' << record.val_hitrate10 << '\n';
  }
}

}  // namespace bb2vec
