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

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bb2vec/common.hpp"
#include "bb2vec/cooccurrence.hpp"
#include "bb2vec/corpus.hpp"
#include "bb2vec/losses.hpp"
#include "bb2vec/model.hpp"

namespace bb2vec {

// kSessionPairs is a test-mode source for validating the MF substitution on
// small corpora; production browsing tasks go through kSpmiCells.
enum class TaskSource { kBasketPairs, kSessionPairs, kSpmiCells };
enum class LossKind { kClassification, kRanking, kMatrixFactorization };

// One learning task: where examples come from, which loss, and which
// representation slots it reads/writes.
struct TaskSpec {
  TaskSource source = TaskSource::kBasketPairs;
  LossKind loss = LossKind::kClassification;
  int input_pair = 0;   // index of the EmbeddingSet pair whose input is read
  int output_pair = 0;  // index of the pair whose output is read
  double weight = 1.0;
};

struct TrainConfig {
  int dim = 100;
  int negatives = 20;
  double base_lr = 0.05;
  double neg_alpha = 0.0;  // noise distribution ~ count^alpha; 0 = uniform
  std::int64_t epoch_size = 0;  // updates per epoch; 0 = #ordered train pairs
  int max_epochs = 20;
  int patience = 3;  // epochs without val improvement before stopping
  std::uint64_t seed = 1;
  int hogwild_threads = 1;       // >1 trades determinism for throughput
  std::int64_t max_val_pairs = 0;  // cap validation pairs; 0 = all
};

// Shared browsing-task weight; 0 degrades exactly to prod2vec.
struct BB2vecWiring {
  double lambda = 1.0;
};

// Categorical sampler over the vocabulary with probability ~ count^alpha.
class NegativeSampler {
 public:
  NegativeSampler(std::span<const std::int64_t> counts, double alpha);
  ItemId sample(Rng& rng) const;
  double probability(ItemId item) const;

 private:
  std::vector<double> cdf_;
};

// Uniform over all ordered pairs (w_I, w_O), w_I != w_O, within a set,
// across all sets (pair-uniform, not set-uniform).
class PairSampler {
 public:
  explicit PairSampler(std::span<const ItemSet> sets);
  std::pair<ItemId, ItemId> sample(Rng& rng) const;
  std::int64_t total_ordered_pairs() const { return total_pairs_; }

 private:
  std::span<const ItemSet> sets_;
  std::vector<std::int64_t> cum_pairs_;  // cumulative ordered-pair counts
  std::int64_t total_pairs_ = 0;
};

// Uniform over kept SPMI cells, both orientations eligible.
class CellSampler {
 public:
  explicit CellSampler(const SpmiMatrix& spmi);
  MfCell sample(Rng& rng) const;

 private:
  const SpmiMatrix* spmi_;
};

// Index i with probability weight_i / sum(weights); consumes exactly one
// draw. Throws DataError when all weights are zero.
int sample_task(std::span<const TaskSpec> specs, Rng& rng);

// Work done on behalf of one task, for complexity assertions.
struct TaskCounters {
  std::int64_t examples = 0;      // SGD updates
  std::int64_t row_updates = 0;   // distinct gradient rows applied
  std::int64_t cell_updates = 0;  // row_updates * dim
};

struct EpochRecord {
  int epoch = 0;
  std::vector<std::int64_t> task_examples;  // per task, this epoch
  double val_hitrate10 = 0.0;
};

struct TrainResult {
  EmbeddingSet embeddings;  // snapshot from the best validation epoch
  std::vector<EpochRecord> history;
  std::vector<TaskCounters> counters;  // per task, whole run
  int best_epoch = 0;
};

// Weighted task sampling with per-task example and negative sampling and
// AdaGrad updates over shared matrices; early stopping on validation
// HitRate@10 computed with the pair-0 scoring rule. Bit-reproducible under a
// fixed seed when hogwild_threads == 1.
TrainResult train(const Corpus& corpus, const SpmiMatrix* spmi,
                  std::span<const TaskSpec> specs, const TrainConfig& config);

// Task wirings. prod2vec: one basket task on pair 0. bb2vec: the basket task
// plus two MF browsing tasks that cross pair-0 and pair-1 representations.
std::vector<TaskSpec> prod2vec_tasks(LossKind sg_loss);
std::vector<TaskSpec> bb2vec_tasks(LossKind sg_loss, const BB2vecWiring& wiring);
// Test-mode wiring with SG browsing tasks instead of MF ones.
std::vector<TaskSpec> bb2vec_sg_browse_tasks(LossKind sg_loss,
                                             const BB2vecWiring& wiring);

// history TSV: epoch, per-task example counts, val HitRate@10.
void write_history_tsv(const TrainResult& result,
                       std::span<const TaskSpec> specs,
                       const std::string& path);

}  // namespace bb2vec
