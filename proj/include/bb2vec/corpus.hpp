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

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "bb2vec/common.hpp"

namespace bb2vec {

struct IngestConfig {
  // Items with fewer purchases than this over the whole dataset are removed
  // from baskets (0 = keep everything).
  std::int64_t min_item_purchases = 0;
  // (train, val, test), positive entries summing to 1 within 1e-9.
  std::array<double, 3> split_fractions{0.7, 0.15, 0.15};
  std::uint64_t split_seed = 1;
  // When true, a basket is assigned to the same split as its session.
  // Otherwise baskets and sessions are split independently with the same seed.
  bool keep_basket_session_link = true;
};

// Immutable after construction; safe to share across threads for reads.
struct Corpus {
  std::vector<std::string> tokens;  // id -> raw item token
  std::vector<ItemSet> train_baskets;
  std::vector<ItemSet> val_baskets;
  std::vector<ItemSet> test_baskets;
  std::vector<ItemSet> train_sessions;
  // Number of train baskets / train sessions containing the item (one count
  // per set, duplicates collapsed at ingest).
  std::vector<std::int64_t> train_purchase_count;
  std::vector<std::int64_t> train_view_count;

  ItemId vocab_size() const { return static_cast<ItemId>(tokens.size()); }
  // -1 when the token is not in the vocabulary.
  ItemId item_id(const std::string& token) const;
};

// Reads a tab-separated event log (`view|purchase <TAB> session_id <TAB>
// item_token`), applies filtering/binarization and splits sessions (with
// their linked baskets) into train/val/test. Deterministic given the seed.
Corpus ingest(const std::string& events_path, const IngestConfig& config);
Corpus ingest(std::istream& events, const IngestConfig& config);

// Seeded shuffle split: returns 0 (train), 1 (val) or 2 (test) per unit.
std::vector<int> split_assignments(std::size_t n,
                                   const std::array<double, 3>& fractions,
                                   std::uint64_t seed);

// Half-open bucket intervals: bucket 0 is [0, edges[0]), bucket i is
// [edges[i-1], edges[i]), last bucket is [edges.back(), inf).
int bucket_for_count(std::int64_t count, std::span<const std::int64_t> edges);
int purchase_bucket(ItemId item, const Corpus& corpus,
                    std::span<const std::int64_t> edges);

// Corpus directory: vocab.tsv plus one TSV per collection, one ItemSet per
// line as space-separated ids. Round-trips losslessly.
void save_corpus(const Corpus& corpus, const std::string& dir);
Corpus load_corpus(const std::string& dir);

}  // namespace bb2vec
