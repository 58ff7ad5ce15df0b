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
#include <unordered_map>
#include <vector>

#include "bb2vec/common.hpp"

namespace bb2vec {

// Exact pair/item co-occurrence counts over a collection of ItemSets.
struct CooccurrenceStats {
  // Key packs the unordered pair (min, max); self-pairs are never stored.
  std::unordered_map<std::uint64_t, std::int64_t> pairs;
  std::vector<std::int64_t> item_counts;  // sets containing the item
  std::int64_t total_sets = 0;

  static std::uint64_t pair_key(ItemId i, ItemId j);
  std::int64_t pair_count(ItemId i, ItemId j) const;
};

// Exact counts via per-thread partial maps merged at the end; the result is
// identical for any thread count.
CooccurrenceStats count_cooccurrences(std::span<const ItemSet> sets,
                                      ItemId vocab_size, int threads = 1);

// One kept cell of the shifted-PMI matrix, upper triangle (i < j).
struct SpmiEntry {
  ItemId i;
  ItemId j;
  double value;
};

// Sparse symmetric shifted-PMI matrix: value = ln((n_ij/T)/((n_i/T)(n_j/T)))
// - ln(shift_k), kept only where n_ij >= min_pair_count.
struct SpmiMatrix {
  std::vector<SpmiEntry> entries;  // sorted by (i, j), i < j
  int shift_k = 1;
  std::int64_t min_pair_count = 1;

  bool empty() const { return entries.empty(); }
};

SpmiMatrix build_spmi(const CooccurrenceStats& stats, int shift_k,
                      std::int64_t min_pair_count);

// Empirical P(other | query) = n_pairs(other, query) / n_item(query).
double conditional_prob(const CooccurrenceStats& stats, ItemId query,
                        ItemId other);

// TSV `item_i <TAB> item_j <TAB> value`, upper triangle, loss-free round-trip.
void save_spmi(const SpmiMatrix& spmi, const std::string& path);
SpmiMatrix load_spmi(const std::string& path);

}  // namespace bb2vec
