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
#include <vector>

#include "bb2vec/common.hpp"
#include "bb2vec/cooccurrence.hpp"
#include "bb2vec/evaluation.hpp"

namespace bb2vec {

// Items sorted by train purchase count descending, ties by ascending id.
// Query-independent.
class PopularityModel : public Recommender {
 public:
  explicit PopularityModel(std::span<const std::int64_t> purchase_counts);

  std::vector<ItemId> topn(ItemId query, int n) const override;
  std::vector<ItemId> topn(int n) const;
  // Scores are train purchase counts.
  std::vector<std::pair<ItemId, double>> topn_scored(ItemId query,
                                                     int n) const override;

 private:
  std::vector<ItemId> order_;
  std::vector<std::int64_t> counts_;
};

// Candidates ranked by (joint purchases desc, purchase count desc, id asc);
// items never co-purchased with the query are excluded, so lists may be
// shorter than n. Unseen queries get an empty list.
class CoCountModel : public Recommender {
 public:
  CoCountModel(const CooccurrenceStats& basket_stats,
               std::span<const std::int64_t> purchase_counts);

  std::vector<ItemId> topn(ItemId query, int n) const override;
  // Scores are joint purchase counts with the query.
  std::vector<std::pair<ItemId, double>> topn_scored(ItemId query,
                                                     int n) const override;

 private:
  // Per query, full candidate list sorted by rank, with joint counts.
  std::vector<std::vector<std::pair<ItemId, std::int64_t>>> ranked_;
};

}  // namespace bb2vec
