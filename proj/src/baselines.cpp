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

#include "bb2vec/baselines.hpp"

#include <algorithm>

namespace bb2vec {

PopularityModel::PopularityModel(std::span<const std::int64_t> counts)
    : counts_(counts.begin(), counts.end()) {
  order_.resize(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    order_[i] = static_cast<ItemId>(i);
  }
  std::sort(order_.begin(), order_.end(), [&](ItemId a, ItemId b) {
    return counts[a] != counts[b] ? counts[a] > counts[b] : a < b;
  });
}

std::vector<ItemId> PopularityModel::topn(int n) const {
  const auto cut = std::min<std::size_t>(std::max(n, 0), order_.size());
  return {order_.begin(), order_.begin() + cut};
}

std::vector<ItemId> PopularityModel::topn(ItemId, int n) const {
  return topn(n);
}

std::vector<std::pair<ItemId, double>> PopularityModel::topn_scored(
    ItemId, int n) const {
  std::vector<std::pair<ItemId, double>> scored;
  for (ItemId item : topn(n)) {
    scored.emplace_back(item, static_cast<double>(counts_[item]));
  }
  return scored;
}

CoCountModel::CoCountModel(const CooccurrenceStats& basket_stats,
                           std::span<const std::int64_t> purchase_counts) {
  const std::size_t vocab = purchase_counts.size();
  ranked_.resize(vocab);
  for (const auto& [key, count] : basket_stats.pairs) {
    const auto i = static_cast<ItemId>(key >> 32);
    const auto j = static_cast<ItemId>(key & 0xffffffffULL);
    ranked_[i].emplace_back(j, count);
    ranked_[j].emplace_back(i, count);
  }
  for (std::size_t q = 0; q < vocab; ++q) {
    std::sort(ranked_[q].begin(), ranked_[q].end(),
              [&](const std::pair<ItemId, std::int64_t>& a,
                  const std::pair<ItemId, std::int64_t>& b) {
                if (a.second != b.second) return a.second > b.second;
                if (purchase_counts[a.first] != purchase_counts[b.first]) {
                  return purchase_counts[a.first] > purchase_counts[b.first];
                }
                return a.first < b.first;
              });
  }
}

std::vector<ItemId> CoCountModel::topn(ItemId query, int n) const {
  std::vector<ItemId> list;
  for (const auto& [item, count] : topn_scored(query, n)) {
    list.push_back(item);
  }
  return list;
}

std::vector<std::pair<ItemId, double>> CoCountModel::topn_scored(
    ItemId query, int n) const {
  if (query < 0 || static_cast<std::size_t>(query) >= ranked_.size()) {
    return {};
  }
  const auto& list = ranked_[query];
  const auto cut = std::min<std::size_t>(std::max(n, 0), list.size());
  std::vector<std::pair<ItemId, double>> scored;
  scored.reserve(cut);
  for (std::size_t r = 0; r < cut; ++r) {
    scored.emplace_back(list[r].first, static_cast<double>(list[r].second));
  }
  return scored;
}

}  // namespace bb2vec
