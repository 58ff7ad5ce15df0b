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

#include "bb2vec/cooccurrence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

namespace bb2vec {

std::uint64_t CooccurrenceStats::pair_key(ItemId i, ItemId j) {
  const auto lo = static_cast<std::uint64_t>(std::min(i, j));
  const auto hi = static_cast<std::uint64_t>(std::max(i, j));
  return (lo << 32) | hi;
}

std::int64_t CooccurrenceStats::pair_count(ItemId i, ItemId j) const {
  if (i == j) return 0;
  const auto it = pairs.find(pair_key(i, j));
  return it == pairs.end() ? 0 : it->second;
}

namespace {

CooccurrenceStats count_range(std::span<const ItemSet> sets, ItemId vocab_size) {
  CooccurrenceStats stats;
  stats.item_counts.assign(vocab_size, 0);
  stats.total_sets = static_cast<std::int64_t>(sets.size());
  for (const auto& set : sets) {
    for (std::size_t a = 0; a < set.items.size(); ++a) {
      ++stats.item_counts[set.items[a]];
      for (std::size_t b = a + 1; b < set.items.size(); ++b) {
        ++stats.pairs[CooccurrenceStats::pair_key(set.items[a], set.items[b])];
      }
    }
  }
  return stats;
}

}  // namespace

CooccurrenceStats count_cooccurrences(std::span<const ItemSet> sets,
                                      ItemId vocab_size, int threads) {
  if (threads <= 1 || sets.size() < 2 * static_cast<std::size_t>(threads)) {
    return count_range(sets, vocab_size);
  }
  std::vector<CooccurrenceStats> partials(threads);
  std::vector<std::thread> workers;
  const std::size_t chunk = (sets.size() + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(sets.size(), begin + chunk);
    workers.emplace_back([&, t, begin, end] {
      partials[t] = count_range(sets.subspan(begin, end - begin), vocab_size);
    });
  }
  for (auto& worker : workers) worker.join();

  CooccurrenceStats stats = std::move(partials[0]);
  for (int t = 1; t < threads; ++t) {
    stats.total_sets += partials[t].total_sets;
    for (ItemId i = 0; i < vocab_size; ++i) {
      stats.item_counts[i] += partials[t].item_counts[i];
    }
    for (const auto& [key, count] : partials[t].pairs) {
      stats.pairs[key] += count;
    }
  }
  return stats;
}

SpmiMatrix build_spmi(const CooccurrenceStats& stats, int shift_k,
                      std::int64_t min_pair_count) {
  if (stats.total_sets <= 0) {
    throw DataError("cannot build SPMI from zero sets");
  }
  if (shift_k < 1) {
    throw DataError("shift_k must be >= 1");
  }
  SpmiMatrix spmi;
  spmi.shift_k = shift_k;
  spmi.min_pair_count = min_pair_count;
  const double log_shift = std::log(static_cast<double>(shift_k));
  const double total = static_cast<double>(stats.total_sets);
  spmi.entries.reserve(stats.pairs.size());
  for (const auto& [key, count] : stats.pairs) {
    if (count < min_pair_count) continue;
    const auto i = static_cast<ItemId>(key >> 32);
    const auto j = static_cast<ItemId>(key & 0xffffffffULL);
    const double pmi =
        std::log((static_cast<double>(count) / total) /
                 ((static_cast<double>(stats.item_counts[i]) / total) *
                  (static_cast<double>(stats.item_counts[j]) / total)));
    spmi.entries.push_back({i, j, pmi - log_shift});
  }
  std::sort(spmi.entries.begin(), spmi.entries.end(),
            [](const SpmiEntry& a, const SpmiEntry& b) {
              return a.i != b.i ? a.i < b.i : a.j < b.j;
            });
  return spmi;
}

double conditional_prob(const CooccurrenceStats& stats, ItemId query,
                        ItemId other) {
  const std::int64_t n_query = stats.item_counts[query];
  if (n_query <= 0) {
    throw DataError("conditional probability for unseen item " +
                    std::to_string(query));
  }
  return static_cast<double>(stats.pair_count(query, other)) /
         static_cast<double>(n_query);
}

void save_spmi(const SpmiMatrix& spmi, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "#shift_k\t" << spmi.shift_k << "\tmin_pair_count\t"
      << spmi.min_pair_count << '\n';
  char buf[64];
  for (const auto& entry : spmi.entries) {
    std::snprintf(buf, sizeof(buf), "%.17g", entry.value);
    out << entry.i << '\t' << entry.j << '\t' << buf << '\n';
  }
}

SpmiMatrix load_spmi(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path);
  SpmiMatrix spmi;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ss(line.substr(1));
      std::string k1, k2;
      if (!(ss >> k1 >> spmi.shift_k >> k2 >> spmi.min_pair_count)) {
        throw ParseError("malformed SPMI header", line_no);
      }
      continue;
    }
    SpmiEntry entry;
    std::istringstream ss(line);
    if (!(ss >> entry.i >> entry.j >> entry.value) || entry.i >= entry.j) {
      throw ParseError("malformed SPMI row", line_no);
    }
    spmi.entries.push_back(entry);
  }
  std::sort(spmi.entries.begin(), spmi.entries.end(),
            [](const SpmiEntry& a, const SpmiEntry& b) {
              return a.i != b.i ? a.i < b.i : a.j < b.j;
            });
  return spmi;
}

}  // namespace bb2vec
