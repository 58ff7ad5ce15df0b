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

#include "bb2vec/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "bb2vec/corpus.hpp"

namespace bb2vec {

std::vector<std::pair<ItemId, double>> Recommender::topn_scored(ItemId query,
                                                                int n) const {
  std::vector<std::pair<ItemId, double>> scored;
  for (ItemId item : topn(query, n)) scored.emplace_back(item, 0.0);
  return scored;
}

std::vector<std::pair<ItemId, double>> EmbeddingRecommender::topn_scored(
    ItemId query, int n) const {
  const ItemId vocab = output_->rows;
  std::vector<std::pair<ItemId, double>> scored;
  scored.reserve(vocab > 0 ? vocab - 1 : 0);
  const auto q = input_->row(query);
  for (ItemId m = 0; m < vocab; ++m) {
    if (m == query) continue;
    const auto c = output_->row(m);
    double dot = 0.0;
    for (int k = 0; k < input_->dim; ++k) dot += c[k] * q[k];
    scored.emplace_back(m, dot);
  }
  const auto cut = std::min<std::size_t>(n, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + cut, scored.end(),
                    [](const auto& a, const auto& b) {
                      return a.second != b.second ? a.second > b.second
                                                  : a.first < b.first;
                    });
  scored.resize(cut);
  return scored;
}

std::vector<ItemId> EmbeddingRecommender::topn(ItemId query, int n) const {
  std::vector<ItemId> result;
  for (const auto& [item, s] : topn_scored(query, n)) result.push_back(item);
  return result;
}

std::vector<EvalPair> extract_pairs(
    std::span<const ItemSet> baskets,
    std::span<const std::int64_t> train_purchase_count) {
  std::vector<EvalPair> pairs;
  for (const auto& basket : baskets) {
    if (basket.items.size() < 2) continue;
    for (ItemId query : basket.items) {
      for (ItemId target : basket.items) {
        if (query == target) continue;
        pairs.push_back({query, target, train_purchase_count[query]});
      }
    }
  }
  return pairs;
}

namespace {
// 1-based position of the target within the first k entries, 0 if absent.
int position_in_top_k(ItemId target, std::span<const ItemId> reclist, int k) {
  const auto limit = std::min<std::size_t>(k, reclist.size());
  for (std::size_t pos = 0; pos < limit; ++pos) {
    if (reclist[pos] == target) return static_cast<int>(pos) + 1;
  }
  return 0;
}
}  // namespace

int hitrate_at_k(const EvalPair& pair, std::span<const ItemId> reclist, int k) {
  return position_in_top_k(pair.target, reclist, k) > 0 ? 1 : 0;
}

double ndcg_at_k(const EvalPair& pair, std::span<const ItemId> reclist, int k) {
  const int pos = position_in_top_k(pair.target, reclist, k);
  if (pos == 0) return 0.0;
  return 1.0 / std::log2(static_cast<double>(pos) + 1.0);
}

EvalReport evaluate(const Recommender& recommender,
                    std::span<const EvalPair> pairs, std::span<const int> ks,
                    std::span<const std::int64_t> bucket_edges) {
  EvalReport report;
  report.ks.assign(ks.begin(), ks.end());
  report.bucket_edges.assign(bucket_edges.begin(), bucket_edges.end());
  report.total_pairs = static_cast<std::int64_t>(pairs.size());
  const std::size_t n_buckets = bucket_edges.size() + 1;
  const std::size_t n_ks = ks.size();
  const int max_k = ks.empty() ? 0 : *std::max_element(ks.begin(), ks.end());

  report.bucket_pairs.assign(n_buckets, 0);
  std::vector<std::vector<double>> hit_sums(n_buckets,
                                            std::vector<double>(n_ks, 0.0));
  std::vector<std::vector<double>> ndcg_sums(n_buckets,
                                             std::vector<double>(n_ks, 0.0));

  for (const auto& pair : pairs) {
    const std::vector<ItemId> reclist = recommender.topn(pair.query, max_k);
    const int bucket = bucket_for_count(pair.query_train_purchases, bucket_edges);
    ++report.bucket_pairs[bucket];
    for (std::size_t ki = 0; ki < n_ks; ++ki) {
      hit_sums[bucket][ki] += hitrate_at_k(pair, reclist, ks[ki]);
      ndcg_sums[bucket][ki] += ndcg_at_k(pair, reclist, ks[ki]);
    }
  }

  report.hitrate.assign(n_ks, 0.0);
  report.ndcg.assign(n_ks, 0.0);
  report.bucket_hitrate.assign(n_buckets, std::vector<double>(n_ks, 0.0));
  report.bucket_ndcg.assign(n_buckets, std::vector<double>(n_ks, 0.0));
  for (std::size_t ki = 0; ki < n_ks; ++ki) {
    double hit_total = 0.0, ndcg_total = 0.0;
    for (std::size_t b = 0; b < n_buckets; ++b) {
      hit_total += hit_sums[b][ki];
      ndcg_total += ndcg_sums[b][ki];
      if (report.bucket_pairs[b] > 0) {
        report.bucket_hitrate[b][ki] =
            hit_sums[b][ki] / static_cast<double>(report.bucket_pairs[b]);
        report.bucket_ndcg[b][ki] =
            ndcg_sums[b][ki] / static_cast<double>(report.bucket_pairs[b]);
      }
    }
    if (!pairs.empty()) {
      report.hitrate[ki] = hit_total / static_cast<double>(pairs.size());
      report.ndcg[ki] = ndcg_total / static_cast<double>(pairs.size());
    }
  }
  return report;
}

double mean_hitrate_at_k(const Recommender& recommender,
                         std::span<const EvalPair> pairs, int k) {
  if (pairs.empty()) return 0.0;
  std::int64_t hits = 0;
  for (const auto& pair : pairs) {
    const std::vector<ItemId> reclist = recommender.topn(pair.query, k);
    hits += hitrate_at_k(pair, reclist, k);
  }
  return static_cast<double>(hits) / static_cast<double>(pairs.size());
}

void write_report_tsv(const EvalReport& report, const std::string& method,
                      const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "method\tmetric\tK\tvalue\n";
  for (std::size_t ki = 0; ki < report.ks.size(); ++ki) {
    out << method << "\thitrate\t" << report.ks[ki] << '\t'
        << report.hitrate[ki] << '\n';
  }
  for (std::size_t ki = 0; ki < report.ks.size(); ++ki) {
    out << method << "\tndcg\t" << report.ks[ki] << '\t' << report.ndcg[ki]
        << '\n';
  }
}

void write_breakdown_tsv(const EvalReport& report, const std::string& method,
                         const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "method\tbucket_lo\tbucket_hi\tpairs";
  for (int k : report.ks) out << "\thitrate@" << k;
  out << '\n';
  const std::size_t n_buckets = report.bucket_edges.size() + 1;
  for (std::size_t b = 0; b < n_buckets; ++b) {
    const std::int64_t lo = b == 0 ? 0 : report.bucket_edges[b - 1];
    out << method << '\t' << lo << '\t';
    if (b < report.bucket_edges.size()) {
      out << report.bucket_edges[b];
    } else {
      out << "inf";
    }
    out << '\t' << report.bucket_pairs[b];
    for (std::size_t ki = 0; ki < report.ks.size(); ++ki) {
      out << '\t' << report.bucket_hitrate[b][ki];
    }
    out << '\n';
  }
}

}  // namespace bb2vec
