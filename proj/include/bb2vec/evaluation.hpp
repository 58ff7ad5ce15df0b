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
#include <vector>

#include "bb2vec/common.hpp"
#include "bb2vec/model.hpp"

namespace bb2vec {

// Top-N provider. Model-backed implementations must exclude the query item
// from the returned list; query-independent ones (popularity) need not.
class Recommender {
 public:
  virtual ~Recommender() = default;
  virtual std::vector<ItemId> topn(ItemId query, int n) const = 0;
  // Ranking with scores attached, for recommendation dumps. The default
  // reports zero scores for recommenders without a natural scale.
  virtual std::vector<std::pair<ItemId, double>> topn_scored(ItemId query,
                                                             int n) const;
};

// Scores every candidate as v'_m . v_q over one matrix pair, excludes the
// query, ties broken by ascending id.
class EmbeddingRecommender : public Recommender {
 public:
  EmbeddingRecommender(const EmbeddingMatrix& input,
                       const EmbeddingMatrix& output)
      : input_(&input), output_(&output) {}

  std::vector<ItemId> topn(ItemId query, int n) const override;
  std::vector<std::pair<ItemId, double>> topn_scored(ItemId query,
                                                     int n) const override;

 private:
  const EmbeddingMatrix* input_;
  const EmbeddingMatrix* output_;
};

// One directional hold-out case: predict target given query.
struct EvalPair {
  ItemId query;
  ItemId target;
  std::int64_t query_train_purchases = 0;
};

// All ordered pairs from each basket of size >= 2.
std::vector<EvalPair> extract_pairs(
    std::span<const ItemSet> baskets,
    std::span<const std::int64_t> train_purchase_count);

// 1 iff the target sits within the first K entries of the list.
int hitrate_at_k(const EvalPair& pair, std::span<const ItemId> reclist, int k);
// 1/log2(pos+1) with 1-based pos if found in the top K, else 0.
double ndcg_at_k(const EvalPair& pair, std::span<const ItemId> reclist, int k);

struct EvalReport {
  std::vector<int> ks;
  std::vector<std::int64_t> bucket_edges;
  std::int64_t total_pairs = 0;
  std::vector<double> hitrate;  // per K
  std::vector<double> ndcg;     // per K
  std::vector<std::int64_t> bucket_pairs;
  std::vector<std::vector<double>> bucket_hitrate;  // [bucket][k]
  std::vector<std::vector<double>> bucket_ndcg;     // [bucket][k]
};

// Deterministic ordered reduction; the overall values equal the pair-count
// weighted mean of the bucket values.
EvalReport evaluate(const Recommender& recommender,
                    std::span<const EvalPair> pairs, std::span<const int> ks,
                    std::span<const std::int64_t> bucket_edges);

// Lean per-epoch validation metric (same scoring semantics as evaluate).
double mean_hitrate_at_k(const Recommender& recommender,
                         std::span<const EvalPair> pairs, int k);

// report TSV: method <TAB> metric <TAB> K <TAB> value
void write_report_tsv(const EvalReport& report, const std::string& method,
                      const std::string& path);
// breakdown TSV: bucket_lo <TAB> bucket_hi <TAB> pairs <TAB> hitrate@K ...
void write_breakdown_tsv(const EvalReport& report, const std::string& method,
                         const std::string& path);

}  // namespace bb2vec
