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

namespace bb2vec {

// Added to the denominator after the square root so the first update never
// divides by zero.
inline constexpr double kAdagradEps = 1e-8;

// Row-major dense matrix with per-cell AdaGrad accumulators.
struct EmbeddingMatrix {
  ItemId rows = 0;
  int dim = 0;
  std::vector<double> values;
  std::vector<double> accum;

  std::span<double> row(ItemId r) {
    return {values.data() + static_cast<std::size_t>(r) * dim,
            static_cast<std::size_t>(dim)};
  }
  std::span<const double> row(ItemId r) const {
    return {values.data() + static_cast<std::size_t>(r) * dim,
            static_cast<std::size_t>(dim)};
  }
};

// Values i.i.d. N(0, 0.1) (standard deviation 0.1), accumulators zero.
// Deterministic under the seed.
EmbeddingMatrix init_matrix(ItemId vocab_size, int dim, std::uint64_t seed);

// v'_candidate . v_query: output representation of the candidate against the
// input representation of the query.
double score(const EmbeddingMatrix& input, const EmbeddingMatrix& output,
             ItemId query, ItemId candidate);

// Per cell: accum += g^2; value -= base_lr * g / (sqrt(accum) + eps).
// Throws NumericError on a non-finite gradient.
void adagrad_step(EmbeddingMatrix& matrix, ItemId row,
                  std::span<const double> grad, double base_lr);

// One (input, output) matrix pair per representation slot. Pair 0 holds the
// basket representations used for recommendation scoring.
struct EmbeddingPair {
  EmbeddingMatrix input;
  EmbeddingMatrix output;
};

struct EmbeddingSet {
  std::vector<EmbeddingPair> pairs;
  std::vector<std::string> tokens;  // optional id -> token mapping
};

// Binary checkpoint; accumulators are written when with_accumulators is set
// so a resumed run reproduces the next update exactly. Load never leaves
// partial state behind and rejects version mismatches and truncation.
void save_embeddings(const EmbeddingSet& set, const std::string& path,
                     bool with_accumulators = false);
EmbeddingSet load_embeddings(const std::string& path);

// Word-vector text convention: first line `vocab_size dim`, then
// `token v1 .. vd`. One file per matrix: in_<pair>.vec / out_<pair>.vec.
void export_embeddings_text(const EmbeddingSet& set, const std::string& dir);

}  // namespace bb2vec
