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
#include "bb2vec/model.hpp"

namespace bb2vec {

// All losses are written in minimization form. Sigmoid inputs are clamped to
// +-30 before exponentiation; losses and gradients use the same clamp so
// finite differences stay consistent.
double sigmoid(double x);
double log_sigmoid(double x);

// One positive (input, output) pair plus noise-sampled negatives.
struct PairExample {
  ItemId input_item;
  ItemId output_item;
  std::vector<ItemId> negatives;
};

// One sampled cell of the shifted-PMI matrix: the model fits
// v'_i . v_j -> target, with i on the output side and j on the input side.
struct MfCell {
  ItemId i;
  ItemId j;
  double target;
};

// Sparse row gradients for one matrix: row id -> dense d-vector, rows
// accumulated by id (repeated negatives fold into one row).
struct RowGrads {
  std::vector<ItemId> rows;
  std::vector<double> data;  // rows.size() * dim, row-major
  int dim = 0;

  void reset(int d) {
    rows.clear();
    data.clear();
    dim = d;
  }
  std::size_t size() const { return rows.size(); }
  std::span<double> at(ItemId row);  // get-or-insert zeroed row
  std::span<const double> grad(std::size_t idx) const {
    return {data.data() + idx * dim, static_cast<std::size_t>(dim)};
  }
};

struct LossResult {
  double loss = 0.0;
  RowGrads input;   // rows of the task's input matrix
  RowGrads output;  // rows of the task's output matrix

  void reset(int dim) {
    loss = 0.0;
    input.reset(dim);
    output.reset(dim);
  }
};

// loss = -[log s(v'_O . v_I) + sum_i log s(-v'_i . v_I)]
void loss_classification(const PairExample& example,
                         const EmbeddingMatrix& input,
                         const EmbeddingMatrix& output, LossResult& out);

// loss = -sum_i log s((v'_O - v'_i) . v_I)
void loss_ranking(const PairExample& example, const EmbeddingMatrix& input,
                  const EmbeddingMatrix& output, LossResult& out);

// loss = 1/2 (target - v'_i . v_j)^2
void loss_mf(const MfCell& cell, const EmbeddingMatrix& input,
             const EmbeddingMatrix& output, LossResult& out);

}  // namespace bb2vec
