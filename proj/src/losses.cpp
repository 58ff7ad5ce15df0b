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

#include "bb2vec/losses.hpp"

#include <algorithm>
#include <cmath>

namespace bb2vec {

namespace {
constexpr double kClamp = 30.0;

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}
}  // namespace

double sigmoid(double x) {
  const double c = std::clamp(x, -kClamp, kClamp);
  if (c >= 0.0) return 1.0 / (1.0 + std::exp(-c));
  const double e = std::exp(c);
  return e / (1.0 + e);
}

double log_sigmoid(double x) {
  const double c = std::clamp(x, -kClamp, kClamp);
  if (c >= 0.0) return -std::log1p(std::exp(-c));
  return c - std::log1p(std::exp(c));
}

std::span<double> RowGrads::at(ItemId row) {
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] == row) {
      return {data.data() + r * dim, static_cast<std::size_t>(dim)};
    }
  }
  rows.push_back(row);
  data.resize(data.size() + dim, 0.0);
  return {data.data() + (rows.size() - 1) * dim, static_cast<std::size_t>(dim)};
}

void loss_classification(const PairExample& example,
                         const EmbeddingMatrix& input,
                         const EmbeddingMatrix& output, LossResult& out) {
  const int d = input.dim;
  out.reset(d);
  const auto v_in = input.row(example.input_item);
  // The input side holds this single row, so its span stays valid throughout.
  auto g_in = out.input.at(example.input_item);

  const auto v_pos = output.row(example.output_item);
  const double s_pos = dot(v_pos, v_in);
  out.loss = -log_sigmoid(s_pos);
  // d/ds of -log s(s) = s(s) - 1
  const double c_pos = sigmoid(s_pos) - 1.0;
  auto g_pos = out.output.at(example.output_item);
  for (int k = 0; k < d; ++k) {
    g_pos[k] += c_pos * v_in[k];
    g_in[k] += c_pos * v_pos[k];
  }

  for (ItemId neg : example.negatives) {
    const auto v_neg = output.row(neg);
    const double s_neg = dot(v_neg, v_in);
    out.loss -= log_sigmoid(-s_neg);
    // d/ds of -log s(-s) = s(s)
    const double c_neg = sigmoid(s_neg);
    auto g_neg = out.output.at(neg);
    for (int k = 0; k < d; ++k) {
      g_neg[k] += c_neg * v_in[k];
      g_in[k] += c_neg * v_neg[k];
    }
  }
}

void loss_ranking(const PairExample& example, const EmbeddingMatrix& input,
                  const EmbeddingMatrix& output, LossResult& out) {
  const int d = input.dim;
  out.reset(d);
  const auto v_in = input.row(example.input_item);
  const auto v_pos = output.row(example.output_item);
  // Register the fixed rows up front so only at(neg) below can reallocate,
  // and it runs before the other spans are acquired.
  out.input.at(example.input_item);
  out.output.at(example.output_item);

  for (ItemId neg : example.negatives) {
    const auto v_neg = output.row(neg);
    // a = (v'_O - v'_neg) . v_I
    double a = 0.0;
    for (int k = 0; k < d; ++k) a += (v_pos[k] - v_neg[k]) * v_in[k];
    out.loss -= log_sigmoid(a);
    // d/da of -log s(a) = s(a) - 1
    const double c = sigmoid(a) - 1.0;
    auto g_neg = out.output.at(neg);
    auto g_pos = out.output.at(example.output_item);
    auto g_in = out.input.at(example.input_item);
    for (int k = 0; k < d; ++k) {
      g_pos[k] += c * v_in[k];
      g_neg[k] -= c * v_in[k];
      g_in[k] += c * (v_pos[k] - v_neg[k]);
    }
  }
}

void loss_mf(const MfCell& cell, const EmbeddingMatrix& input,
             const EmbeddingMatrix& output, LossResult& out) {
  const int d = input.dim;
  out.reset(d);
  const auto v_in = input.row(cell.j);
  const auto v_out = output.row(cell.i);
  const double residual = cell.target - dot(v_out, v_in);
  out.loss = 0.5 * residual * residual;
  auto g_in = out.input.at(cell.j);
  auto g_out = out.output.at(cell.i);
  for (int k = 0; k < d; ++k) {
    g_in[k] = -residual * v_out[k];
    g_out[k] = -residual * v_in[k];
  }
}

}  // namespace bb2vec
