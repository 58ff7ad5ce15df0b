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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "bb2vec/losses.hpp"

using namespace bb2vec;

namespace {

EmbeddingMatrix random_matrix(ItemId rows, int dim, std::uint64_t seed,
                              double scale = 0.5) {
  EmbeddingMatrix m = init_matrix(rows, dim, seed);
  for (double& v : m.values) v *= scale / 0.1;
  return m;
}

using LossFn = std::function<void(const EmbeddingMatrix&,
                                  const EmbeddingMatrix&, LossResult&)>;

// Central finite differences over every row the analytic gradient names;
// returns the vector-level relative error.
double gradcheck(const LossFn& fn, EmbeddingMatrix& input,
                 EmbeddingMatrix& output) {
  LossResult res;
  fn(input, output, res);
  const double h = 1e-6;
  double diff_sq = 0.0, ana_sq = 0.0, num_sq = 0.0;
  auto probe = [&](EmbeddingMatrix& m, const RowGrads& grads) {
    for (std::size_t r = 0; r < grads.size(); ++r) {
      const ItemId row = grads.rows[r];
      const auto ana = grads.grad(r);
      for (int k = 0; k < m.dim; ++k) {
        double& cell = m.values[static_cast<std::size_t>(row) * m.dim + k];
        const double orig = cell;
        LossResult plus, minus;
        cell = orig + h;
        fn(input, output, plus);
        cell = orig - h;
        fn(input, output, minus);
        cell = orig;
        const double numeric = (plus.loss - minus.loss) / (2.0 * h);
        diff_sq += (ana[k] - numeric) * (ana[k] - numeric);
        ana_sq += ana[k] * ana[k];
        num_sq += numeric * numeric;
      }
    }
  };
  probe(input, res.input);
  probe(output, res.output);
  const double denom =
      std::max({std::sqrt(ana_sq), std::sqrt(num_sq), 1e-12});
  return std::sqrt(diff_sq) / denom;
}

}  // namespace

TEST_CASE("classification loss at zero vectors") {
  EmbeddingMatrix input = init_matrix(4, 6, 1);
  EmbeddingMatrix output = init_matrix(4, 6, 2);
  std::fill(input.values.begin(), input.values.end(), 0.0);
  std::fill(output.values.begin(), output.values.end(), 0.0);
  const PairExample example{0, 1, {2}};
  LossResult res;
  loss_classification(example, input, output, res);
  CHECK(res.loss == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("classification loss saturates to zero") {
  EmbeddingMatrix input = init_matrix(3, 2, 1);
  EmbeddingMatrix output = init_matrix(3, 2, 2);
  input.row(0)[0] = 10.0;
  input.row(0)[1] = 0.0;
  output.row(1)[0] = 10.0;   // positive dot = 100
  output.row(1)[1] = 0.0;
  output.row(2)[0] = -10.0;  // negative dot = -100
  output.row(2)[1] = 0.0;
  const PairExample example{0, 1, {2}};
  LossResult res;
  loss_classification(example, input, output, res);
  CHECK(res.loss < 1e-9);
  CHECK(res.loss >= 0.0);
}

TEST_CASE("classification gradients match finite differences") {
  Rng rng(99);
  std::uniform_int_distribution<ItemId> item(0, 9);
  for (int trial = 0; trial < 30; ++trial) {
    EmbeddingMatrix input = random_matrix(10, 8, 1000 + trial);
    EmbeddingMatrix output = random_matrix(10, 8, 2000 + trial);
    PairExample example;
    example.input_item = item(rng);
    example.output_item = item(rng);
    const int k = trial % 3 == 0 ? 1 : (trial % 3 == 1 ? 5 : 20);
    for (int i = 0; i < k; ++i) example.negatives.push_back(item(rng));
    const double err = gradcheck(
        [&](const EmbeddingMatrix& in, const EmbeddingMatrix& out,
            LossResult& res) { loss_classification(example, in, out, res); },
        input, output);
    CHECK(err < 1e-5);
  }
}

TEST_CASE("ranking loss at zero vectors is k ln 2") {
  EmbeddingMatrix input = init_matrix(5, 4, 1);
  EmbeddingMatrix output = init_matrix(5, 4, 2);
  std::fill(input.values.begin(), input.values.end(), 0.0);
  std::fill(output.values.begin(), output.values.end(), 0.0);
  const PairExample example{0, 1, {2, 3, 4}};
  LossResult res;
  loss_ranking(example, input, output, res);
  CHECK(res.loss == doctest::Approx(3.0 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("ranking: negatives equal to the positive contribute ln 2 each") {
  EmbeddingMatrix input = random_matrix(6, 8, 3);
  EmbeddingMatrix output = random_matrix(6, 8, 4);
  const PairExample example{2, 4, {4, 4}};
  LossResult res;
  loss_ranking(example, input, output, res);
  CHECK(res.loss == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
  // Score difference is identically zero, so the example is uninformative.
  for (double g : res.input.data) CHECK(g == 0.0);
  for (double g : res.output.data) CHECK(g == 0.0);
}

TEST_CASE("ranking gradients match finite differences") {
  Rng rng(77);
  std::uniform_int_distribution<ItemId> item(0, 9);
  for (int trial = 0; trial < 30; ++trial) {
    EmbeddingMatrix input = random_matrix(10, 8, 3000 + trial);
    EmbeddingMatrix output = random_matrix(10, 8, 4000 + trial);
    PairExample example;
    example.input_item = item(rng);
    example.output_item = item(rng);
    const int k = trial % 3 == 0 ? 1 : (trial % 3 == 1 ? 5 : 20);
    for (int i = 0; i < k; ++i) example.negatives.push_back(item(rng));
    const double err = gradcheck(
        [&](const EmbeddingMatrix& in, const EmbeddingMatrix& out,
            LossResult& res) { loss_ranking(example, in, out, res); },
        input, output);
    CHECK(err < 1e-5);
  }
}

TEST_CASE("mf loss basics") {
  EmbeddingMatrix input = random_matrix(4, 3, 5);
  EmbeddingMatrix output = random_matrix(4, 3, 6);

  // Exact fit: loss and gradients vanish.
  double dot = 0.0;
  for (int k = 0; k < 3; ++k) dot += output.row(1)[k] * input.row(2)[k];
  LossResult res;
  loss_mf({1, 2, dot}, input, output, res);
  CHECK(res.loss == doctest::Approx(0.0).epsilon(1e-15));
  for (double g : res.input.data) CHECK(g == doctest::Approx(0.0));
  for (double g : res.output.data) CHECK(g == doctest::Approx(0.0));

  // target 1, dot 0.
  std::fill(input.values.begin(), input.values.end(), 0.0);
  loss_mf({1, 2, 1.0}, input, output, res);
  CHECK(res.loss == doctest::Approx(0.5));
}

TEST_CASE("mf gradients match finite differences") {
  Rng rng(55);
  std::uniform_int_distribution<ItemId> item(0, 9);
  std::normal_distribution<double> target(0.0, 2.0);
  for (int trial = 0; trial < 30; ++trial) {
    EmbeddingMatrix input = random_matrix(10, 8, 5000 + trial);
    EmbeddingMatrix output = random_matrix(10, 8, 6000 + trial);
    ItemId i = item(rng), j = item(rng);
    while (j == i) j = item(rng);
    const MfCell cell{i, j, target(rng)};
    const double err = gradcheck(
        [&](const EmbeddingMatrix& in, const EmbeddingMatrix& out,
            LossResult& res) { loss_mf(cell, in, out, res); },
        input, output);
    CHECK(err < 1e-6);
  }
}

TEST_CASE("losses are non-negative and touch only the named rows") {
  EmbeddingMatrix input = random_matrix(12, 8, 21);
  EmbeddingMatrix output = random_matrix(12, 8, 22);
  const PairExample example{3, 7, {1, 7, 1, 5}};
  LossResult res;

  loss_classification(example, input, output, res);
  CHECK(res.loss >= 0.0);
  REQUIRE(res.input.rows == std::vector<ItemId>{3});
  for (ItemId row : res.output.rows) {
    CHECK((row == 7 || row == 1 || row == 5));
  }
  CHECK(res.output.rows.size() == 3);  // accumulated by id

  loss_ranking(example, input, output, res);
  CHECK(res.loss >= 0.0);
  REQUIRE(res.input.rows == std::vector<ItemId>{3});
  CHECK(res.output.rows.size() == 3);
}

TEST_CASE("losses are invariant under permutation of the negatives") {
  EmbeddingMatrix input = random_matrix(10, 6, 31);
  EmbeddingMatrix output = random_matrix(10, 6, 32);
  PairExample a{0, 1, {2, 3, 4, 2}};
  PairExample b = a;
  std::reverse(b.negatives.begin(), b.negatives.end());

  for (auto* fn : {&loss_classification, &loss_ranking}) {
    LossResult ra, rb;
    (*fn)(a, input, output, ra);
    (*fn)(b, input, output, rb);
    CHECK(ra.loss == doctest::Approx(rb.loss).epsilon(1e-12));
    // Same accumulated gradient per row id.
    for (std::size_t r = 0; r < ra.output.size(); ++r) {
      const ItemId row = ra.output.rows[r];
      const auto it =
          std::find(rb.output.rows.begin(), rb.output.rows.end(), row);
      REQUIRE(it != rb.output.rows.end());
      const auto rb_grad =
          rb.output.grad(static_cast<std::size_t>(it - rb.output.rows.begin()));
      const auto ra_grad = ra.output.grad(r);
      for (int k = 0; k < 6; ++k) {
        CHECK(ra_grad[k] == doctest::Approx(rb_grad[k]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("gradient steps drive an mf cell to its target") {
  EmbeddingMatrix input = init_matrix(2, 4, 41);
  EmbeddingMatrix output = init_matrix(2, 4, 42);
  const MfCell cell{0, 1, 0.8};
  LossResult res;
  const double lr = 0.4;
  for (int step = 0; step < 5000; ++step) {
    loss_mf(cell, input, output, res);
    for (int k = 0; k < 4; ++k) {
      input.row(1)[k] -= lr * res.input.grad(0)[k];
      output.row(0)[k] -= lr * res.output.grad(0)[k];
    }
  }
  double dot = 0.0;
  for (int k = 0; k < 4; ++k) dot += output.row(0)[k] * input.row(1)[k];
  CHECK(std::abs(dot - cell.target) < 1e-4);
}
