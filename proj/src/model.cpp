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

#include "bb2vec/model.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace bb2vec {

EmbeddingMatrix init_matrix(ItemId vocab_size, int dim, std::uint64_t seed) {
  if (dim < 1) throw DataError("embedding dimension must be >= 1");
  if (vocab_size < 0) throw DataError("negative vocab size");
  EmbeddingMatrix m;
  m.rows = vocab_size;
  m.dim = dim;
  const std::size_t n = static_cast<std::size_t>(vocab_size) * dim;
  m.values.resize(n);
  m.accum.assign(n, 0.0);
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 0.1);
  for (double& v : m.values) v = gauss(rng);
  return m;
}

double score(const EmbeddingMatrix& input, const EmbeddingMatrix& output,
             ItemId query, ItemId candidate) {
  const auto q = input.row(query);
  const auto c = output.row(candidate);
  double dot = 0.0;
  for (int k = 0; k < input.dim; ++k) dot += c[k] * q[k];
  return dot;
}

void adagrad_step(EmbeddingMatrix& matrix, ItemId row,
                  std::span<const double> grad, double base_lr) {
  const std::size_t off = static_cast<std::size_t>(row) * matrix.dim;
  double* value = matrix.values.data() + off;
  double* accum = matrix.accum.data() + off;
  for (int k = 0; k < matrix.dim; ++k) {
    const double g = grad[k];
    if (!std::isfinite(g)) {
      throw NumericError("non-finite gradient at row " + std::to_string(row) +
                         " dim " + std::to_string(k));
    }
    accum[k] += g * g;
    value[k] -= base_lr * g / (std::sqrt(accum[k]) + kAdagradEps);
  }
}

namespace {

constexpr char kMagic[8] = {'B', 'B', '2', 'V', 'E', 'C', '0', '1'};

void write_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint64_t read_u64(std::istream& in) {
  std::uint64_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(v))) {
    throw DataError("truncated embedding file");
  }
  return v;
}

void write_doubles(std::ostream& out, const std::vector<double>& v) {
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void read_doubles(std::istream& in, std::vector<double>& v, std::size_t n) {
  v.resize(n);
  if (!in.read(reinterpret_cast<char*>(v.data()),
               static_cast<std::streamsize>(n * sizeof(double)))) {
    throw DataError("truncated embedding file");
  }
}

}  // namespace

void save_embeddings(const EmbeddingSet& set, const std::string& path,
                     bool with_accumulators) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out.write(kMagic, sizeof(kMagic));
  write_u64(out, set.pairs.size());
  write_u64(out, with_accumulators ? 1 : 0);
  write_u64(out, set.tokens.size());
  for (const auto& token : set.tokens) {
    write_u64(out, token.size());
    out.write(token.data(), static_cast<std::streamsize>(token.size()));
  }
  for (const auto& pair : set.pairs) {
    for (const EmbeddingMatrix* m : {&pair.input, &pair.output}) {
      write_u64(out, static_cast<std::uint64_t>(m->rows));
      write_u64(out, static_cast<std::uint64_t>(m->dim));
      write_doubles(out, m->values);
      if (with_accumulators) write_doubles(out, m->accum);
    }
  }
  if (!out) throw DataError("failed writing " + path);
}

EmbeddingSet load_embeddings(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path);
  char magic[8];
  if (!in.read(magic, sizeof(magic)) ||
      !std::equal(magic, magic + 8, kMagic)) {
    throw DataError("not a bb2vec embedding file (bad magic/version): " + path);
  }
  EmbeddingSet set;
  const std::uint64_t n_pairs = read_u64(in);
  const bool with_accum = read_u64(in) != 0;
  const std::uint64_t n_tokens = read_u64(in);
  set.tokens.resize(n_tokens);
  for (auto& token : set.tokens) {
    const std::uint64_t len = read_u64(in);
    token.resize(len);
    if (!in.read(token.data(), static_cast<std::streamsize>(len))) {
      throw DataError("truncated embedding file");
    }
  }
  set.pairs.resize(n_pairs);
  for (auto& pair : set.pairs) {
    for (EmbeddingMatrix* m : {&pair.input, &pair.output}) {
      m->rows = static_cast<ItemId>(read_u64(in));
      m->dim = static_cast<int>(read_u64(in));
      const std::size_t n = static_cast<std::size_t>(m->rows) * m->dim;
      read_doubles(in, m->values, n);
      if (with_accum) {
        read_doubles(in, m->accum, n);
      } else {
        m->accum.assign(n, 0.0);
      }
    }
  }
  return set;
}

void export_embeddings_text(const EmbeddingSet& set, const std::string& dir) {
  std::filesystem::create_directories(dir);
  char buf[64];
  for (std::size_t p = 0; p < set.pairs.size(); ++p) {
    const auto& pair = set.pairs[p];
    const struct { const EmbeddingMatrix* m; const char* name; } sides[] = {
        {&pair.input, "in_"}, {&pair.output, "out_"}};
    for (const auto& side : sides) {
      std::ofstream out(dir + "/" + side.name + std::to_string(p) + ".vec");
      if (!out) throw DataError("cannot write vectors in " + dir);
      out << side.m->rows << ' ' << side.m->dim << '\n';
      for (ItemId r = 0; r < side.m->rows; ++r) {
        if (static_cast<std::size_t>(r) < set.tokens.size()) {
          out << set.tokens[r];
        } else {
          out << r;
        }
        for (double v : side.m->row(r)) {
          std::snprintf(buf, sizeof(buf), " %.17g", v);
          out << buf;
        }
        out << '\n';
      }
    }
  }
}

}  // namespace bb2vec
