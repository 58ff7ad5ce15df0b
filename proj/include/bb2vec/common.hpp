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
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace bb2vec {

// Dense item index, contiguous 0..vocab_size-1 after vocabulary construction.
using ItemId = std::int32_t;

enum class SetKind { kBasket, kSession };

// A basket or a browsing session: distinct items, first-occurrence order.
struct ItemSet {
  SetKind kind = SetKind::kBasket;
  std::vector<ItemId> items;
  // Raw session identifier the set came from; empty when synthetic/unlinked.
  std::string source_session;
};

// Malformed or inconsistent input data (exit code 2 at the CLI).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

class ParseError : public DataError {
 public:
  ParseError(const std::string& msg, std::int64_t line)
      : DataError(msg + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::int64_t line() const { return line_; }

 private:
  std::int64_t line_;
};

// Numeric failure during training, e.g. a non-finite loss (exit code 3).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

using Rng = std::mt19937_64;

// splitmix64 of (seed, tag); used to derive independent RNG streams so that
// consuming one stream never shifts draws on another.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace bb2vec
