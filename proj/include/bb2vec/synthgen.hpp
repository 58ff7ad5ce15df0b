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

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "bb2vec/common.hpp"
#include "bb2vec/corpus.hpp"

namespace bb2vec {

// Synthetic corpus with planted complementary structure. Each set is grown
// from a uniformly drawn seed item: the size is truncated-geometric, the
// companions are a weighted subset of the seed's complement list. Sessions
// draw their companions from the same complement graph with probability rho
// and from an independent noise graph otherwise. Items flagged zero-purchase
// are deleted from train baskets after the split, so they keep views and
// val/test purchases but no train purchases.
struct SynthSpec {
  ItemId vocab_size = 20;
  std::int64_t n_baskets = 1000;
  std::int64_t n_sessions = 1000;
  int min_set_size = 2;
  int max_set_size = 6;
  double size_geo_p = 0.5;  // truncated geometric on [min, max]
  // Per-item weighted complement lists; empty -> random graph with
  // complements_min..complements_max targets per item.
  std::vector<std::vector<std::pair<ItemId, double>>> complement_graph;
  int complements_min = 3;
  int complements_max = 5;
  double view_purchase_correlation = 1.0;  // rho in [0, 1]
  double zero_purchase_fraction = 0.0;
  std::array<double, 3> split_fractions{0.7, 0.15, 0.15};
  std::uint64_t seed = 1;
};

struct SynthResult {
  Corpus corpus;
  // ground_truth[k][m]: conditional distribution of the second item in a
  // uniformly drawn ordered basket pair given the first item k, computed
  // exactly from the generative process (rows sum to 1; zero where the pair
  // can never co-occur). Describes the unfiltered process, i.e. val/test
  // baskets, and train baskets too when zero_purchase_fraction == 0.
  std::vector<std::vector<double>> ground_truth;
  std::vector<ItemId> zero_purchase_items;
};

SynthResult generate(const SynthSpec& spec);

// Complement graph built as a union of `degree` random permutations: every
// item has exactly `degree` complements and is a complement of exactly
// `degree` items, so item popularity carries no planted signal. Weights are
// uniform 1/degree.
std::vector<std::vector<std::pair<ItemId, double>>> regular_complement_graph(
    ItemId vocab_size, int degree, std::uint64_t seed);

// Items partitioned into consecutive groups of `group_size`; every item's
// complements are the members of the next group (uniform weights). All items
// within a group share one complement profile, so cold items have warm
// session twins, and the symmetry keeps popularity uninformative.
std::vector<std::vector<std::pair<ItemId, double>>> grouped_complement_graph(
    ItemId vocab_size, int group_size);

// Standard events file consumed by ingest, plus ground_truth.tsv
// (`query_token <TAB> item_token <TAB> probability`).
void write_events_file(const Corpus& corpus, const std::string& path);
void write_ground_truth_tsv(const SynthResult& result, const std::string& path);

}  // namespace bb2vec
