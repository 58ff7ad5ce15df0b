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

#include "bb2vec/synthgen.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <unordered_set>

namespace bb2vec {

namespace {

using Graph = std::vector<std::vector<std::pair<ItemId, double>>>;

Graph random_graph(ItemId vocab, int deg_min, int deg_max,
                   std::uint64_t seed) {
  Graph graph(vocab);
  Rng rng(seed);
  std::uniform_int_distribution<int> deg_dist(deg_min, deg_max);
  std::uniform_int_distribution<ItemId> item_dist(0, vocab - 1);
  std::uniform_real_distribution<double> weight_dist(0.5, 1.5);
  for (ItemId u = 0; u < vocab; ++u) {
    const int deg = deg_dist(rng);
    std::unordered_set<ItemId> chosen;
    while (static_cast<int>(chosen.size()) < deg) {
      const ItemId v = item_dist(rng);
      if (v != u) chosen.insert(v);
    }
    std::vector<ItemId> sorted(chosen.begin(), chosen.end());
    std::sort(sorted.begin(), sorted.end());
    double total = 0.0;
    for (ItemId v : sorted) {
      const double w = weight_dist(rng);
      graph[u].emplace_back(v, w);
      total += w;
    }
    for (auto& [v, w] : graph[u]) w /= total;
  }
  return graph;
}

// Per seed item and companion count, all companion subsets of the seed's
// complement list with cumulative product weights, for exact categorical
// sampling and exact inclusion probabilities.
struct SubsetTable {
  // [count-1] -> (bitmask, cumulative weight); total weight is .back().second
  std::vector<std::vector<std::pair<std::uint32_t, double>>> by_count;
  std::vector<double> size_cdf;  // truncated geometric over counts
  int min_count = 1;
};

SubsetTable build_subsets(const std::vector<std::pair<ItemId, double>>& comps,
                          int min_size, int max_size, double geo_p) {
  SubsetTable table;
  const int n = static_cast<int>(comps.size());
  const int max_count = std::min(max_size - 1, n);
  const int min_count = std::min(min_size - 1, max_count);
  table.min_count = min_count;
  table.by_count.resize(max_count);
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    const int count = std::popcount(mask);
    if (count > max_count) continue;
    double w = 1.0;
    for (int b = 0; b < n; ++b) {
      if (mask & (1u << b)) w *= comps[b].second;
    }
    table.by_count[count - 1].emplace_back(mask, w);
  }
  for (auto& list : table.by_count) {
    double cum = 0.0;
    for (auto& [mask, w] : list) {
      cum += w;
      w = cum;
    }
  }
  // P(count = c) ~ (1-p)^(c - min_count), c in [min_count, max_count]
  double cum = 0.0;
  table.size_cdf.resize(max_count - min_count + 1);
  for (int c = min_count; c <= max_count; ++c) {
    cum += std::pow(1.0 - geo_p, c - min_count);
    table.size_cdf[c - min_count] = cum;
  }
  return table;
}

int sample_count(const SubsetTable& table, Rng& rng) {
  std::uniform_real_distribution<double> uniform(0.0, table.size_cdf.back());
  const double u = uniform(rng);
  const auto it =
      std::upper_bound(table.size_cdf.begin(), table.size_cdf.end(), u);
  const auto idx = std::min<std::size_t>(it - table.size_cdf.begin(),
                                         table.size_cdf.size() - 1);
  return table.min_count + static_cast<int>(idx);
}

std::uint32_t sample_subset(const SubsetTable& table, int count, Rng& rng) {
  const auto& list = table.by_count[count - 1];
  std::uniform_real_distribution<double> uniform(0.0, list.back().second);
  const double u = uniform(rng);
  auto it = std::upper_bound(
      list.begin(), list.end(), u,
      [](double value, const auto& entry) { return value < entry.second; });
  if (it == list.end()) --it;
  return it->first;
}

ItemSet make_set(ItemId seed_item,
                 const std::vector<std::pair<ItemId, double>>& comps,
                 std::uint32_t mask, SetKind kind) {
  ItemSet set;
  set.kind = kind;
  set.items.push_back(seed_item);
  for (std::size_t b = 0; b < comps.size(); ++b) {
    if (mask & (1u << b)) set.items.push_back(comps[b].first);
  }
  return set;
}

void check_spec(const SynthSpec& spec) {
  if (spec.vocab_size < 2) throw DataError("vocab_size must be >= 2");
  if (spec.min_set_size < 2) throw DataError("min_set_size must be >= 2");
  if (spec.max_set_size < spec.min_set_size) {
    throw DataError("max_set_size < min_set_size");
  }
  if (spec.size_geo_p <= 0.0 || spec.size_geo_p >= 1.0) {
    throw DataError("size_geo_p must lie in (0, 1)");
  }
  if (spec.view_purchase_correlation < 0.0 ||
      spec.view_purchase_correlation > 1.0) {
    throw DataError("view_purchase_correlation must lie in [0, 1]");
  }
  if (spec.zero_purchase_fraction < 0.0 || spec.zero_purchase_fraction > 1.0) {
    throw DataError("zero_purchase_fraction must lie in [0, 1]");
  }
  if (spec.complement_graph.empty()) {
    if (spec.complements_min < spec.min_set_size - 1) {
      throw DataError("complements_min too small for min_set_size");
    }
    if (spec.complements_max < spec.complements_min ||
        spec.complements_max > 20) {
      throw DataError("bad complements_min/max");
    }
    if (spec.vocab_size <= spec.complements_max) {
      throw DataError("vocab_size must exceed complements_max");
    }
  }
}

}  // namespace

SynthResult generate(const SynthSpec& spec) {
  check_spec(spec);
  const ItemId vocab = spec.vocab_size;

  Graph graph = spec.complement_graph;
  if (graph.empty()) {
    graph = random_graph(vocab, spec.complements_min, spec.complements_max,
                         mix_seed(spec.seed, 20));
  } else {
    if (static_cast<ItemId>(graph.size()) != vocab) {
      throw DataError("complement_graph size != vocab_size");
    }
    for (ItemId u = 0; u < vocab; ++u) {
      if (static_cast<int>(graph[u].size()) < spec.min_set_size - 1) {
        throw DataError("item " + std::to_string(u) +
                        " has too few complements for min_set_size");
      }
      if (graph[u].size() > 20) {
        throw DataError("complement lists are limited to 20 entries");
      }
      double total = 0.0;
      for (auto& [v, w] : graph[u]) {
        if (v < 0 || v >= vocab || v == u || w <= 0.0) {
          throw DataError("bad complement entry for item " + std::to_string(u));
        }
        total += w;
      }
      for (auto& [v, w] : graph[u]) w /= total;
    }
  }

  // Zero-purchase items: a seeded random subset deleted from train baskets
  // after the split; they keep their sessions and val/test purchases.
  const auto n_flagged = static_cast<ItemId>(
      std::llround(spec.zero_purchase_fraction * static_cast<double>(vocab)));
  if (n_flagged >= vocab && spec.n_baskets > 0) {
    throw DataError(
        "infeasible spec: every item flagged zero-purchase with baskets "
        "requested");
  }
  std::vector<ItemId> item_order(vocab);
  std::iota(item_order.begin(), item_order.end(), 0);
  {
    Rng rng(mix_seed(spec.seed, 40));
    std::shuffle(item_order.begin(), item_order.end(), rng);
  }
  std::vector<bool> flagged(vocab, false);
  SynthResult result;
  for (ItemId r = 0; r < n_flagged; ++r) {
    flagged[item_order[r]] = true;
    result.zero_purchase_items.push_back(item_order[r]);
  }
  std::sort(result.zero_purchase_items.begin(),
            result.zero_purchase_items.end());

  std::vector<SubsetTable> tables(vocab);
  for (ItemId u = 0; u < vocab; ++u) {
    tables[u] = build_subsets(graph[u], spec.min_set_size, spec.max_set_size,
                              spec.size_geo_p);
  }

  Graph noise;
  std::vector<SubsetTable> noise_tables;
  if (spec.view_purchase_correlation < 1.0) {
    noise = random_graph(vocab, std::max(spec.complements_min, 2),
                         std::max(spec.complements_max, 3),
                         mix_seed(spec.seed, 21));
    noise_tables.resize(vocab);
    for (ItemId u = 0; u < vocab; ++u) {
      noise_tables[u] = build_subsets(noise[u], spec.min_set_size,
                                      spec.max_set_size, spec.size_geo_p);
    }
  }

  // Exact joint inclusion probabilities of the basket process.
  std::vector<std::vector<double>> joint(
      vocab, std::vector<double>(vocab, 0.0));
  const double seed_prob = 1.0 / static_cast<double>(vocab);
  for (ItemId u = 0; u < vocab; ++u) {
    const auto& comps = graph[u];
    const auto& table = tables[u];
    const double size_total = table.size_cdf.back();
    for (std::size_t ci = 0; ci < table.size_cdf.size(); ++ci) {
      const double size_prob =
          ((ci == 0 ? table.size_cdf[0]
                    : table.size_cdf[ci] - table.size_cdf[ci - 1])) /
          size_total;
      const int count = table.min_count + static_cast<int>(ci);
      const auto& list = table.by_count[count - 1];
      const double z = list.back().second;
      double prev = 0.0;
      for (const auto& [mask, cum] : list) {
        const double p_subset = (cum - prev) / z;
        prev = cum;
        const double p = seed_prob * size_prob * p_subset;
        // members = {u} + subset
        std::vector<ItemId> members;
        members.push_back(u);
        for (std::size_t b = 0; b < comps.size(); ++b) {
          if (mask & (1u << b)) members.push_back(comps[b].first);
        }
        for (std::size_t a = 0; a < members.size(); ++a) {
          for (std::size_t b = a + 1; b < members.size(); ++b) {
            joint[members[a]][members[b]] += p;
            joint[members[b]][members[a]] += p;
          }
        }
      }
    }
  }
  result.ground_truth.assign(vocab, std::vector<double>(vocab, 0.0));
  for (ItemId k = 0; k < vocab; ++k) {
    const double row_sum =
        std::accumulate(joint[k].begin(), joint[k].end(), 0.0);
    if (row_sum <= 0.0) continue;
    for (ItemId m = 0; m < vocab; ++m) {
      result.ground_truth[k][m] = joint[k][m] / row_sum;
    }
  }

  // Draw baskets and sessions.
  auto draw_set = [&](const Graph& g, const std::vector<SubsetTable>& t,
                      Rng& rng, SetKind kind) {
    std::uniform_int_distribution<ItemId> seed_dist(0, vocab - 1);
    const ItemId u = seed_dist(rng);
    const int count = sample_count(t[u], rng);
    const std::uint32_t mask = sample_subset(t[u], count, rng);
    return make_set(u, g[u], mask, kind);
  };

  Rng basket_rng(mix_seed(spec.seed, 50));
  std::vector<ItemSet> baskets;
  baskets.reserve(static_cast<std::size_t>(spec.n_baskets));
  for (std::int64_t i = 0; i < spec.n_baskets; ++i) {
    baskets.push_back(draw_set(graph, tables, basket_rng, SetKind::kBasket));
  }

  Rng session_rng(mix_seed(spec.seed, 51));
  std::bernoulli_distribution mirror(spec.view_purchase_correlation);
  Corpus& corpus = result.corpus;
  corpus.train_sessions.reserve(static_cast<std::size_t>(spec.n_sessions));
  for (std::int64_t i = 0; i < spec.n_sessions; ++i) {
    const bool use_complements =
        spec.view_purchase_correlation >= 1.0 || mirror(session_rng);
    corpus.train_sessions.push_back(
        use_complements
            ? draw_set(graph, tables, session_rng, SetKind::kSession)
            : draw_set(noise, noise_tables, session_rng, SetKind::kSession));
  }

  const std::vector<int> split = split_assignments(
      baskets.size(), spec.split_fractions, mix_seed(spec.seed, 52));
  for (std::size_t i = 0; i < baskets.size(); ++i) {
    switch (split[i]) {
      case 0: {
        ItemSet& basket = baskets[i];
        std::erase_if(basket.items, [&](ItemId m) { return flagged[m]; });
        if (!basket.items.empty()) {
          corpus.train_baskets.push_back(std::move(basket));
        }
        break;
      }
      case 1: corpus.val_baskets.push_back(std::move(baskets[i])); break;
      default: corpus.test_baskets.push_back(std::move(baskets[i])); break;
    }
  }

  corpus.tokens.resize(vocab);
  for (ItemId u = 0; u < vocab; ++u) corpus.tokens[u] = "i" + std::to_string(u);
  corpus.train_purchase_count.assign(vocab, 0);
  corpus.train_view_count.assign(vocab, 0);
  for (const auto& basket : corpus.train_baskets) {
    for (ItemId m : basket.items) ++corpus.train_purchase_count[m];
  }
  for (const auto& session : corpus.train_sessions) {
    for (ItemId m : session.items) ++corpus.train_view_count[m];
  }

  // Hold-out baskets keep only items seen at train (purchase or view).
  auto filter_holdout = [&](std::vector<ItemSet>& sets) {
    for (auto& set : sets) {
      std::erase_if(set.items, [&](ItemId m) {
        return corpus.train_purchase_count[m] + corpus.train_view_count[m] == 0;
      });
    }
    std::erase_if(sets, [](const ItemSet& s) { return s.items.empty(); });
  };
  filter_holdout(corpus.val_baskets);
  filter_holdout(corpus.test_baskets);
  return result;
}

std::vector<std::vector<std::pair<ItemId, double>>> regular_complement_graph(
    ItemId vocab_size, int degree, std::uint64_t seed) {
  if (vocab_size <= degree) throw DataError("vocab too small for the degree");
  std::vector<std::vector<ItemId>> targets(vocab_size);
  Rng rng(seed);
  std::vector<ItemId> perm(vocab_size);
  std::iota(perm.begin(), perm.end(), 0);
  int built = 0;
  while (built < degree) {
    std::shuffle(perm.begin(), perm.end(), rng);
    bool ok = true;
    for (ItemId u = 0; u < vocab_size && ok; ++u) {
      if (perm[u] == u) ok = false;
      for (ItemId t : targets[u]) {
        if (t == perm[u]) ok = false;
      }
    }
    if (!ok) continue;
    for (ItemId u = 0; u < vocab_size; ++u) targets[u].push_back(perm[u]);
    ++built;
  }
  Graph graph(vocab_size);
  const double w = 1.0 / degree;
  for (ItemId u = 0; u < vocab_size; ++u) {
    for (ItemId t : targets[u]) graph[u].emplace_back(t, w);
    std::sort(graph[u].begin(), graph[u].end());
  }
  return graph;
}

std::vector<std::vector<std::pair<ItemId, double>>> grouped_complement_graph(
    ItemId vocab_size, int group_size) {
  if (group_size < 1 || vocab_size % group_size != 0 ||
      vocab_size / group_size < 2) {
    throw DataError("vocab_size must be a multiple of group_size with >= 2 groups");
  }
  const ItemId n_groups = vocab_size / group_size;
  Graph graph(vocab_size);
  const double w = 1.0 / group_size;
  for (ItemId u = 0; u < vocab_size; ++u) {
    const ItemId partner = (u / group_size + 1) % n_groups;
    for (int m = 0; m < group_size; ++m) {
      graph[u].emplace_back(partner * group_size + m, w);
    }
  }
  return graph;
}

void write_events_file(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  std::int64_t sid = 0;
  for (const auto& session : corpus.train_sessions) {
    for (ItemId m : session.items) {
      out << "view\ts" << sid << '\t' << corpus.tokens[m] << '\n';
    }
    ++sid;
  }
  std::int64_t bid = 0;
  auto write_baskets = [&](const std::vector<ItemSet>& baskets) {
    for (const auto& basket : baskets) {
      for (ItemId m : basket.items) {
        out << "purchase\tb" << bid << '\t' << corpus.tokens[m] << '\n';
      }
      ++bid;
    }
  };
  write_baskets(corpus.train_baskets);
  write_baskets(corpus.val_baskets);
  write_baskets(corpus.test_baskets);
}

void write_ground_truth_tsv(const SynthResult& result,
                            const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  const auto& tokens = result.corpus.tokens;
  char buf[64];
  for (std::size_t k = 0; k < result.ground_truth.size(); ++k) {
    for (std::size_t m = 0; m < result.ground_truth[k].size(); ++m) {
      const double p = result.ground_truth[k][m];
      if (p <= 0.0) continue;
      std::snprintf(buf, sizeof(buf), "%.17g", p);
      out << tokens[k] << '\t' << tokens[m] << '\t' << buf << '\n';
    }
  }
}

}  // namespace bb2vec
