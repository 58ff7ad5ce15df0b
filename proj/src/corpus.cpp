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

#include "bb2vec/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace bb2vec {

namespace {

struct RawSet {
  std::vector<std::string> tokens;  // distinct, first-occurrence order
  std::unordered_set<std::string> seen;
  std::string session_id;

  void add(const std::string& token) {
    if (seen.insert(token).second) {
      tokens.push_back(token);
    }
  }
};

void check_config(const IngestConfig& config) {
  double sum = 0.0;
  for (double f : config.split_fractions) {
    if (f < 0.0) {
      throw DataError("split fractions must be non-negative");
    }
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw DataError("split fractions must sum to 1");
  }
}

}  // namespace

std::vector<int> split_assignments(std::size_t n,
                                   const std::array<double, 3>& fractions,
                                   std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(mix_seed(seed, 0x51a7));
  std::shuffle(order.begin(), order.end(), rng);

  const auto n_train = static_cast<std::size_t>(
      std::llround(fractions[0] * static_cast<double>(n)));
  const auto n_train_val = static_cast<std::size_t>(
      std::llround((fractions[0] + fractions[1]) * static_cast<double>(n)));

  std::vector<int> split(n, 2);
  for (std::size_t rank = 0; rank < n; ++rank) {
    split[order[rank]] = rank < n_train ? 0 : (rank < n_train_val ? 1 : 2);
  }
  return split;
}

ItemId Corpus::item_id(const std::string& token) const {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] == token) return static_cast<ItemId>(i);
  }
  return -1;
}

Corpus ingest(const std::string& events_path, const IngestConfig& config) {
  std::ifstream in(events_path);
  if (!in) {
    throw DataError("cannot open events file: " + events_path);
  }
  return ingest(in, config);
}

Corpus ingest(std::istream& events, const IngestConfig& config) {
  check_config(config);

  // Group events into per-session view sets and purchase sets, collapsing
  // duplicates, keeping first-appearance order of sessions.
  std::vector<RawSet> sessions;
  std::vector<RawSet> baskets;
  std::unordered_map<std::string, std::size_t> session_index;
  std::unordered_map<std::string, std::size_t> basket_index;

  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(events, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string::npos ? tab1 : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos) {
      throw ParseError("expected `event_type<TAB>session_id<TAB>item_token`",
                       line_no);
    }
    const std::string type = line.substr(0, tab1);
    const std::string sid = line.substr(tab1 + 1, tab2 - tab1 - 1);
    const std::string token = line.substr(tab2 + 1);
    if (sid.empty() || token.empty()) {
      throw ParseError("empty session id or item token", line_no);
    }
    if (type == "view") {
      auto [it, fresh] = session_index.try_emplace(sid, sessions.size());
      if (fresh) {
        sessions.emplace_back();
        sessions.back().session_id = sid;
      }
      sessions[it->second].add(token);
    } else if (type == "purchase") {
      auto [it, fresh] = basket_index.try_emplace(sid, baskets.size());
      if (fresh) {
        baskets.emplace_back();
        baskets.back().session_id = sid;
      }
      baskets[it->second].add(token);
    } else {
      throw ParseError("unknown event type `" + type + "`", line_no);
    }
  }

  // Whole-dataset purchase filter: counts are binarized per basket.
  if (config.min_item_purchases > 0) {
    std::unordered_map<std::string, std::int64_t> purchase_counts;
    for (const auto& basket : baskets) {
      for (const auto& token : basket.tokens) ++purchase_counts[token];
    }
    for (auto& basket : baskets) {
      std::erase_if(basket.tokens, [&](const std::string& token) {
        return purchase_counts[token] < config.min_item_purchases;
      });
    }
    std::erase_if(baskets, [](const RawSet& b) { return b.tokens.empty(); });
  }

  // Split by unit. Linked mode: the unit is the session id shared by a
  // session and its basket. Unlinked mode: baskets draw their own
  // assignments from an independent stream with the same seed.
  std::vector<std::string> units;
  std::unordered_map<std::string, std::size_t> unit_index;
  auto unit_of = [&](const std::string& sid) {
    auto [it, fresh] = unit_index.try_emplace(sid, units.size());
    if (fresh) units.push_back(sid);
    return it->second;
  };
  for (const auto& s : sessions) unit_of(s.session_id);
  if (config.keep_basket_session_link) {
    for (const auto& b : baskets) unit_of(b.session_id);
  }

  const std::vector<int> unit_split =
      split_assignments(units.size(), config.split_fractions, config.split_seed);

  std::vector<int> basket_split(baskets.size());
  if (config.keep_basket_session_link) {
    for (std::size_t i = 0; i < baskets.size(); ++i) {
      basket_split[i] = unit_split[unit_index.at(baskets[i].session_id)];
    }
  } else {
    basket_split = split_assignments(baskets.size(), config.split_fractions,
                                 config.split_seed + 1);
  }

  // Train presence drives both the vocabulary and the val/test filter.
  std::unordered_map<std::string, std::int64_t> train_purchases;
  std::unordered_map<std::string, std::int64_t> train_views;
  for (std::size_t i = 0; i < baskets.size(); ++i) {
    if (basket_split[i] != 0) continue;
    for (const auto& token : baskets[i].tokens) ++train_purchases[token];
  }
  for (std::size_t i = 0; i < sessions.size(); ++i) {
    if (unit_split[unit_index.at(sessions[i].session_id)] != 0) continue;
    for (const auto& token : sessions[i].tokens) ++train_views[token];
  }

  // Vocabulary: items present at train, ids by first appearance over train
  // baskets then train sessions.
  Corpus corpus;
  std::unordered_map<std::string, ItemId> ids;
  auto add_vocab = [&](const std::string& token) {
    if (ids.try_emplace(token, static_cast<ItemId>(corpus.tokens.size()))
            .second) {
      corpus.tokens.push_back(token);
    }
  };
  for (std::size_t i = 0; i < baskets.size(); ++i) {
    if (basket_split[i] != 0) continue;
    for (const auto& token : baskets[i].tokens) add_vocab(token);
  }
  for (std::size_t i = 0; i < sessions.size(); ++i) {
    if (unit_split[unit_index.at(sessions[i].session_id)] != 0) continue;
    for (const auto& token : sessions[i].tokens) add_vocab(token);
  }
  if (corpus.tokens.empty()) {
    throw DataError("empty corpus after filtering");
  }

  auto to_item_set = [&](const RawSet& raw, SetKind kind,
                         bool drop_unknown) -> ItemSet {
    ItemSet set;
    set.kind = kind;
    set.source_session = raw.session_id;
    for (const auto& token : raw.tokens) {
      auto it = ids.find(token);
      if (it == ids.end()) {
        if (drop_unknown) continue;  // no purchase and no view at train
        throw DataError("internal: train token missing from vocabulary");
      }
      set.items.push_back(it->second);
    }
    return set;
  };

  for (std::size_t i = 0; i < baskets.size(); ++i) {
    ItemSet set = to_item_set(baskets[i], SetKind::kBasket,
                              /*drop_unknown=*/basket_split[i] != 0);
    if (set.items.empty()) continue;
    switch (basket_split[i]) {
      case 0: corpus.train_baskets.push_back(std::move(set)); break;
      case 1: corpus.val_baskets.push_back(std::move(set)); break;
      default: corpus.test_baskets.push_back(std::move(set)); break;
    }
  }
  for (std::size_t i = 0; i < sessions.size(); ++i) {
    if (unit_split[unit_index.at(sessions[i].session_id)] != 0) continue;
    ItemSet set = to_item_set(sessions[i], SetKind::kSession, false);
    if (!set.items.empty()) corpus.train_sessions.push_back(std::move(set));
  }

  corpus.train_purchase_count.assign(corpus.tokens.size(), 0);
  corpus.train_view_count.assign(corpus.tokens.size(), 0);
  for (const auto& basket : corpus.train_baskets) {
    for (ItemId item : basket.items) ++corpus.train_purchase_count[item];
  }
  for (const auto& session : corpus.train_sessions) {
    for (ItemId item : session.items) ++corpus.train_view_count[item];
  }
  return corpus;
}

int bucket_for_count(std::int64_t count, std::span<const std::int64_t> edges) {
  const auto it = std::upper_bound(edges.begin(), edges.end(), count);
  return static_cast<int>(it - edges.begin());
}

int purchase_bucket(ItemId item, const Corpus& corpus,
                    std::span<const std::int64_t> edges) {
  return bucket_for_count(corpus.train_purchase_count[item], edges);
}

namespace {

void write_sets(const std::vector<ItemSet>& sets, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  for (const auto& set : sets) {
    for (std::size_t i = 0; i < set.items.size(); ++i) {
      if (i) out << ' ';
      out << set.items[i];
    }
    out << '\n';
  }
}

std::vector<ItemSet> read_sets(const std::string& path, SetKind kind,
                               ItemId vocab_size) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path);
  std::vector<ItemSet> sets;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    ItemSet set;
    set.kind = kind;
    std::istringstream ss(line);
    ItemId item;
    while (ss >> item) {
      if (item < 0 || item >= vocab_size) {
        throw ParseError("item id out of range in " + path, line_no);
      }
      set.items.push_back(item);
    }
    sets.push_back(std::move(set));
  }
  return sets;
}

}  // namespace

void save_corpus(const Corpus& corpus, const std::string& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir + "/vocab.tsv");
    if (!out) throw DataError("cannot write " + dir + "/vocab.tsv");
    for (std::size_t i = 0; i < corpus.tokens.size(); ++i) {
      out << corpus.tokens[i] << '\t' << i << '\t'
          << corpus.train_purchase_count[i] << '\t'
          << corpus.train_view_count[i] << '\n';
    }
  }
  write_sets(corpus.train_baskets, dir + "/train_baskets.tsv");
  write_sets(corpus.val_baskets, dir + "/val_baskets.tsv");
  write_sets(corpus.test_baskets, dir + "/test_baskets.tsv");
  write_sets(corpus.train_sessions, dir + "/train_sessions.tsv");
}

Corpus load_corpus(const std::string& dir) {
  Corpus corpus;
  std::ifstream in(dir + "/vocab.tsv");
  if (!in) throw DataError("cannot read " + dir + "/vocab.tsv");
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string token;
    std::int64_t id = 0, purchases = 0, views = 0;
    if (!std::getline(ss, token, '\t') || !(ss >> id >> purchases >> views) ||
        id != static_cast<std::int64_t>(corpus.tokens.size())) {
      throw ParseError("malformed vocab.tsv", line_no);
    }
    corpus.tokens.push_back(token);
    corpus.train_purchase_count.push_back(purchases);
    corpus.train_view_count.push_back(views);
  }
  const ItemId vocab = corpus.vocab_size();
  corpus.train_baskets =
      read_sets(dir + "/train_baskets.tsv", SetKind::kBasket, vocab);
  corpus.val_baskets =
      read_sets(dir + "/val_baskets.tsv", SetKind::kBasket, vocab);
  corpus.test_baskets =
      read_sets(dir + "/test_baskets.tsv", SetKind::kBasket, vocab);
  corpus.train_sessions =
      read_sets(dir + "/train_sessions.tsv", SetKind::kSession, vocab);
  return corpus;
}

}  // namespace bb2vec
