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

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "bb2vec/baselines.hpp"
#include "bb2vec/cooccurrence.hpp"
#include "bb2vec/corpus.hpp"
#include "bb2vec/evaluation.hpp"
#include "bb2vec/model.hpp"
#include "bb2vec/synthgen.hpp"
#include "bb2vec/trainer.hpp"

namespace {

using namespace bb2vec;

// Exit codes: 0 success, 1 usage, 2 data error, 3 numeric failure.
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

void echo_config(CLI::App* sub, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::ofstream out(out_dir + "/config.ini");
  out << sub->config_to_str(true, false);
}

std::int64_t auto_min_pair_count(std::size_t n_sets) {
  return n_sets >= 100000 ? 10 : 3;
}

SpmiMatrix build_spmi_from_corpus(const Corpus& corpus,
                                  const std::string& source, int shift_k,
                                  std::int64_t min_pair_count,
                                  int threads = 1) {
  const auto& sets =
      source == "baskets" ? corpus.train_baskets : corpus.train_sessions;
  if (min_pair_count <= 0) min_pair_count = auto_min_pair_count(sets.size());
  const CooccurrenceStats stats = count_cooccurrences(
      std::span<const ItemSet>(sets), corpus.vocab_size(), threads);
  return build_spmi(stats, shift_k, min_pair_count);
}

struct IngestArgs {
  std::string events;
  std::string out_dir;
  bool unlink_baskets = false;
  IngestConfig config;
};

struct SpmiArgs {
  std::string corpus_dir;
  std::string out_path;
  std::string source = "sessions";
  int shift_k = 20;
  std::int64_t min_pair_count = 0;  // 0 = auto (10 large / 3 small)
  int threads = 1;
};

struct TrainArgs {
  std::string corpus_dir;
  std::string out_dir;
  std::string model = "bb2vec";
  std::string loss = "rank";
  std::string spmi_path;
  std::string spmi_source = "sessions";
  double lambda = 1.0;
  bool sg_browse = false;  // test-mode wiring with SG browsing tasks
  std::int64_t min_pair_count = 0;
  bool save_accumulators = false;
  TrainConfig config;
};

struct EvalArgs {
  std::string corpus_dir;
  std::string model_path;
  std::string baseline;
  std::string out_dir;
  std::vector<int> ks{10, 50};
  std::vector<std::int64_t> buckets{1, 4, 16, 64};
  bool unordered_pairs = false;
  std::string dump_recs;
  int dump_n = 10;
};

struct RecommendArgs {
  std::string model_path;
  std::string query;
  int n = 10;
};

struct SynthArgs {
  std::string out_events;
  std::string out_ground_truth;
  std::string out_corpus;
  SynthSpec spec;
};

int run_ingest(const IngestArgs& args) {
  IngestConfig config = args.config;
  config.keep_basket_session_link = !args.unlink_baskets;
  const Corpus corpus = ingest(args.events, config);
  save_corpus(corpus, args.out_dir);
  std::cout << "vocab " << corpus.vocab_size() << ", train baskets "
            << corpus.train_baskets.size() << ", val "
            << corpus.val_baskets.size() << ", test "
            << corpus.test_baskets.size() << ", train sessions "
            << corpus.train_sessions.size() << '\n';
  return 0;
}

int run_spmi(const SpmiArgs& args) {
  const Corpus corpus = load_corpus(args.corpus_dir);
  const SpmiMatrix spmi = build_spmi_from_corpus(
      corpus, args.source, args.shift_k, args.min_pair_count, args.threads);
  save_spmi(spmi, args.out_path);
  std::cout << "spmi cells " << spmi.entries.size() << " (shift_k "
            << spmi.shift_k << ", min_pair_count " << spmi.min_pair_count
            << ")\n";
  return 0;
}

LossKind parse_loss(const std::string& loss) {
  if (loss == "class") return LossKind::kClassification;
  if (loss == "rank") return LossKind::kRanking;
  throw DataError("unknown loss: " + loss);
}

int run_train(const TrainArgs& args) {
  const Corpus corpus = load_corpus(args.corpus_dir);
  const LossKind loss = parse_loss(args.loss);

  std::vector<TaskSpec> tasks;
  SpmiMatrix spmi;
  const SpmiMatrix* spmi_ptr = nullptr;
  if (args.model == "prod2vec") {
    tasks = prod2vec_tasks(loss);
  } else if (args.model == "bb2vec") {
    const BB2vecWiring wiring{args.lambda};
    if (args.sg_browse) {
      tasks = bb2vec_sg_browse_tasks(loss, wiring);
    } else {
      tasks = bb2vec_tasks(loss, wiring);
      if (args.lambda > 0.0) {
        if (!args.spmi_path.empty()) {
          spmi = load_spmi(args.spmi_path);
        } else {
          spmi = build_spmi_from_corpus(corpus, args.spmi_source,
                                        args.config.negatives,
                                        args.min_pair_count);
        }
        spmi_ptr = &spmi;
      }
    }
  } else {
    throw DataError("unknown model: " + args.model);
  }

  const TrainResult result = train(corpus, spmi_ptr, tasks, args.config);
  std::filesystem::create_directories(args.out_dir);
  save_embeddings(result.embeddings, args.out_dir + "/model.bin",
                  args.save_accumulators);
  write_history_tsv(result, tasks, args.out_dir + "/history.tsv");
  std::cout << "best epoch " << result.best_epoch;
  if (!result.history.empty()) {
    double best = 0.0;
    for (const auto& r : result.history) best = std::max(best, r.val_hitrate10);
    std::cout << ", val hitrate@10 " << best;
  }
  std::cout << '\n';
  return 0;
}

int run_eval(const EvalArgs& args) {
  const Corpus corpus = load_corpus(args.corpus_dir);
  std::vector<EvalPair> pairs = extract_pairs(
      std::span<const ItemSet>(corpus.test_baskets),
      std::span<const std::int64_t>(corpus.train_purchase_count));
  if (args.unordered_pairs) {
    std::erase_if(pairs,
                  [](const EvalPair& p) { return p.query > p.target; });
  }
  if (pairs.empty()) throw DataError("no evaluation pairs in the test split");

  std::unique_ptr<Recommender> recommender;
  EmbeddingSet model;
  CooccurrenceStats basket_stats;
  std::string method;
  if (!args.model_path.empty()) {
    model = load_embeddings(args.model_path);
    recommender = std::make_unique<EmbeddingRecommender>(
        model.pairs.at(0).input, model.pairs.at(0).output);
    method = std::filesystem::path(args.model_path).stem().string();
  } else if (args.baseline == "popularity") {
    recommender = std::make_unique<PopularityModel>(
        std::span<const std::int64_t>(corpus.train_purchase_count));
    method = "popularity";
  } else if (args.baseline == "cocount") {
    basket_stats = count_cooccurrences(
        std::span<const ItemSet>(corpus.train_baskets), corpus.vocab_size());
    recommender = std::make_unique<CoCountModel>(
        basket_stats,
        std::span<const std::int64_t>(corpus.train_purchase_count));
    method = "cocount";
  } else {
    throw DataError("pass either --model or --baseline popularity|cocount");
  }

  const EvalReport report =
      evaluate(*recommender, std::span<const EvalPair>(pairs),
               std::span<const int>(args.ks),
               std::span<const std::int64_t>(args.buckets));
  std::filesystem::create_directories(args.out_dir);
  write_report_tsv(report, method, args.out_dir + "/report.tsv");
  write_breakdown_tsv(report, method, args.out_dir + "/breakdown.tsv");
  for (std::size_t ki = 0; ki < report.ks.size(); ++ki) {
    std::cout << method << " hitrate@" << report.ks[ki] << ' '
              << report.hitrate[ki] << " ndcg@" << report.ks[ki] << ' '
              << report.ndcg[ki] << '\n';
  }

  if (!args.dump_recs.empty()) {
    std::ofstream out(args.dump_recs);
    if (!out) throw DataError("cannot write " + args.dump_recs);
    std::vector<ItemId> queries;
    for (const auto& pair : pairs) queries.push_back(pair.query);
    std::sort(queries.begin(), queries.end());
    queries.erase(std::unique(queries.begin(), queries.end()), queries.end());
    for (ItemId query : queries) {
      const auto list = recommender->topn_scored(query, args.dump_n);
      for (std::size_t r = 0; r < list.size(); ++r) {
        out << corpus.tokens[query] << '\t' << r + 1 << '\t'
            << corpus.tokens[list[r].first] << '\t' << list[r].second << '\n';
      }
    }
  }
  return 0;
}

int run_recommend(const RecommendArgs& args) {
  const EmbeddingSet model = load_embeddings(args.model_path);
  ItemId query = -1;
  for (std::size_t i = 0; i < model.tokens.size(); ++i) {
    if (model.tokens[i] == args.query) {
      query = static_cast<ItemId>(i);
      break;
    }
  }
  if (query < 0) throw DataError("unknown item token: " + args.query);
  const EmbeddingRecommender recommender(model.pairs.at(0).input,
                                         model.pairs.at(0).output);
  const auto scored = recommender.topn_scored(query, args.n);
  for (std::size_t r = 0; r < scored.size(); ++r) {
    std::cout << args.query << '\t' << r + 1 << '\t'
              << model.tokens[scored[r].first] << '\t' << scored[r].second
              << '\n';
  }
  return 0;
}

int run_synth(const SynthArgs& args) {
  const SynthResult result = generate(args.spec);
  if (!args.out_events.empty()) {
    write_events_file(result.corpus, args.out_events);
  }
  if (!args.out_ground_truth.empty()) {
    write_ground_truth_tsv(result, args.out_ground_truth);
  }
  if (!args.out_corpus.empty()) {
    save_corpus(result.corpus, args.out_corpus);
  }
  std::cout << "synth vocab " << result.corpus.vocab_size()
            << ", train baskets " << result.corpus.train_baskets.size()
            << ", sessions " << result.corpus.train_sessions.size()
            << ", zero-purchase items " << result.zero_purchase_items.size()
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bb2vec: complementary-product embeddings from baskets and "
               "browsing sessions"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from an INI file");
  app.allow_config_extras(false);

  IngestArgs ingest_args;
  auto* ingest_cmd =
      app.add_subcommand("ingest", "Build a corpus directory from an event log");
  ingest_cmd->add_option("--events", ingest_args.events, "events TSV file")
      ->required();
  ingest_cmd->add_option("--out", ingest_args.out_dir, "output corpus dir")
      ->required();
  ingest_cmd->add_option("--min-purchases",
                         ingest_args.config.min_item_purchases,
                         "drop items with fewer purchases overall");
  ingest_cmd->add_option("--split", ingest_args.config.split_fractions,
                         "train val test fractions");
  ingest_cmd->add_option("--seed", ingest_args.config.split_seed, "split seed");
  ingest_cmd->add_flag("--unlink-baskets", ingest_args.unlink_baskets,
                       "split baskets independently of their sessions");

  SpmiArgs spmi_args;
  auto* spmi_cmd =
      app.add_subcommand("spmi", "Build the shifted-PMI matrix from a corpus");
  spmi_cmd->add_option("--corpus", spmi_args.corpus_dir, "corpus dir")
      ->required();
  spmi_cmd->add_option("--out", spmi_args.out_path, "output TSV")->required();
  spmi_cmd->add_option("--source", spmi_args.source, "sessions|baskets")
      ->check(CLI::IsMember({"sessions", "baskets"}));
  spmi_cmd->add_option("--shift-k", spmi_args.shift_k, "shift = ln(k)");
  spmi_cmd->add_option("--min-pair-count", spmi_args.min_pair_count,
                       "keep cells with n_ij >= this (0 = auto: 10 for >=1e5 "
                       "sets, else 3)");
  spmi_cmd->add_option("--threads", spmi_args.threads,
                       "worker threads for counting");

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train embeddings");
  train_cmd->add_option("--corpus", train_args.corpus_dir, "corpus dir")
      ->required();
  train_cmd->add_option("--out", train_args.out_dir, "output dir")->required();
  train_cmd->add_option("--model", train_args.model, "prod2vec|bb2vec")
      ->check(CLI::IsMember({"prod2vec", "bb2vec"}));
  train_cmd->add_option("--loss", train_args.loss, "class|rank")
      ->check(CLI::IsMember({"class", "rank"}));
  train_cmd->add_option("--dim", train_args.config.dim, "embedding dimension");
  train_cmd->add_option("--lambda", train_args.lambda,
                        "shared browsing-task weight");
  train_cmd->add_option("--negatives", train_args.config.negatives,
                        "negative samples per example");
  train_cmd->add_option("--lr", train_args.config.base_lr,
                        "initial AdaGrad learning rate");
  train_cmd->add_option("--alpha", train_args.config.neg_alpha,
                        "negative sampling exponent (0 = uniform)");
  train_cmd->add_option("--epoch-size", train_args.config.epoch_size,
                        "updates per epoch (0 = #ordered train pairs)");
  train_cmd->add_option("--max-epochs", train_args.config.max_epochs,
                        "epoch limit");
  train_cmd->add_option("--patience", train_args.config.patience,
                        "early-stopping patience in epochs");
  train_cmd->add_option("--seed", train_args.config.seed, "RNG seed");
  train_cmd->add_option("--threads", train_args.config.hogwild_threads,
                        "hogwild threads (>1 is nondeterministic)");
  train_cmd->add_option("--max-val-pairs", train_args.config.max_val_pairs,
                        "cap validation pairs (0 = all)");
  train_cmd->add_option("--spmi", train_args.spmi_path,
                        "precomputed SPMI TSV (built on demand if absent)");
  train_cmd->add_option("--spmi-source", train_args.spmi_source,
                        "sessions|baskets when building SPMI")
      ->check(CLI::IsMember({"sessions", "baskets"}));
  train_cmd->add_option("--min-pair-count", train_args.min_pair_count,
                        "SPMI cell threshold when building (0 = auto)");
  train_cmd->add_flag("--sg-browse", train_args.sg_browse,
                      "test-mode wiring: SG browsing tasks instead of MF");
  train_cmd->add_flag("--save-accumulators", train_args.save_accumulators,
                      "include AdaGrad state in the checkpoint");

  EvalArgs eval_args;
  auto* eval_cmd =
      app.add_subcommand("eval", "Evaluate a model or baseline on the test split");
  eval_cmd->add_option("--corpus", eval_args.corpus_dir, "corpus dir")
      ->required();
  eval_cmd->add_option("--model", eval_args.model_path, "embedding checkpoint");
  eval_cmd->add_option("--baseline", eval_args.baseline,
                       "popularity|cocount");
  eval_cmd->add_option("--out", eval_args.out_dir, "output dir")->required();
  eval_cmd->add_option("--ks", eval_args.ks, "cutoffs, e.g. 10 50");
  eval_cmd->add_option("--buckets", eval_args.buckets,
                       "purchase-count bucket edges");
  eval_cmd->add_flag("--unordered-pairs", eval_args.unordered_pairs,
                     "evaluate each unordered pair once (sensitivity check)");
  eval_cmd->add_option("--dump-recs", eval_args.dump_recs,
                       "write per-query recommendation lists here");
  eval_cmd->add_option("--dump-n", eval_args.dump_n, "list length for dumps");

  RecommendArgs rec_args;
  auto* rec_cmd =
      app.add_subcommand("recommend", "Print top-N complements for a query item");
  rec_cmd->add_option("--model", rec_args.model_path, "embedding checkpoint")
      ->required();
  rec_cmd->add_option("--query", rec_args.query, "query item token")
      ->required();
  rec_cmd->add_option("--n", rec_args.n, "list length")
      ->check(CLI::PositiveNumber);

  SynthArgs synth_args;
  auto* synth_cmd = app.add_subcommand(
      "synth", "Generate a synthetic corpus with known structure");
  synth_cmd->add_option("--out-events", synth_args.out_events, "events TSV");
  synth_cmd->add_option("--out-ground-truth", synth_args.out_ground_truth,
                        "ground truth TSV");
  synth_cmd->add_option("--out-corpus", synth_args.out_corpus,
                        "serialized corpus dir (preserves the split)");
  synth_cmd->add_option("--vocab", synth_args.spec.vocab_size, "items");
  synth_cmd->add_option("--baskets", synth_args.spec.n_baskets, "baskets");
  synth_cmd->add_option("--sessions", synth_args.spec.n_sessions, "sessions");
  synth_cmd->add_option("--rho", synth_args.spec.view_purchase_correlation,
                        "view/purchase correlation in [0,1]");
  synth_cmd->add_option("--zero-purchase-fraction",
                        synth_args.spec.zero_purchase_fraction,
                        "share of items deleted from train baskets");
  synth_cmd->add_option("--seed", synth_args.spec.seed, "RNG seed");
  synth_cmd->add_option("--min-size", synth_args.spec.min_set_size,
                        "minimum set size");
  synth_cmd->add_option("--max-size", synth_args.spec.max_set_size,
                        "maximum set size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*ingest_cmd) {
      echo_config(ingest_cmd, ingest_args.out_dir);
      return run_ingest(ingest_args);
    }
    if (*spmi_cmd) return run_spmi(spmi_args);
    if (*train_cmd) {
      echo_config(train_cmd, train_args.out_dir);
      return run_train(train_args);
    }
    if (*eval_cmd) {
      echo_config(eval_cmd, eval_args.out_dir);
      return run_eval(eval_args);
    }
    if (*rec_cmd) return run_recommend(rec_args);
    if (*synth_cmd) return run_synth(synth_args);
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}
