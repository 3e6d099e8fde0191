// Copyright 2026 The Wembed Authors.
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

#include "wembed/cli.h"

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <memory>
#include <thread>

#include <boost/iostreams/filter/bzip2.hpp>
#include <boost/iostreams/filter/gzip.hpp>
#include <boost/iostreams/filtering_stream.hpp>

#include "CLI11.hpp"
#include "wembed/corpus.h"
#include "wembed/evalws.h"
#include "wembed/ingest.h"
#include "wembed/service.h"
#include "wembed/store.h"
#include "wembed/trainer.h"
#include "wembed/wdclient.h"

namespace wembed {

namespace {

namespace io = boost::iostreams;

struct ExtractArgs {
  std::string input;
  std::string output;
  std::string stats;
};

struct TrainArgs {
  std::string triples;
  std::string out;
  std::string vocab_out;
  std::string algorithm = "cbow";
  TrainingConfig config;
};

struct EvalArgs {
  std::string model;
  std::string wordsim;
  std::string mapping;
  std::string report = "text";
};

struct QueryArgs {
  std::string model;
  std::string entity;
  std::string entity2;
  size_t k = 10;
  std::string labels;
};

struct ServeArgs {
  ApiConfig api;
};

// Opens the extraction input; "-" is stdin, .gz and .bz2 are decompressed.
std::unique_ptr<std::istream> OpenInput(const std::string &path,
                                        std::unique_ptr<std::ifstream> *file) {
  auto stream = std::make_unique<io::filtering_istream>();
  if (path.ends_with(".gz")) {
    stream->push(io::gzip_decompressor());
  } else if (path.ends_with(".bz2")) {
    stream->push(io::bzip2_decompressor());
  }
  if (path == "-") {
    stream->push(std::cin);
  } else {
    *file = std::make_unique<std::ifstream>(path, std::ios::binary);
    if (!**file) throw std::runtime_error("cannot open input: " + path);
    stream->push(**file);
  }
  return stream;
}

int RunExtract(const ExtractArgs &args, std::ostream &err) {
  err << "extract: input=" << args.input << " output=" << args.output
      << " stats=" << (args.stats.empty() ? "-" : args.stats) << "\n";
  std::unique_ptr<std::ifstream> file;
  auto input = OpenInput(args.input, &file);
  std::ofstream out(args.output, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output: " + args.output);
  ExtractionStats stats =
      ExtractTriples(*input, [&](const Triple &t) { WriteTriple(out, t); });
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + args.output);
  if (!args.stats.empty()) {
    std::ofstream s(args.stats, std::ios::binary);
    s << stats.ToJson() << "\n";
    if (!s) throw std::runtime_error("write failed: " + args.stats);
  }
  err << "extract: " << stats.ToJson() << "\n";
  return 0;
}

int RunTrain(TrainArgs args, std::ostream &err) {
  args.config.algorithm = ParseAlgorithm(args.algorithm);
  args.config.Validate();
  err << "train: triples=" << args.triples << " out=" << args.out << " "
      << args.config.ToString() << "\n";

  FileTripleSource source(args.triples);
  VocabularyBuilder builder;
  source.ForEach([&](const Triple &t) { builder.Add(t); });
  VocabStats vstats;
  Vocabulary vocab = builder.Build(args.config.min_count, &vstats);
  err << "train: " << builder.triples_seen() << " triples, vocabulary "
      << vocab.size() << " (" << vstats.n_items << " items, "
      << vstats.n_properties << " properties)\n";
  if (vocab.empty()) throw std::runtime_error("empty vocabulary");

  EmbeddingModel model =
      Train(source, vocab, args.config, [&](const EpochReport &r) {
        err << "train: epoch " << r.epoch << " loss " << r.mean_loss
            << " pairs " << r.pairs << " lr " << r.lr_end << "\n";
      });
  SaveText(model, args.out);
  if (!args.vocab_out.empty()) vocab.Save(args.vocab_out);
  err << "train: wrote " << args.out << " (" << model.trained_tokens
      << " trained tokens)\n";
  return 0;
}

int RunEval(const EvalArgs &args, std::ostream &out, std::ostream &err) {
  err << "eval: model=" << args.model << " wordsim=" << args.wordsim
      << " mapping=" << args.mapping << " report=" << args.report << "\n";
  SimilarityIndex index(LoadText(args.model));
  auto pairs = LoadWordsim(args.wordsim);
  auto mapping = LoadWordMapping(args.mapping);
  EvalReport report = Evaluate(index, pairs, mapping);
  out << (args.report == "json" ? report.ToJson() + "\n" : report.ToText());
  return 0;
}

std::map<EntityId, std::string> FetchLabels(const std::vector<EntityId> &ids,
                                            const std::string &language) {
  WikidataClient client(std::make_shared<HttpTransport>(),
                        ClientOptions::FromEnvironment());
  return client.GetLabels(ids, language, {"en"}).labels;
}

int RunMostSimilar(const QueryArgs &args, std::ostream &out,
                   std::ostream &err) {
  err << "query most-similar: model=" << args.model << " entity="
      << args.entity << " k=" << args.k
      << " labels=" << (args.labels.empty() ? "-" : args.labels) << "\n";
  EntityId q = EntityId::FromString(args.entity);
  SimilarityIndex index(LoadText(args.model));
  auto hits = index.MostSimilar(q, args.k);
  std::map<EntityId, std::string> labels;
  if (!args.labels.empty()) {
    std::vector<EntityId> ids;
    for (const auto &h : hits) ids.push_back(h.entity);
    labels = FetchLabels(ids, args.labels);
  }
  char buf[32];
  for (const auto &h : hits) {
    std::snprintf(buf, sizeof(buf), "%.6f", h.score);
    out << h.entity << '\t' << buf;
    if (!labels.empty()) out << '\t' << labels[h.entity];
    out << '\n';
  }
  return 0;
}

int RunSimilarity(const QueryArgs &args, std::ostream &out,
                  std::ostream &err) {
  err << "query similarity: model=" << args.model << " a=" << args.entity
      << " b=" << args.entity2 << "\n";
  EntityId a = EntityId::FromString(args.entity);
  EntityId b = EntityId::FromString(args.entity2);
  SimilarityIndex index(LoadText(args.model));
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", index.Similarity(a, b));
  out << buf << '\n';
  return 0;
}

int RunServe(const ServeArgs &args, std::ostream &err) {
  args.api.Validate();
  if (args.api.model_path.empty()) {
    throw std::invalid_argument("--model or WEMBED_MODEL_PATH is required");
  }
  err << "serve: model=" << args.api.model_path << " bind="
      << args.api.bind_address << " port=" << args.api.port << " static="
      << (args.api.static_dir.empty() ? "-" : args.api.static_dir)
      << " k_default=" << args.api.k_default << " k_max=" << args.api.k_max
      << "\n";

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  ApiHandler handler(args.api);
  ApiServer server(handler);
  int port = server.Bind(args.api.bind_address, args.api.port);
  err << "serve: listening on " << args.api.bind_address << ":" << port
      << std::endl;

  std::atomic<bool> signalled{false};
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    signalled = true;
    server.Stop();
  });

  std::string load_error;
  std::thread loader([&] {
    try {
      auto index = std::make_shared<const SimilarityIndex>(
          LoadText(args.api.model_path));
      if (index->unit().zero_rows() > 0) {
        err << "serve: " << index->unit().zero_rows()
            << " zero-norm vectors excluded from results\n";
      }
      handler.SetIndex(index);
      err << "serve: model loaded (" << index->size() << " x "
          << index->dim() << ")" << std::endl;
    } catch (const std::exception &e) {
      load_error = e.what();
      kill(getpid(), SIGTERM);
    }
  });

  server.Listen();
  loader.join();
  // Wake the signal thread if the server stopped for another reason.
  if (!signalled) kill(getpid(), SIGTERM);
  waiter.join();
  pthread_sigmask(SIG_UNBLOCK, &signals, nullptr);
  if (!load_error.empty()) {
    err << "wembed: error: " << load_error << "\n";
    return 2;
  }
  err << "serve: stopped\n";
  return 0;
}

}  // namespace

int RunCli(int argc, const char *const *argv, std::ostream &out,
           std::ostream &err) {
  CLI::App app{"wembed: Wikidata entity embeddings"};
  app.require_subcommand(0, 1);
  bool show_version = false;
  app.add_flag("--version", show_version, "Print version and exit");

  ExtractArgs extract;
  auto *extract_cmd = app.add_subcommand(
      "extract", "Extract item-property-item triples from N-Triples");
  extract_cmd->add_option("--input", extract.input,
                          "N-Triples file (.nt, .nt.gz, .nt.bz2 or -)")
      ->required();
  extract_cmd->add_option("--output", extract.output, "Triple text file")
      ->required();
  extract_cmd->add_option("--stats", extract.stats, "Write stats JSON here");

  TrainArgs train;
  auto *train_cmd = app.add_subcommand("train", "Train an embedding");
  train_cmd->add_option("--triples", train.triples, "Triple text file")
      ->required();
  train_cmd->add_option("--out", train.out, "Output model file")->required();
  train_cmd->add_option("--vocab-out", train.vocab_out,
                        "Also write the vocabulary with counts");
  train_cmd->add_option("--dim", train.config.dim)->capture_default_str();
  train_cmd->add_option("--window", train.config.window)
      ->capture_default_str();
  train_cmd->add_option("--min-count", train.config.min_count)
      ->capture_default_str();
  train_cmd->add_option("--algorithm", train.algorithm)
      ->check(CLI::IsMember({"cbow", "sg"}))
      ->capture_default_str();
  train_cmd->add_option("--negative", train.config.negative)
      ->capture_default_str();
  train_cmd->add_option("--epochs", train.config.epochs)
      ->capture_default_str();
  train_cmd->add_option("--seed", train.config.seed)->capture_default_str();
  train_cmd->add_option("--workers", train.config.workers)
      ->capture_default_str();
  train_cmd->add_option("--sample", train.config.subsample_t,
                        "Subsampling threshold; 0 disables")
      ->capture_default_str();
  train_cmd->add_option("--lr", train.config.lr_initial)
      ->capture_default_str();
  train_cmd->add_option("--min-lr", train.config.lr_min)
      ->capture_default_str();

  EvalArgs eval;
  auto *eval_cmd =
      app.add_subcommand("eval", "Correlate model similarity with Wordsim-353");
  eval_cmd->add_option("--model", eval.model)
      ->required()
      ->envname("WEMBED_MODEL_PATH");
  eval_cmd->add_option("--wordsim", eval.wordsim)->required();
  eval_cmd->add_option("--mapping", eval.mapping)->required();
  eval_cmd->add_option("--report", eval.report)
      ->check(CLI::IsMember({"json", "text"}))
      ->capture_default_str();

  QueryArgs query;
  auto *query_cmd = app.add_subcommand("query", "Query a model");
  query_cmd->require_subcommand(1);
  query_cmd->add_option("--model", query.model)
      ->required()
      ->envname("WEMBED_MODEL_PATH");
  query_cmd->add_option("--labels", query.labels,
                        "Resolve labels in this language via the Wikidata API");
  auto *most_similar_cmd =
      query_cmd->add_subcommand("most-similar", "Nearest neighbors");
  most_similar_cmd->add_option("entity", query.entity)->required();
  most_similar_cmd->add_option("-k", query.k)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  auto *similarity_cmd =
      query_cmd->add_subcommand("similarity", "Cosine similarity of two ids");
  similarity_cmd->add_option("a", query.entity)->required();
  similarity_cmd->add_option("b", query.entity2)->required();

  ServeArgs serve;
  auto *serve_cmd = app.add_subcommand("serve", "Run the REST API");
  serve_cmd->add_option("--model", serve.api.model_path)
      ->envname("WEMBED_MODEL_PATH");
  serve_cmd->add_option("--port", serve.api.port)
      ->envname("PORT")
      ->capture_default_str();
  serve_cmd->add_option("--bind", serve.api.bind_address)
      ->capture_default_str();
  serve_cmd->add_option("--static", serve.api.static_dir,
                        "Directory with the web UI bundle");
  serve_cmd->add_option("--k-default", serve.api.k_default)
      ->capture_default_str();
  serve_cmd->add_option("--k-max", serve.api.k_max)->capture_default_str();
  serve_cmd->add_option("--cors-origin", serve.api.cors_origins)
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success &e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError &e) {
    app.exit(e, out, err);
    return 1;
  }

  if (show_version) {
    out << "wembed " << kVersion << " (model format " << kModelFormatVersion
        << ")\n";
    return 0;
  }

  try {
    if (*extract_cmd) return RunExtract(extract, err);
    if (*train_cmd) return RunTrain(train, err);
    if (*eval_cmd) return RunEval(eval, out, err);
    if (*most_similar_cmd) return RunMostSimilar(query, out, err);
    if (*similarity_cmd) return RunSimilarity(query, out, err);
    if (*serve_cmd) return RunServe(serve, err);
  } catch (const std::invalid_argument &e) {
    err << "wembed: " << e.what() << "\n";
    return 1;
  } catch (const std::exception &e) {
    err << "wembed: error: " << e.what() << "\n";
    return 2;
  }
  err << "wembed: a subcommand is required\n" << app.help();
  return 1;
}

}  // namespace wembed
