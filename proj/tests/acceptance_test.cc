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


// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "wembed/corpus.h"
#include "wembed/evalws.h"
#include "wembed/ingest.h"
#include "wembed/service.h"
#include "wembed/store.h"
#include "wembed/trainer.h"

extern char **environ;

namespace wembed {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Collects failed checks for one criterion.
class Checker {
 public:
  void Expect(bool ok, const std::string &what) {
    if (!ok && failures_.size() < 8) failures_.push_back(what);
    if (!ok) ++failed_;
  }
  bool ok() const { return failed_ == 0; }
  std::string Summary() const {
    std::string s;
    for (const auto &f : failures_) s += "\n    " + f;
    if (failed_ > failures_.size()) {
      s += "\n    ... " + std::to_string(failed_ - failures_.size()) +
           " more";
    }
    return s;
  }

 private:
  std::vector<std::string> failures_;
  size_t failed_ = 0;
};

std::string Fmt(const char *fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

fs::path WorkDir() {
  auto dir = fs::temp_directory_path() /
             ("wembed_acceptance_" + std::to_string(getpid()));
  fs::create_directories(dir);
  return dir;
}

std::string Slurp(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

EntityId Q(uint64_t n) { return EntityId::Item(n); }
EntityId P(uint64_t n) { return EntityId::Property(n); }

double P95(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  size_t i = static_cast<size_t>(std::ceil(0.95 * samples.size())) - 1;
  return samples[i];
}

// ---------------------------------------------------------------------------

constexpr char kExampleTriples[] =
    "Q22 P1546 Q2016568\nQ22 P610 Q104674\nQ22 P1151 Q8143311\n"
    "Q22 P31 Q3336843\nQ22 P36 Q23436\nQ22 P47 Q21\n";

bool ParserConformance(std::string *detail) {
  auto start = Clock::now();
  Checker c;
  std::ifstream in(WEMBED_TEST_DATA "/extract_50.nt", std::ios::binary);
  std::vector<Triple> triples;
  ExtractionStats stats =
      ExtractTriples(in, [&](const Triple &t) { triples.push_back(t); });
  c.Expect(stats.lines_read == 50, "lines_read");
  c.Expect(stats.triples_emitted == 20, "triples_emitted");
  c.Expect(stats.skipped_literal == 10, "skipped_literal");
  c.Expect(stats.skipped_non_entity_iri == 11, "skipped_non_entity_iri");
  c.Expect(stats.skipped_malformed == 4, "skipped_malformed");
  c.Expect(stats.skipped_blank_or_comment == 5, "blank/comment lines");
  c.Expect(stats.ToJson() ==
               "{\"lines_read\":50,\"triples_emitted\":20,"
               "\"skipped_literal\":10,\"skipped_non_entity_iri\":11,"
               "\"skipped_malformed\":4}",
           "stats JSON");
  c.Expect(triples.size() == 20, "emitted triple count");
  std::ostringstream first6;
  for (size_t i = 0; i < 6 && i < triples.size(); ++i) {
    WriteTriple(first6, triples[i]);
  }
  c.Expect(first6.str() == kExampleTriples, "first six extracted triples");

  // Round trip of the six example triples through the file format.
  std::vector<Triple> examples;
  std::istringstream lines(kExampleTriples);
  std::string line;
  while (std::getline(lines, line)) examples.push_back(ParseTripleLine(line));
  fs::path path = WorkDir() / "six.txt";
  WriteTriples(examples, path.string());
  c.Expect(Slurp(path) == kExampleTriples, "written bytes");
  c.Expect(ReadTriples(path.string()) == examples, "read back");
  double secs = Seconds(start);
  c.Expect(secs < 1.0, "runtime " + Fmt("%.3f s", secs));
  *detail = Fmt("%.3f s", secs) + c.Summary();
  return c.ok();
}

// ---------------------------------------------------------------------------

double RelativeError(const std::vector<double> &a,
                     const std::vector<double> &b) {
  double diff = 0, norm = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    norm += std::max(a[i] * a[i], b[i] * b[i]);
  }
  return norm == 0 ? std::sqrt(diff) : std::sqrt(diff / norm);
}

bool GradientCheck(std::string *detail) {
  auto start = Clock::now();
  std::mt19937_64 rng(20170613);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  const double eps = 1e-3;
  double worst = 0;
  for (int draw = 0; draw < 100; ++draw) {
    // The config part of a draw: dimension, label and learning rate.
    int dim = 1 + static_cast<int>(rng() % 100);
    int label = static_cast<int>(rng() % 2);
    double lr = 0.001 + 0.1 * (value(rng) + 1);
    std::vector<double> h(dim), u(dim);
    for (auto &x : h) x = value(rng);
    for (auto &x : u) x = value(rng);

    // Analytic: StepPair applies -lr * gradient.
    std::vector<double> u_after = u, h_grad(dim, 0.0);
    StepPair<double>(std::span<const double>(h), std::span<double>(u_after),
                     label, lr, std::span<double>(h_grad));
    std::vector<double> ah(dim), au(dim);
    for (int i = 0; i < dim; ++i) {
      ah[i] = -h_grad[i] / lr;
      au[i] = -(u_after[i] - u[i]) / lr;
    }

    std::vector<double> nh(dim), nu(dim);
    auto loss = [&] {
      return PairLoss<double>(std::span<const double>(h),
                              std::span<const double>(u), label);
    };
    for (int i = 0; i < dim; ++i) {
      for (auto [vec, out] : {std::pair{&h, &nh}, std::pair{&u, &nu}}) {
        double saved = (*vec)[i];
        (*vec)[i] = saved + eps;
        double plus = loss();
        (*vec)[i] = saved - eps;
        double minus = loss();
        (*vec)[i] = saved;
        (*out)[i] = (plus - minus) / (2 * eps);
      }
    }
    worst = std::max({worst, RelativeError(ah, nh), RelativeError(au, nu)});
  }
  double secs = Seconds(start);
  Checker c;
  c.Expect(worst < 1e-6, "max relative error " + Fmt("%.3g", worst));
  c.Expect(secs < 5.0, "runtime");
  *detail = "max relative error " + Fmt("%.3g", worst) + ", " +
            Fmt("%.3f s", secs) + c.Summary();
  return c.ok();
}

// ---------------------------------------------------------------------------

// Items Q1..Q30 and Q101..Q130 joined by random triples over P1..P3, plus
// five bridges between the cliques.
std::vector<Triple> TwoCliques() {
  std::mt19937_64 rng(4242);
  std::vector<Triple> triples;
  for (uint64_t base : {0, 100}) {
    for (int i = 0; i < 3000; ++i) {
      uint64_t a = base + 1 + rng() % 30;
      uint64_t b = base + 1 + rng() % 30;
      if (a == b) continue;
      triples.push_back(MakeTriple(Q(a), P(1 + rng() % 3), Q(b)));
    }
  }
  for (int i = 0; i < 5; ++i) {
    triples.push_back(
        MakeTriple(Q(1 + rng() % 30), P(1 + rng() % 3), Q(101 + rng() % 30)));
  }
  std::shuffle(triples.begin(), triples.end(), rng);
  return triples;
}

TrainingConfig CliqueConfig() {
  TrainingConfig c;
  c.algorithm = Algorithm::kCbow;
  c.dim = 16;
  c.window = 1;
  c.min_count = 1;
  c.epochs = 40;
  c.seed = 7;
  return c;
}

bool StructuralCheck(std::string *detail) {
  auto start = Clock::now();
  auto triples = TwoCliques();
  Vocabulary vocab = BuildVocabulary(triples, 1);
  VectorTripleSource source(triples);
  SimilarityIndex index(Train(source, vocab, CliqueConfig()));

  auto clique = [](EntityId e) { return e.number() > 100 ? 1 : 0; };
  std::vector<EntityId> items;
  for (uint64_t n = 1; n <= 130; ++n) {
    if (vocab.Contains(Q(n))) items.push_back(Q(n));
  }
  double intra = 0, inter = 0;
  size_t n_intra = 0, n_inter = 0;
  for (size_t i = 0; i < items.size(); ++i) {
    for (size_t j = i + 1; j < items.size(); ++j) {
      double s = index.Similarity(items[i], items[j]);
      if (clique(items[i]) == clique(items[j])) {
        intra += s;
        ++n_intra;
      } else {
        inter += s;
        ++n_inter;
      }
    }
  }
  double gap = intra / n_intra - inter / n_inter;
  size_t good = 0;
  for (EntityId item : items) {
    for (const SimilarityHit &hit : index.MostSimilar(item, index.size())) {
      if (!hit.entity.is_item()) continue;  // nearest item neighbor
      good += clique(hit.entity) == clique(item);
      break;
    }
  }
  double frac = double(good) / items.size();
  double secs = Seconds(start);
  Checker c;
  c.Expect(items.size() == 60, "all 60 items in vocabulary");
  c.Expect(gap >= 0.2, "intra - inter cosine " + Fmt("%.3f", gap));
  c.Expect(frac >= 0.9, "intra-clique nearest neighbor " + Fmt("%.3f", frac));
  c.Expect(secs < 60, "runtime");
  *detail = "intra " + Fmt("%.3f", intra / n_intra) + ", inter " +
            Fmt("%.3f", inter / n_inter) + ", intra-clique NN " +
            Fmt("%.1f%%", 100 * frac) + ", " + Fmt("%.2f s", secs) +
            c.Summary();
  return c.ok();
}

// ---------------------------------------------------------------------------

bool Determinism(std::string *detail) {
  auto triples = TwoCliques();
  Vocabulary vocab = BuildVocabulary(triples, 1);
  VectorTripleSource source(triples);
  TrainingConfig config = CliqueConfig();
  config.epochs = 5;
  config.workers = 1;
  fs::path a = WorkDir() / "det_a.txt", b = WorkDir() / "det_b.txt";
  SaveText(Train(source, vocab, config), a.string());
  SaveText(Train(source, vocab, config), b.string());
  std::string ba = Slurp(a), bb = Slurp(b);
  *detail = std::to_string(ba.size()) + " bytes";
  return !ba.empty() && ba == bb;
}

// ---------------------------------------------------------------------------

bool KnnOracle(std::string *detail) {
  auto start = Clock::now();
  const size_t rows = 200;
  const int dim = 16;
  std::mt19937_64 rng(31337);
  std::normal_distribution<float> gauss(0.0f, 1.0f);
  EmbeddingModel m;
  std::vector<EntityId> tokens;
  for (size_t i = 0; i < rows; ++i) tokens.push_back(Q(1000 + i * 7));
  m.vocab = Vocabulary::FromOrderedTokens(tokens);
  m.dim = dim;
  for (size_t i = 0; i < rows * dim; ++i) m.vectors.push_back(gauss(rng));
  // Exact ties: duplicated and rescaled rows.
  for (auto [dst, src, scale] :
       {std::tuple{10, 50, 1.0f}, {199, 50, 1.0f}, {120, 3, 2.0f}}) {
    for (int j = 0; j < dim; ++j) {
      m.row(dst)[j] = m.row(src)[j] * scale;
    }
  }
  SimilarityIndex index(m);

  // Brute force in double with (score desc, index asc).
  std::vector<double> norms(rows);
  for (size_t i = 0; i < rows; ++i) {
    double s = 0;
    for (float x : m.row(i)) s += double(x) * x;
    norms[i] = std::sqrt(s);
  }
  Checker c;
  size_t compared = 0;
  for (size_t q = 0; q < rows; ++q) {
    std::vector<std::pair<double, size_t>> all;
    for (size_t i = 0; i < rows; ++i) {
      if (i == q) continue;
      double d = 0;
      for (int j = 0; j < dim; ++j) d += double(m.row(q)[j]) * m.row(i)[j];
      all.emplace_back(d / (norms[q] * norms[i]), i);
    }
    std::sort(all.begin(), all.end(), [](const auto &a, const auto &b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    for (size_t k : {1, 5, 199}) {
      auto hits = index.MostSimilar(m.vocab.token(q), k);
      c.Expect(hits.size() == k, "size for q=" + std::to_string(q));
      for (size_t r = 0; r < std::min(k, hits.size()); ++r) {
        ++compared;
        c.Expect(hits[r].entity == m.vocab.token(all[r].second),
                 "q=" + std::to_string(q) + " k=" + std::to_string(k) +
                     " rank " + std::to_string(r));
        c.Expect(std::abs(hits[r].score - all[r].first) < 1e-6,
                 "score q=" + std::to_string(q));
      }
    }
  }
  double secs = Seconds(start);
  c.Expect(secs < 5, "runtime");
  *detail = std::to_string(compared) + " ranks compared, " +
            Fmt("%.3f s", secs) + c.Summary();
  return c.ok();
}

// ---------------------------------------------------------------------------

bool CorrelationOracle(std::string *detail) {
  struct Case {
    std::vector<double> xs, ys;
    double pearson, spearman;
  };
  // Reference values computed with 60-digit arithmetic.
  const std::vector<Case> cases = {
      {{1, 2, 3}, {1, 1, 2}, 0.86602540378443864676, 0.86602540378443864676},
      {{1, 2, 3, 4, 5, 6, 7, 8, 9, 10},
       {2.5, 3.1, 2.9, 5.0, 4.8, 7.2, 6.9, 8.1, 9.9, 9.0},
       0.96817478760766437386, 0.95151515151515151515},
      {{0.1, 0.7, 0.3, 0.9, 0.5, 0.2, 0.8, 0.4, 0.6, 1.0},
       {7.35, 6.77, 10.0, 7.46, 7.62, 7.58, 5.77, 6.31, 7.5, 6.77},
       -0.42271450471279159989, -0.42553388057604521175},
      {{3, 1, 4, 1, 5, 9, 2, 6, 5, 3}, {2, 7, 1, 8, 2, 8, 1, 8, 2, 8},
       0.1049228428773587747, 0.13471506281091267839},
      {{1, 1, 1, 2, 2, 2, 3, 3, 3, 4}, {4, 3, 3, 3, 2, 2, 2, 1, 1, 1}, -0.875,
       -0.89542483660130718954},
      {{-1.5, 2.25, 0.0, 3.75, -0.5, 1.0, 2.0, -2.0},
       {0.3, 0.1, 0.2, 0.9, -0.1, 0.4, 0.4, -0.3}, 0.75848121523554058954,
       0.65869444405229241099},
      {{10, 20, 30, 40, 50}, {50, 40, 30, 20, 10}, -1, -1},
      {{1e6 + 1, 1e6 + 2, 1e6 + 3, 1e6 + 4, 1e6 + 5, 1e6 + 6},
       {1, 4, 9, 16, 25, 36}, 0.97891726367781805178, 1.0},
      {{0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625, 0.0078125},
       {1, 3, 2, 5, 4, 7, 6}, -0.80724388049443274736,
       -0.89285714285714285714},
      {{2, 2, 3, 3, 5, 5, 8, 8, 13, 13}, {1, 2, 1, 2, 1, 2, 1, 2, 1, 2}, 0.0,
       0.0},
  };
  Checker c;
  double worst = 0;
  for (size_t i = 0; i < cases.size(); ++i) {
    double ep = std::abs(Pearson(cases[i].xs, cases[i].ys) - cases[i].pearson);
    double es =
        std::abs(Spearman(cases[i].xs, cases[i].ys) - cases[i].spearman);
    worst = std::max({worst, ep, es});
    c.Expect(ep < 1e-12, "pearson fixture " + std::to_string(i));
    c.Expect(es < 1e-12, "spearman fixture " + std::to_string(i));
  }
  std::vector<double> x = {1, 2, 3}, y = {1, 1, 2};
  double tie = Spearman(x, y);
  c.Expect(std::abs(tie - 0.8660254037844386) < 1e-9, "tie fixture");
  *detail = "max abs error " + Fmt("%.3g", worst) + ", tie fixture " +
            Fmt("%.12f", tie) + c.Summary();
  return c.ok();
}

// ---------------------------------------------------------------------------

bool EvaluationProtocol(std::string *detail) {
  auto pairs = LoadWordsim(WEMBED_DATA "/wordsim353.tsv");
  auto mapping = LoadWordMapping(WEMBED_DATA "/wordsim353_wikidata.tsv");
  std::set<EntityId> entities;
  for (const auto &[word, id] : mapping) entities.insert(id);

  std::mt19937_64 rng(353);
  std::normal_distribution<float> gauss;
  EmbeddingModel m;
  m.vocab = Vocabulary::FromOrderedTokens(
      std::vector<EntityId>(entities.begin(), entities.end()));
  m.dim = 32;
  for (size_t i = 0; i < entities.size() * m.dim; ++i) {
    m.vectors.push_back(gauss(rng));
  }
  SimilarityIndex index(m);
  EvalReport report = Evaluate(index, pairs, mapping);

  Checker c;
  c.Expect(report.n_total == 353, "n_total");
  c.Expect(report.n_used + report.skipped.size() == 353,
           "n_used + |skipped| = 353");
  bool all_unmapped = std::all_of(
      report.skipped.begin(), report.skipped.end(),
      [](const SkippedPair &s) { return s.cause == SkipCause::kUnmappedWord; });
  c.Expect(all_unmapped, "only unmapped words skipped");
  auto shuffled = pairs;
  for (int t = 0; t < 25; ++t) {
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    EvalReport r = Evaluate(index, shuffled, mapping);
    c.Expect(r.pearson == report.pearson && r.spearman == report.spearman &&
                 r.n_used == report.n_used,
             "permutation " + std::to_string(t));
  }
  *detail = "n_used " + std::to_string(report.n_used) + ", skipped " +
            std::to_string(report.skipped.size()) + c.Summary();
  return c.ok();
}

// ---------------------------------------------------------------------------

// Latencies in seconds of `n` GETs against a running server.
std::vector<double> MeasureLatency(httplib::Client &client,
                                   const std::vector<std::string> &paths,
                                   Checker *c) {
  std::vector<double> out;
  for (const std::string &path : paths) {
    auto start = Clock::now();
    auto res = client.Get(path);
    out.push_back(Seconds(start));
    c->Expect(res && res->status == 200, "GET " + path);
  }
  return out;
}

struct RunningServer {
  explicit RunningServer(const ApiHandler &handler) : server(handler) {
    port = server.Bind("127.0.0.1", 0);
    thread = std::thread([this] { server.Listen(); });
    server.WaitUntilReady();
  }
  ~RunningServer() {
    server.Stop();
    thread.join();
  }
  ApiServer server;
  int port;
  std::thread thread;
};

bool ServiceContract(std::string *detail) {
  Checker c;
  // Fixture: five entities on the first two of 16 axes.
  EmbeddingModel fixture;
  fixture.dim = 16;
  std::vector<EntityId> tokens = {Q(2), Q(313), Q(80), P(31), Q(5)};
  float xy[5][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 0}, {3, 4}};
  for (auto &v : xy) {
    std::vector<float> row(16, 0.0f);
    row[0] = v[0];
    row[1] = v[1];
    fixture.vectors.insert(fixture.vectors.end(), row.begin(), row.end());
  }
  fixture.vocab = Vocabulary::FromOrderedTokens(tokens);

  ApiHandler handler{ApiConfig{}};
  RunningServer running(handler);
  httplib::Client client("127.0.0.1", running.port);
  auto expect = [&](const std::string &path, int status,
                    const std::string &body) {
    auto res = client.Get(path);
    c.Expect(res && res->status == status && res->body == body,
             "GET " + path + " -> " +
                 (res ? std::to_string(res->status) + " " + res->body
                      : std::string("no response")));
    if (res && status == 200) {
      c.Expect(res->get_header_value("Content-Type") == "application/json",
               "content type " + path);
    }
  };
  expect("/healthz", 503, R"({"status":"loading"})");
  expect("/api/vocab/Q2", 503, R"({"error":"model-loading"})");
  handler.SetIndex(std::make_shared<const SimilarityIndex>(fixture));

  expect("/healthz", 200, R"({"status":"ok","vocab_size":5,"dim":16})");
  expect("/api/most-similar/Q2", 200,
         R"({"query":"Q2","n":10,"most_similar":[)"
         R"({"item":"Q313","similarity":0.707107},)"
         R"({"item":"Q5","similarity":0.6},)"
         R"({"item":"Q80","similarity":0.0},)"
         R"({"item":"P31","similarity":-1.0}]})");
  expect("/api/most-similar/Q80?n=2", 200,
         R"({"query":"Q80","n":2,"most_similar":[)"
         R"({"item":"Q5","similarity":0.8},)"
         R"({"item":"Q313","similarity":0.707107}]})");
  expect("/api/similarity/Q2/Q313", 200,
         R"({"entity1":"Q2","entity2":"Q313","similarity":0.707107})");
  expect("/api/vocab/Q80", 200, R"({"entity":"Q80","in_vocabulary":true})");
  expect("/api/vocab/Q81", 200, R"({"entity":"Q81","in_vocabulary":false})");
  expect("/", 404,
         R"({"error":"no-web-ui","hint":"the JSON API is available under /api/"})");
  expect("/api/most-similar/Q999", 404,
         R"({"error":"not-in-vocabulary","entity":"Q999"})");
  expect("/api/similarity/Q2/Q999", 404,
         R"({"error":"not-in-vocabulary","entity":"Q999"})");
  expect("/api/most-similar/Q02", 400,
         R"({"error":"malformed-entity","entity":"Q02"})");
  expect("/api/similarity/Q2/wd:Q3", 400,
         R"({"error":"malformed-entity","entity":"wd:Q3"})");
  expect("/api/vocab/X1", 400, R"({"error":"malformed-entity","entity":"X1"})");
  expect("/api/most-similar/Q2?n=0", 400,
         R"({"error":"invalid-n","n":"0","allowed":"1..100"})");
  expect("/api/unknown", 404, R"({"error":"not-found","path":"/api/unknown"})");

  std::vector<std::string> paths;
  const char *ids[] = {"Q2", "Q313", "Q80", "P31", "Q5"};
  for (int i = 0; i < 100; ++i) {
    paths.push_back(std::string("/api/most-similar/") + ids[i % 5]);
  }
  double p95_small = P95(MeasureLatency(client, paths, &c));
  c.Expect(p95_small < 0.010, "fixture p95 " + Fmt("%.4f s", p95_small));

  // Synthetic full-size matrix.
  auto build_start = Clock::now();
  const size_t rows = 600000;
  EmbeddingModel big;
  big.dim = 100;
  std::vector<EntityId> big_tokens;
  big_tokens.reserve(rows);
  for (size_t i = 0; i < rows; ++i) big_tokens.push_back(Q(i + 1));
  big.vocab = Vocabulary::FromOrderedTokens(std::move(big_tokens));
  big.vectors.resize(rows * big.dim);
  Rng rng(600000);
  for (float &x : big.vectors) x = static_cast<float>(rng.Uniform() - 0.5);
  handler.SetIndex(std::make_shared<const SimilarityIndex>(std::move(big)));
  double build_secs = Seconds(build_start);
  paths.clear();
  for (int i = 0; i < 100; ++i) {
    paths.push_back("/api/most-similar/Q" + std::to_string(1 + i * 5987));
  }
  double p95_big = P95(MeasureLatency(client, paths, &c));
  c.Expect(p95_big < 1.0, "600k x 100 p95 " + Fmt("%.4f s", p95_big));
  handler.SetIndex(nullptr);

  *detail = "fixture p95 " + Fmt("%.2f ms", 1e3 * p95_small) +
            ", 600k x 100 p95 " + Fmt("%.1f ms", 1e3 * p95_big) +
            " (index build " + Fmt("%.1f s", build_secs) + ")" + c.Summary();
  return c.ok();
}

// ---------------------------------------------------------------------------

// Runs the CLI binary with stdout and stderr sent to files.
pid_t Spawn(const std::vector<std::string> &args, const fs::path &out,
            const fs::path &err) {
  std::vector<char *> argv;
  std::string binary = WEMBED_BINARY;
  argv.push_back(binary.data());
  std::vector<std::string> copy = args;
  for (auto &a : copy) argv.push_back(a.data());
  argv.push_back(nullptr);
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, 1, out.c_str(),
                                   O_WRONLY | O_CREAT | O_TRUNC, 0644);
  posix_spawn_file_actions_addopen(&actions, 2, err.c_str(),
                                   O_WRONLY | O_CREAT | O_TRUNC, 0644);
  pid_t pid;
  int rc = posix_spawn(&pid, binary.c_str(), &actions, nullptr, argv.data(),
                       environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) throw std::runtime_error("cannot spawn " + binary);
  return pid;
}

int Wait(pid_t pid) {
  int status = 0;
  waitpid(pid, &status, 0);
  return WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
}

bool EndToEnd(std::string *detail) {
  auto start = Clock::now();
  Checker c;
  fs::path dir = WorkDir() / "e2e";
  fs::create_directories(dir);
  std::string data = WEMBED_TEST_DATA "/e2e";
  auto step = [&](const std::string &name,
                  const std::vector<std::string> &args) {
    int code = Wait(Spawn(args, dir / (name + ".out"), dir / (name + ".err")));
    c.Expect(code == 0, name + " exit " + std::to_string(code) + ": " +
                            Slurp(dir / (name + ".err")));
    return code == 0;
  };
  std::string triples = (dir / "triples.txt").string();
  std::string model = (dir / "model.txt").string();
  bool ok =
      step("extract", {"extract", "--input", data + "/graph.nt", "--output",
                       triples, "--stats", (dir / "stats.json").string()}) &&
      step("train", {"train", "--triples", triples, "--out", model, "--dim",
                     "16", "--min-count", "1", "--epochs", "20", "--sample",
                     "0", "--seed", "3"}) &&
      step("eval", {"eval", "--model", model, "--wordsim",
                    data + "/wordsim.tsv", "--mapping", data + "/mapping.tsv",
                    "--report", "json"});
  std::string eval_summary;
  if (ok) {
    auto stats = nlohmann::json::parse(Slurp(dir / "stats.json"));
    c.Expect(stats["triples_emitted"] == 1200, "extracted triples");
    auto report = nlohmann::json::parse(Slurp(dir / "eval.out"));
    c.Expect(report["n_used"] == 13, "eval n_used");
    eval_summary = ", eval spearman " +
                   Fmt("%.3f", report["spearman"].get<double>());
  }

  if (ok) {
    pid_t pid = Spawn({"serve", "--model", model, "--bind", "127.0.0.1",
                       "--port", "0"},
                      dir / "serve.out", dir / "serve.err");
    int port = 0;
    for (int i = 0; i < 200 && port == 0; ++i) {
      std::string log = Slurp(dir / "serve.err");
      auto at = log.find("listening on 127.0.0.1:");
      if (at != std::string::npos) {
        port = std::atoi(log.c_str() + at + 23);
      } else {
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
      }
    }
    c.Expect(port > 0, "serve did not report a port");
    if (port > 0) {
      httplib::Client client("127.0.0.1", port);
      bool ready = false;
      for (int i = 0; i < 200 && !ready; ++i) {
        auto res = client.Get("/healthz");
        ready = res && res->status == 200;
        if (!ready) std::this_thread::sleep_for(std::chrono::milliseconds(50));
      }
      c.Expect(ready, "healthz");
      auto res = client.Get("/api/most-similar/Q146?n=3");
      c.Expect(res && res->status == 200, "most-similar status");
      if (res && res->status == 200) {
        auto body = nlohmann::json::parse(res->body);
        c.Expect(body["most_similar"].size() == 3, "three hits");
        std::set<std::string> animals = {"Q19939", "Q5113", "Q729", "Q7377",
                                         "Q35694"};
        c.Expect(animals.count(body["most_similar"][0]["item"]) == 1,
                 "nearest neighbor of Q146 is an animal");
      }
      res = client.Get("/api/similarity/Q146/Q19939");
      c.Expect(res && res->status == 200, "similarity status");
    }
    kill(pid, SIGTERM);
    int code = Wait(pid);
    c.Expect(code == 0, "serve exit " + std::to_string(code) + ": " +
                            Slurp(dir / "serve.err"));
  }
  double secs = Seconds(start);
  c.Expect(secs < 120, "runtime");
  *detail = Fmt("%.2f s", secs) + eval_summary + c.Summary();
  return c.ok();
}

}  // namespace
}  // namespace wembed

int main() {
  using Criterion = std::pair<const char *, bool (*)(std::string *)>;
  const Criterion criteria[] = {
      {"parser-conformance", wembed::ParserConformance},
      {"gradient-check", wembed::GradientCheck},
      {"structural-embedding", wembed::StructuralCheck},
      {"determinism", wembed::Determinism},
      {"knn-oracle", wembed::KnnOracle},
      {"correlation-oracle", wembed::CorrelationOracle},
      {"evaluation-protocol", wembed::EvaluationProtocol},
      {"service-contract", wembed::ServiceContract},
      {"end-to-end-cli", wembed::EndToEnd},
  };
  int failed = 0;
  for (const auto &[name, run] : criteria) {
    std::string detail;
    bool ok = false;
    try {
      ok = run(&detail);
    } catch (const std::exception &e) {
      detail = std::string("exception: ") + e.what();
    }
    failed += !ok;
    std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail
              << std::endl;
  }
  std::filesystem::remove_all(wembed::WorkDir());
  std::cout << (failed ? "FAILED " : "ALL PASSED ") << "("
            << (std::size(criteria) - failed) << "/" << std::size(criteria)
            << ")" << std::endl;
  return failed ? 1 : 0;
}
