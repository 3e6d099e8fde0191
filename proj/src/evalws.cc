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

#include "wembed/evalws.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace wembed {

namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> SplitFields(std::string_view line) {
  char sep = line.find('\t') != std::string_view::npos ? '\t' : ',';
  std::vector<std::string_view> fields;
  size_t start = 0;
  while (true) {
    size_t end = line.find(sep, start);
    fields.push_back(Trim(line.substr(start, end - start)));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return fields;
}

bool ParseDouble(std::string_view text, double *value) {
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(),
                                   *value);
  return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

std::vector<WordsimPair> LoadWordsim(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open wordsim file: " + path);
  std::vector<WordsimPair> pairs;
  std::string line;
  size_t line_number = 0;
  bool first_row = true;
  while (std::getline(in, line)) {
    ++line_number;
    std::string_view text = Trim(line);
    if (text.empty() || text.front() == '#') continue;
    auto fields = SplitFields(text);
    auto fail = [&](const std::string &what) {
      return std::runtime_error(path + ":" + std::to_string(line_number) +
                                ": " + what);
    };
    if (fields.size() != 3) throw fail("expected 3 fields");
    double score;
    bool numeric = ParseDouble(fields[2], &score);
    if (first_row) {
      first_row = false;
      if (!numeric) continue;  // header
    }
    if (!numeric) throw fail("score is not a number");
    if (score < 0 || score > 10) throw fail("score outside [0, 10]");
    if (fields[0].empty() || fields[1].empty()) throw fail("empty word");
    pairs.push_back(
        {std::string(fields[0]), std::string(fields[1]), score});
  }
  if (pairs.empty()) throw std::runtime_error("no word pairs in " + path);
  return pairs;
}

WordMapping LoadWordMapping(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open mapping file: " + path);
  WordMapping mapping;
  std::string line;
  size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    std::string_view text = Trim(line);
    if (text.empty() || text.front() == '#') continue;
    auto fail = [&](const std::string &what) {
      return std::runtime_error(path + ":" + std::to_string(line_number) +
                                ": " + what);
    };
    size_t tab = text.find('\t');
    if (tab == std::string_view::npos) throw fail("expected word<TAB>QID");
    std::string word(Trim(text.substr(0, tab)));
    auto id = EntityId::Parse(Trim(text.substr(tab + 1)));
    if (!id || !id->is_item()) throw fail("invalid item id");
    if (!mapping.emplace(word, *id).second) {
      throw fail("duplicate word '" + word + "'");
    }
  }
  return mapping;
}

const char *SkipCauseName(SkipCause cause) {
  return cause == SkipCause::kUnmappedWord ? "unmapped_word" : "oov_entity";
}

EvalReport Evaluate(const SimilarityIndex &index,
                    std::span<const WordsimPair> pairs,
                    const WordMapping &mapping) {
  EvalReport report;
  report.n_total = pairs.size();
  std::vector<std::pair<double, double>> scored;  // (human, predicted)
  for (const WordsimPair &pair : pairs) {
    auto a = mapping.find(pair.word1);
    auto b = mapping.find(pair.word2);
    if (a == mapping.end() || b == mapping.end()) {
      report.skipped.push_back({pair, SkipCause::kUnmappedWord});
      continue;
    }
    if (!index.Contains(a->second) || !index.Contains(b->second)) {
      report.skipped.push_back({pair, SkipCause::kOovEntity});
      continue;
    }
    scored.emplace_back(pair.human_score,
                        index.Similarity(a->second, b->second));
  }
  report.n_used = scored.size();
  if (report.n_used < 2) {
    throw std::runtime_error("only " + std::to_string(report.n_used) +
                             " usable pairs; correlation undefined");
  }
  // Canonical order makes the sums independent of the input order.
  std::sort(scored.begin(), scored.end());
  std::vector<double> predicted, human;
  for (const auto &[h, p] : scored) {
    human.push_back(h);
    predicted.push_back(p);
  }
  report.pearson = Pearson(predicted, human);
  report.spearman = Spearman(predicted, human);
  return report;
}

std::string EvalReport::ToJson() const {
  nlohmann::json skipped_json = nlohmann::json::array();
  for (const SkippedPair &s : skipped) {
    skipped_json.push_back({{"word1", s.pair.word1},
                            {"word2", s.pair.word2},
                            {"human_score", s.pair.human_score},
                            {"reason", SkipCauseName(s.cause)}});
  }
  nlohmann::json j = {{"n_total", n_total},   {"n_used", n_used},
                      {"pearson", pearson},   {"spearman", spearman},
                      {"skipped", skipped_json}};
  return j.dump(2);
}

std::string EvalReport::ToText() const {
  size_t unmapped = std::count_if(skipped.begin(), skipped.end(), [](auto &s) {
    return s.cause == SkipCause::kUnmappedWord;
  });
  std::ostringstream os;
  os.precision(4);
  os << std::fixed;
  os << "pairs:    " << n_total << "\n"
     << "used:     " << n_used << "\n"
     << "skipped:  " << skipped.size() << " (unmapped_word " << unmapped
     << ", oov_entity " << skipped.size() - unmapped << ")\n"
     << "pearson:  " << pearson << "\n"
     << "spearman: " << spearman << "\n";
  return os.str();
}

double Pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw std::invalid_argument("pearson: length mismatch");
  }
  const size_t n = xs.size();
  if (n < 2) throw std::invalid_argument("pearson: need at least 2 points");
  long double mx = 0, my = 0;
  for (size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  long double sxy = 0, sxx = 0, syy = 0;
  for (size_t i = 0; i < n; ++i) {
    long double dx = xs[i] - mx, dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0 || syy == 0) {
    throw std::invalid_argument("pearson: zero variance");
  }
  long double r = sxy / std::sqrt(sxx * syy);
  return static_cast<double>(std::clamp(r, -1.0L, 1.0L));
}

std::vector<double> AverageRanks(std::span<const double> values) {
  std::vector<size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  size_t i = 0;
  while (i < order.size()) {
    size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) {
      ++j;
    }
    double rank = (static_cast<double>(i + j) / 2.0) + 1.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double Spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw std::invalid_argument("spearman: length mismatch");
  }
  return Pearson(AverageRanks(xs), AverageRanks(ys));
}

}  // namespace wembed
