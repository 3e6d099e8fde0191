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

#include "wembed/store.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <unordered_set>

namespace wembed {

namespace {

// Splits on single spaces.
void SplitSpaces(std::string_view line, std::vector<std::string_view> *out) {
  out->clear();
  size_t start = 0;
  while (start <= line.size()) {
    size_t end = line.find(' ', start);
    if (end == std::string_view::npos) end = line.size();
    out->push_back(line.substr(start, end - start));
    start = end + 1;
  }
}

template <typename T>
bool ParseNumber(std::string_view text, T *value) {
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(),
                                   *value);
  return ec == std::errc() && ptr == text.data() + text.size();
}

float DotUnrolled(const float *a, const float *b, size_t n) {
  float s[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    for (size_t j = 0; j < 8; ++j) s[j] += a[i + j] * b[i + j];
  }
  float tail = 0;
  for (; i < n; ++i) tail += a[i] * b[i];
  return ((s[0] + s[4]) + (s[1] + s[5])) + ((s[2] + s[6]) + (s[3] + s[7])) +
         tail;
}

}  // namespace

void SaveText(const EmbeddingModel &model, std::ostream &out) {
  out << model.vocab.size() << ' ' << model.dim << '\n';
  char buf[64];
  std::string line;
  for (size_t i = 0; i < model.vocab.size(); ++i) {
    line = model.vocab.token(i).str();
    for (float v : model.row(i)) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v,
                                     std::chars_format::general, 9);
      line.push_back(' ');
      line.append(buf, ptr);
    }
    line.push_back('\n');
    out << line;
  }
}

void SaveText(const EmbeddingModel &model, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  SaveText(model, out);
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

EmbeddingModel LoadText(std::istream &in, const std::string &name) {
  size_t line_number = 0;
  auto fail = [&](const std::string &what) {
    return ModelFormatError(name + ":" + std::to_string(line_number) + ": " +
                            what);
  };
  std::string line;
  std::vector<std::string_view> fields;

  if (!std::getline(in, line)) {
    ++line_number;
    throw fail("missing header");
  }
  ++line_number;
  SplitSpaces(line, &fields);
  size_t rows = 0;
  int dim = 0;
  if (fields.size() != 2 || !ParseNumber(fields[0], &rows) ||
      !ParseNumber(fields[1], &dim) || dim < 1) {
    throw fail("header must be '<vocab_size> <dim>'");
  }

  EmbeddingModel model;
  model.dim = dim;
  model.vectors.resize(rows * static_cast<size_t>(dim));
  std::vector<EntityId> tokens;
  tokens.reserve(rows);
  std::unordered_set<EntityId> seen;
  for (size_t r = 0; r < rows; ++r) {
    if (!std::getline(in, line)) {
      ++line_number;
      throw fail("expected " + std::to_string(rows) + " rows, found " +
                 std::to_string(r));
    }
    ++line_number;
    SplitSpaces(line, &fields);
    if (fields.size() != static_cast<size_t>(dim) + 1) {
      throw fail("expected token and " + std::to_string(dim) +
                 " components, found " + std::to_string(fields.size()) +
                 " fields");
    }
    auto token = EntityId::Parse(fields[0]);
    if (!token) throw fail("invalid token '" + std::string(fields[0]) + "'");
    if (!seen.insert(*token).second) {
      throw fail("duplicate token " + token->str());
    }
    tokens.push_back(*token);
    float *row = model.vectors.data() + r * dim;
    for (int j = 0; j < dim; ++j) {
      if (!ParseNumber(fields[j + 1], &row[j]) || !std::isfinite(row[j])) {
        throw fail("bad component " + std::to_string(j + 1) + ": '" +
                   std::string(fields[j + 1]) + "'");
      }
    }
  }
  if (std::getline(in, line)) {
    ++line_number;
    throw fail("unexpected content after " + std::to_string(rows) + " rows");
  }
  model.vocab = Vocabulary::FromOrderedTokens(std::move(tokens));
  return model;
}

EmbeddingModel LoadText(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model: " + path);
  return LoadText(in, path);
}

UnitIndex::UnitIndex(std::span<const float> vectors, size_t rows, int dim)
    : rows_(rows),
      dim_(dim),
      unit_(vectors.begin(), vectors.end()),
      norms_(rows),
      zero_(rows, false) {
  for (size_t i = 0; i < rows; ++i) {
    float *row = unit_.data() + i * dim;
    double sq = 0;
    for (int j = 0; j < dim; ++j) sq += static_cast<double>(row[j]) * row[j];
    double norm = std::sqrt(sq);
    norms_[i] = static_cast<float>(norm);
    if (norm == 0) {
      zero_[i] = true;
      ++zero_rows_;
      continue;
    }
    for (int j = 0; j < dim; ++j) {
      row[j] = static_cast<float>(row[j] / norm);
    }
  }
}

double UnitIndex::Cosine(size_t a, size_t b) const {
  if (zero_[a] || zero_[b]) return 0.0;
  double dot = DotUnrolled(row(a).data(), row(b).data(), dim_);
  return std::clamp(dot, -1.0, 1.0);
}

void UnitIndex::ScoreAll(size_t q, std::span<float> scores) const {
  const float *query = row(q).data();
  for (size_t i = 0; i < rows_; ++i) {
    scores[i] = DotUnrolled(query, unit_.data() + i * dim_, dim_);
  }
}

SimilarityIndex::SimilarityIndex(EmbeddingModel model)
    : model_(std::move(model)),
      unit_(model_.vectors, model_.vocab.size(), model_.dim) {}

uint32_t SimilarityIndex::IndexOf(EntityId id) const {
  auto i = model_.vocab.Find(id);
  if (!i) throw NotInVocabulary(id);
  return *i;
}

double SimilarityIndex::Similarity(EntityId a, EntityId b) const {
  uint32_t ia = IndexOf(a);
  uint32_t ib = IndexOf(b);
  return unit_.Cosine(ia, ib);
}

std::vector<SimilarityHit> SimilarityIndex::MostSimilar(EntityId q,
                                                        size_t k) const {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  uint32_t qi = IndexOf(q);
  std::vector<SimilarityHit> hits;
  if (unit_.is_zero(qi)) return hits;

  std::vector<float> scores(unit_.rows());
  unit_.ScoreAll(qi, scores);
  std::vector<std::pair<float, uint32_t>> candidates;
  candidates.reserve(scores.size());
  for (uint32_t i = 0; i < scores.size(); ++i) {
    if (i == qi || unit_.is_zero(i)) continue;
    candidates.emplace_back(std::clamp(scores[i], -1.0f, 1.0f), i);
  }
  auto before = [](const std::pair<float, uint32_t> &a,
                   const std::pair<float, uint32_t> &b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  };
  if (k < candidates.size()) {
    std::nth_element(candidates.begin(), candidates.begin() + k,
                     candidates.end(), before);
    candidates.resize(k);
  }
  std::sort(candidates.begin(), candidates.end(), before);
  hits.reserve(candidates.size());
  for (const auto &[score, i] : candidates) {
    hits.push_back({model_.vocab.token(i), score});
  }
  return hits;
}

}  // namespace wembed
