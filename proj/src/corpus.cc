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

#include "wembed/corpus.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace wembed {

namespace {

// Descending count, then ascending serialized token.
bool EntryBefore(const Vocabulary::Entry &a, const Vocabulary::Entry &b) {
  if (a.count != b.count) return a.count > b.count;
  return a.token.str() < b.token.str();
}

}  // namespace

Vocabulary::Vocabulary(std::vector<Entry> entries)
    : entries_(std::move(entries)) {
  for (size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].count == 0) {
      throw std::invalid_argument("zero count for " + entries_[i].token.str());
    }
    if (i > 0 && !EntryBefore(entries_[i - 1], entries_[i])) {
      throw std::invalid_argument("vocabulary out of order at " +
                                  entries_[i].token.str());
    }
    total_count_ += entries_[i].count;
  }
  BuildIndex();
}

Vocabulary Vocabulary::FromOrderedTokens(std::vector<EntityId> tokens) {
  Vocabulary vocab;
  vocab.has_counts_ = false;
  vocab.entries_.reserve(tokens.size());
  for (EntityId t : tokens) vocab.entries_.push_back({t, 0});
  vocab.BuildIndex();
  return vocab;
}

void Vocabulary::BuildIndex() {
  if (entries_.size() > UINT32_MAX) {
    throw std::invalid_argument("vocabulary too large");
  }
  index_.reserve(entries_.size());
  for (size_t i = 0; i < entries_.size(); ++i) {
    auto [it, inserted] =
        index_.emplace(entries_[i].token, static_cast<uint32_t>(i));
    if (!inserted) {
      throw std::invalid_argument("duplicate token " +
                                  entries_[i].token.str());
    }
  }
}

std::optional<uint32_t> Vocabulary::Find(EntityId token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void Vocabulary::Save(const std::string &path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (const Entry &e : entries_) {
    out << e.token.str() << '\t' << e.count << '\n';
  }
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

Vocabulary Vocabulary::Load(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open vocabulary: " + path);
  std::vector<Entry> entries;
  std::string line;
  size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    auto fail = [&](const std::string &what) {
      return std::runtime_error(path + ":" + std::to_string(line_number) +
                                ": " + what);
    };
    size_t tab = line.find('\t');
    if (tab == std::string::npos) throw fail("expected token<TAB>count");
    auto token = EntityId::Parse(std::string_view(line).substr(0, tab));
    if (!token) throw fail("invalid token");
    uint64_t count = 0;
    const char *begin = line.data() + tab + 1;
    const char *end = line.data() + line.size();
    auto [ptr, ec] = std::from_chars(begin, end, count);
    if (ec != std::errc() || ptr != end || begin == end) {
      throw fail("invalid count");
    }
    entries.push_back({*token, count});
  }
  try {
    return Vocabulary(std::move(entries));
  } catch (const std::invalid_argument &e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void VocabularyBuilder::Add(const Triple &triple) {
  ++counts_[triple.subject];
  ++counts_[triple.predicate];
  ++counts_[triple.object];
  ++triples_;
}

void VocabularyBuilder::Merge(const VocabularyBuilder &other) {
  for (const auto &[token, count] : other.counts_) counts_[token] += count;
  triples_ += other.triples_;
}

Vocabulary VocabularyBuilder::Build(uint64_t min_count,
                                    VocabStats *stats) const {
  if (min_count < 1) throw std::invalid_argument("min_count must be >= 1");
  std::vector<Vocabulary::Entry> entries;
  VocabStats s;
  for (const auto &[token, count] : counts_) {
    if (count < min_count) {
      s.total_tokens_dropped += count;
      continue;
    }
    entries.push_back({token, count});
    s.total_tokens_kept += count;
    if (token.is_item()) {
      ++s.n_items;
    } else {
      ++s.n_properties;
    }
  }
  // Sort on precomputed serialized tokens.
  std::vector<std::pair<std::string, size_t>> keys;
  keys.reserve(entries.size());
  for (size_t i = 0; i < entries.size(); ++i) {
    keys.emplace_back(entries[i].token.str(), i);
  }
  std::sort(keys.begin(), keys.end(), [&](const auto &a, const auto &b) {
    uint64_t ca = entries[a.second].count, cb = entries[b.second].count;
    if (ca != cb) return ca > cb;
    return a.first < b.first;
  });
  std::vector<Vocabulary::Entry> ordered;
  ordered.reserve(entries.size());
  for (const auto &k : keys) ordered.push_back(entries[k.second]);
  if (stats) *stats = s;
  return Vocabulary(std::move(ordered));
}

Vocabulary BuildVocabulary(std::span<const Triple> triples, uint64_t min_count,
                           VocabStats *stats) {
  VocabularyBuilder builder;
  for (const Triple &t : triples) builder.Add(t);
  return builder.Build(min_count, stats);
}

std::vector<uint32_t> EncodeSentence(const Vocabulary &vocab,
                                     std::span<const EntityId> tokens) {
  std::vector<uint32_t> out;
  out.reserve(tokens.size());
  EncodeSentence(vocab, tokens, &out);
  return out;
}

void EncodeSentence(const Vocabulary &vocab, std::span<const EntityId> tokens,
                    std::vector<uint32_t> *out) {
  for (EntityId t : tokens) {
    if (auto i = vocab.Find(t)) out->push_back(*i);
  }
}

double KeepProbability(uint64_t count, uint64_t total, double threshold) {
  if (count < 1) throw std::invalid_argument("count must be >= 1");
  if (total < count) throw std::invalid_argument("total must be >= count");
  if (!(threshold > 0)) throw std::invalid_argument("threshold must be > 0");
  double f = static_cast<double>(count) / static_cast<double>(total);
  double p = (std::sqrt(f / threshold) + 1.0) * threshold / f;
  return std::min(1.0, p);
}

}  // namespace wembed
