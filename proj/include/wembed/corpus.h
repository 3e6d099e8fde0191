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

#ifndef WEMBED_CORPUS_H_
#define WEMBED_CORPUS_H_

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "wembed/entity.h"

namespace wembed {

// Token table ordered by descending count, ties by ascending serialized
// token. Immutable once built.
class Vocabulary {
 public:
  struct Entry {
    EntityId token;
    uint64_t count;  // 0 when the vocabulary was loaded without counts

    friend bool operator==(const Entry &, const Entry &) = default;
  };

  Vocabulary() = default;

  // Takes entries that already satisfy the ordering invariant. Throws
  // std::invalid_argument on duplicates, zero counts or bad order.
  explicit Vocabulary(std::vector<Entry> entries);

  // Keeps the given token order; counts are unknown (zero). Used for models
  // loaded from a vector file.
  static Vocabulary FromOrderedTokens(std::vector<EntityId> tokens);

  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const Entry &entry(size_t i) const { return entries_[i]; }
  EntityId token(size_t i) const { return entries_[i].token; }
  uint64_t count(size_t i) const { return entries_[i].count; }
  std::span<const Entry> entries() const { return entries_; }
  bool has_counts() const { return has_counts_; }

  std::optional<uint32_t> Find(EntityId token) const;
  bool Contains(EntityId token) const { return Find(token).has_value(); }

  // Sum of all entry counts.
  uint64_t total_count() const { return total_count_; }

  // "token\tcount\n" per entry, in vocabulary order.
  void Save(const std::string &path) const;
  static Vocabulary Load(const std::string &path);

  friend bool operator==(const Vocabulary &a, const Vocabulary &b) {
    return a.entries_ == b.entries_;
  }

 private:
  void BuildIndex();

  std::vector<Entry> entries_;
  std::unordered_map<EntityId, uint32_t> index_;
  uint64_t total_count_ = 0;
  bool has_counts_ = true;
};

struct VocabStats {
  uint64_t total_tokens_kept = 0;
  uint64_t total_tokens_dropped = 0;
  uint64_t n_items = 0;
  uint64_t n_properties = 0;
};

// Accumulates token counts over all three positions of each triple.
class VocabularyBuilder {
 public:
  void Add(const Triple &triple);
  void Merge(const VocabularyBuilder &other);
  uint64_t triples_seen() const { return triples_; }

  // Drops tokens with count < min_count and orders the rest.
  Vocabulary Build(uint64_t min_count, VocabStats *stats = nullptr) const;

 private:
  std::unordered_map<EntityId, uint64_t> counts_;
  uint64_t triples_ = 0;
};

Vocabulary BuildVocabulary(std::span<const Triple> triples, uint64_t min_count,
                           VocabStats *stats = nullptr);

// [subject, predicate, object]
inline std::array<EntityId, 3> SentenceOf(const Triple &t) {
  return {t.subject, t.predicate, t.object};
}

// Maps tokens to vocabulary indices, dropping out-of-vocabulary tokens.
std::vector<uint32_t> EncodeSentence(const Vocabulary &vocab,
                                     std::span<const EntityId> tokens);

// Appends to `out` instead of allocating.
void EncodeSentence(const Vocabulary &vocab, std::span<const EntityId> tokens,
                    std::vector<uint32_t> *out);

// Probability of keeping one occurrence of a token under frequent-token
// subsampling: with f = count/total, min(1, (sqrt(f/t) + 1) * t/f).
double KeepProbability(uint64_t count, uint64_t total, double threshold);

}  // namespace wembed

#endif  // WEMBED_CORPUS_H_
