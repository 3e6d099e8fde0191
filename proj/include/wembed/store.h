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

#ifndef WEMBED_STORE_H_
#define WEMBED_STORE_H_

#include <cstdint>
#include <istream>
#include <memory>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wembed/entity.h"
#include "wembed/trainer.h"

namespace wembed {

// Text model format: "<vocab_size> <dim>\n" followed by one
// "<token> <v1> ... <vdim>\n" line per token in vocabulary order. Components
// are written with 9 significant digits, which round-trips 32-bit floats.
void SaveText(const EmbeddingModel &model, std::ostream &out);
void SaveText(const EmbeddingModel &model, const std::string &path);

// Throws ModelFormatError naming the offending line.
EmbeddingModel LoadText(std::istream &in, const std::string &name = "model");
EmbeddingModel LoadText(const std::string &path);

class ModelFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotInVocabulary : public std::runtime_error {
 public:
  explicit NotInVocabulary(EntityId entity)
      : std::runtime_error("not in vocabulary: " + entity.str()),
        entity_(entity) {}
  EntityId entity() const { return entity_; }

 private:
  EntityId entity_;
};

struct SimilarityHit {
  EntityId entity;
  double score;

  friend bool operator==(const SimilarityHit &, const SimilarityHit &) = default;
};

// Row-normalized copy of an embedding matrix. Rows with zero norm are
// flagged and never returned as neighbors.
class UnitIndex {
 public:
  UnitIndex() = default;
  UnitIndex(std::span<const float> vectors, size_t rows, int dim);

  size_t rows() const { return rows_; }
  int dim() const { return dim_; }
  bool is_zero(size_t i) const { return zero_[i]; }
  size_t zero_rows() const { return zero_rows_; }
  float norm(size_t i) const { return norms_[i]; }

  std::span<const float> row(size_t i) const {
    return {unit_.data() + i * dim_, static_cast<size_t>(dim_)};
  }

  // Cosine of rows a and b; 0 if either has zero norm.
  double Cosine(size_t a, size_t b) const;

  // Cosine of row q against every row, written to `scores`.
  void ScoreAll(size_t q, std::span<float> scores) const;

 private:
  size_t rows_ = 0;
  int dim_ = 0;
  std::vector<float> unit_;
  std::vector<float> norms_;
  std::vector<bool> zero_;
  size_t zero_rows_ = 0;
};

// Exact cosine queries over an immutable model. Safe for concurrent use.
class SimilarityIndex {
 public:
  explicit SimilarityIndex(EmbeddingModel model);

  const EmbeddingModel &model() const { return model_; }
  const UnitIndex &unit() const { return unit_; }
  size_t size() const { return model_.vocab.size(); }
  int dim() const { return model_.dim; }

  bool Contains(EntityId id) const { return model_.vocab.Contains(id); }

  // Throws NotInVocabulary for the first unknown id.
  double Similarity(EntityId a, EntityId b) const;

  // The k most similar entities to q, excluding q itself and zero-norm rows,
  // ordered by descending score then ascending vocabulary index.
  std::vector<SimilarityHit> MostSimilar(EntityId q, size_t k) const;

 private:
  uint32_t IndexOf(EntityId id) const;

  EmbeddingModel model_;
  UnitIndex unit_;
};

}  // namespace wembed

#endif  // WEMBED_STORE_H_
