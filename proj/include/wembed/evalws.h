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

#ifndef WEMBED_EVALWS_H_
#define WEMBED_EVALWS_H_

#include <map>
#include <span>
#include <string>
#include <vector>

#include "wembed/entity.h"
#include "wembed/store.h"

namespace wembed {

struct WordsimPair {
  std::string word1;
  std::string word2;
  double human_score;
};

// Reads "word1 word2 score" rows separated by tabs or commas. Lines starting
// with '#' and a first-row header whose score column is not numeric are
// skipped. Throws std::runtime_error with the line number on a bad row, and
// on a file without pairs.
std::vector<WordsimPair> LoadWordsim(const std::string &path);

// Case-sensitive word -> item mapping loaded from "word<TAB>QID" lines.
// '#' starts a comment line.
using WordMapping = std::map<std::string, EntityId>;
WordMapping LoadWordMapping(const std::string &path);

enum class SkipCause { kUnmappedWord, kOovEntity };
const char *SkipCauseName(SkipCause cause);

struct SkippedPair {
  WordsimPair pair;
  SkipCause cause;
};

struct EvalReport {
  size_t n_total = 0;
  size_t n_used = 0;
  double pearson = 0;
  double spearman = 0;
  std::vector<SkippedPair> skipped;  // in input order

  std::string ToJson() const;
  std::string ToText() const;
};

// Scores every pair whose words both map to in-vocabulary entities and
// correlates the cosine scores with the human scores. Throws
// std::runtime_error if fewer than two pairs are usable.
EvalReport Evaluate(const SimilarityIndex &index,
                    std::span<const WordsimPair> pairs,
                    const WordMapping &mapping);

// Sample Pearson correlation. Throws std::invalid_argument on size mismatch,
// fewer than two points, or zero variance.
double Pearson(std::span<const double> xs, std::span<const double> ys);

// Pearson correlation of ranks; ties receive their average rank.
double Spearman(std::span<const double> xs, std::span<const double> ys);

// 1-based fractional ranks.
std::vector<double> AverageRanks(std::span<const double> values);

}  // namespace wembed

#endif  // WEMBED_EVALWS_H_
