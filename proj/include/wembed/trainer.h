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

#ifndef WEMBED_TRAINER_H_
#define WEMBED_TRAINER_H_

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wembed/corpus.h"
#include "wembed/entity.h"

namespace wembed {

enum class Algorithm { kCbow, kSkipGram };

const char *AlgorithmName(Algorithm algorithm);
Algorithm ParseAlgorithm(const std::string &name);  // "cbow" | "sg"

// Defaults reproduce the reference setup: CBOW, 100 dimensions, window 1,
// minimum count 20; the rest are the usual word2vec defaults.
struct TrainingConfig {
  int dim = 100;
  int window = 1;
  uint64_t min_count = 20;
  Algorithm algorithm = Algorithm::kCbow;
  int negative = 5;
  int epochs = 5;
  double lr_initial = 0.025;
  double lr_min = 1e-4;
  double subsample_t = 1e-3;  // 0 disables subsampling
  uint64_t seed = 1;
  double noise_exponent = 0.75;
  int workers = 1;

  // Throws std::invalid_argument describing the first violated constraint.
  void Validate() const;
  std::string ToString() const;
};

// Trained embedding: one row of `dim` floats per vocabulary entry.
struct EmbeddingModel {
  Vocabulary vocab;
  int dim = 0;
  std::vector<float> vectors;  // row-major, vocab.size() x dim
  TrainingConfig config;
  uint64_t trained_tokens = 0;

  std::span<const float> row(size_t i) const {
    return {vectors.data() + i * dim, static_cast<size_t>(dim)};
  }
  std::span<float> row(size_t i) {
    return {vectors.data() + i * dim, static_cast<size_t>(dim)};
  }
  bool AllFinite() const;
};

// Deterministic 64-bit generator with a portable uniform mapping.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}
  uint64_t Next() { return engine_(); }
  // Uniform in [0, 1).
  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // Uniform in {lo, ..., hi}.
  int UniformInt(int lo, int hi) {
    return lo + static_cast<int>(Uniform() * (hi - lo + 1));
  }

 private:
  std::mt19937_64 engine_;
};

// Cumulative unigram^exponent distribution for negative sampling.
class NoiseTable {
 public:
  NoiseTable() = default;
  NoiseTable(const Vocabulary &vocab, double exponent);
  // Directly from counts; used by tests and by vocabularies without counts.
  NoiseTable(std::span<const uint64_t> counts, double exponent);

  uint32_t Sample(Rng &rng) const;
  double Probability(uint32_t index) const;
  size_t size() const { return cumulative_.size(); }

 private:
  void Init(std::span<const uint64_t> counts, double exponent);
  std::vector<double> cumulative_;
};

// Input ("projection") and output ("context") matrices during training.
struct TrainingState {
  int dim = 0;
  size_t rows = 0;
  std::vector<float> input;
  std::vector<float> output;

  std::span<float> in(size_t i) {
    return {input.data() + i * dim, static_cast<size_t>(dim)};
  }
  std::span<float> out(size_t i) {
    return {output.data() + i * dim, static_cast<size_t>(dim)};
  }
};

// Input vectors uniform in [-0.5/dim, 0.5/dim); output vectors zero.
TrainingState InitModel(const TrainingConfig &config, size_t vocab_size);

template <typename Real>
Real Sigmoid(Real x) {
  return Real(1) / (Real(1) + std::exp(-x));
}

template <typename Real>
Real Dot(std::span<const Real> a, std::span<const Real> b) {
  Real sum = 0;
  for (size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

// Loss of one (context, target) pair:
//   -[label log s(u.h) + (1 - label) log s(-u.h)],  s = logistic.
template <typename Real>
Real PairLoss(std::span<const Real> h, std::span<const Real> u, int label) {
  Real x = Dot(h, u);
  Real z = label ? x : -x;
  // -log s(z) = log(1 + e^-z), evaluated without overflow.
  return z > 0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
}

// One negative-sampling update. With g = (label - s(u.h)) * lr, adds g*u to
// `h_grad` (using u before the update) and g*h to `u`. Returns the pre-update
// loss.
template <typename Real>
Real StepPair(std::span<const Real> h, std::span<Real> u, int label, Real lr,
              std::span<Real> h_grad) {
  Real x = Dot<Real>(h, u);
  Real g = (static_cast<Real>(label) - Sigmoid(x)) * lr;
  Real z = label ? x : -x;
  Real loss = z > 0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
  for (size_t i = 0; i < h.size(); ++i) h_grad[i] += g * u[i];
  for (size_t i = 0; i < h.size(); ++i) u[i] += g * h[i];
  return loss;
}

// Context positions for one center position given the reduced window
// radius `b`, in ascending order.
void ContextPositions(size_t length, size_t center, int b,
                      std::vector<size_t> *out);

// Accumulated per-sentence statistics.
struct SentenceLoss {
  double loss = 0;
  uint64_t pairs = 0;
};

// Per-thread scratch and hyperparameters shared by the sentence trainers.
struct SentenceTrainer {
  const TrainingConfig *config;
  const NoiseTable *noise;
  TrainingState *state;
  std::vector<float> h;
  std::vector<float> h_grad;
  std::vector<size_t> context;

  SentenceTrainer(const TrainingConfig &c, const NoiseTable &n,
                  TrainingState &s)
      : config(&c), noise(&n), state(&s), h(c.dim), h_grad(c.dim) {}

  // CBOW: for each position, h is the mean of the context input vectors;
  // the accumulated h-gradient is split equally over the context vectors.
  SentenceLoss Cbow(std::span<const uint32_t> sentence, float lr, Rng &rng);

  // Skip-gram: each (center, context) pair trains independently with h equal
  // to the context word's input vector and the center as target.
  SentenceLoss SkipGram(std::span<const uint32_t> sentence, float lr, Rng &rng);

 private:
  // Positive step plus `negative` negative steps against `target`.
  void TrainTarget(uint32_t target, float lr, Rng &rng, SentenceLoss *loss);
};

// Source of triples that can be iterated once per epoch.
class TripleSource {
 public:
  virtual ~TripleSource() = default;
  virtual void ForEach(const std::function<void(const Triple &)> &fn) const = 0;
};

class VectorTripleSource : public TripleSource {
 public:
  explicit VectorTripleSource(std::span<const Triple> triples)
      : triples_(triples) {}
  void ForEach(const std::function<void(const Triple &)> &fn) const override;

 private:
  std::span<const Triple> triples_;
};

// Re-reads a triple text file on every pass.
class FileTripleSource : public TripleSource {
 public:
  explicit FileTripleSource(std::string path) : path_(std::move(path)) {}
  void ForEach(const std::function<void(const Triple &)> &fn) const override;

 private:
  std::string path_;
};

struct EpochReport {
  int epoch;          // 1-based
  double mean_loss;   // mean pre-update pair loss
  uint64_t pairs;
  double lr_end;
};

using EpochCallback = std::function<void(const EpochReport &)>;

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Runs config.epochs passes over `source`. The learning rate decays
// linearly from lr_initial to lr_min over epochs * vocab.total_count()
// tokens. With workers > 1 the sentences are sharded over threads that
// update the shared matrices without locking, and results are not
// reproducible.
EmbeddingModel Train(const TripleSource &source, const Vocabulary &vocab,
                     const TrainingConfig &config,
                     const EpochCallback &on_epoch = nullptr);

}  // namespace wembed

#endif  // WEMBED_TRAINER_H_
