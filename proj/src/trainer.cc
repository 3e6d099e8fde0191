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

#include "wembed/trainer.h"

#include <algorithm>
#include <atomic>
#include <sstream>
#include <thread>

#include "wembed/ingest.h"

namespace wembed {

namespace {

constexpr int kMaxNegativeRedraws = 100;

// SplitMix64 finalizer; derives independent seeds per RNG stream.
uint64_t MixSeed(uint64_t seed, uint64_t stream) {
  uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

bool AllFinite(std::span<const float> values) {
  return std::all_of(values.begin(), values.end(),
                     [](float v) { return std::isfinite(v); });
}

}  // namespace

const char *AlgorithmName(Algorithm algorithm) {
  return algorithm == Algorithm::kCbow ? "cbow" : "sg";
}

Algorithm ParseAlgorithm(const std::string &name) {
  if (name == "cbow") return Algorithm::kCbow;
  if (name == "sg" || name == "skipgram") return Algorithm::kSkipGram;
  throw std::invalid_argument("unknown algorithm '" + name +
                              "' (expected cbow or sg)");
}

void TrainingConfig::Validate() const {
  if (dim < 1) throw std::invalid_argument("dim must be >= 1");
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  if (min_count < 1) throw std::invalid_argument("min_count must be >= 1");
  if (negative < 1) throw std::invalid_argument("negative must be >= 1");
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (!(lr_min > 0) || !(lr_min <= lr_initial)) {
    throw std::invalid_argument("need 0 < lr_min <= lr_initial");
  }
  if (!(subsample_t >= 0)) {
    throw std::invalid_argument("subsample threshold must be >= 0");
  }
  if (!std::isfinite(noise_exponent)) {
    throw std::invalid_argument("noise exponent must be finite");
  }
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
}

std::string TrainingConfig::ToString() const {
  std::ostringstream os;
  os << "algorithm=" << AlgorithmName(algorithm) << " dim=" << dim
     << " window=" << window << " min_count=" << min_count
     << " negative=" << negative << " epochs=" << epochs
     << " lr=" << lr_initial << ".." << lr_min << " sample=" << subsample_t
     << " noise_exponent=" << noise_exponent << " seed=" << seed
     << " workers=" << workers;
  return os.str();
}

bool EmbeddingModel::AllFinite() const { return wembed::AllFinite(vectors); }

NoiseTable::NoiseTable(const Vocabulary &vocab, double exponent) {
  std::vector<uint64_t> counts(vocab.size());
  for (size_t i = 0; i < vocab.size(); ++i) {
    counts[i] = vocab.has_counts() ? vocab.count(i) : 1;
  }
  Init(counts, exponent);
}

NoiseTable::NoiseTable(std::span<const uint64_t> counts, double exponent) {
  Init(counts, exponent);
}

void NoiseTable::Init(std::span<const uint64_t> counts, double exponent) {
  if (counts.empty()) throw std::invalid_argument("empty noise distribution");
  cumulative_.resize(counts.size());
  double sum = 0;
  for (size_t i = 0; i < counts.size(); ++i) {
    sum += std::pow(static_cast<double>(counts[i]), exponent);
    cumulative_[i] = sum;
  }
  for (double &c : cumulative_) c /= sum;
  cumulative_.back() = 1.0;
}

uint32_t NoiseTable::Sample(Rng &rng) const {
  double u = rng.Uniform();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) --it;
  return static_cast<uint32_t>(it - cumulative_.begin());
}

double NoiseTable::Probability(uint32_t index) const {
  return index == 0 ? cumulative_[0]
                    : cumulative_[index] - cumulative_[index - 1];
}

TrainingState InitModel(const TrainingConfig &config, size_t vocab_size) {
  if (vocab_size == 0) throw std::invalid_argument("empty vocabulary");
  TrainingState state;
  state.dim = config.dim;
  state.rows = vocab_size;
  size_t n = vocab_size * static_cast<size_t>(config.dim);
  state.input.resize(n);
  state.output.assign(n, 0.0f);
  Rng rng(MixSeed(config.seed, 0));
  float scale = 1.0f / static_cast<float>(config.dim);
  for (float &v : state.input) {
    v = static_cast<float>(rng.Uniform() - 0.5) * scale;
  }
  return state;
}

void ContextPositions(size_t length, size_t center, int b,
                      std::vector<size_t> *out) {
  out->clear();
  size_t lo = center >= static_cast<size_t>(b) ? center - b : 0;
  size_t hi = std::min(length - 1, center + static_cast<size_t>(b));
  for (size_t p = lo; p <= hi; ++p) {
    if (p != center) out->push_back(p);
  }
}

void SentenceTrainer::TrainTarget(uint32_t target, float lr, Rng &rng,
                                  SentenceLoss *loss) {
  std::span<const float> hv(h);
  loss->loss += StepPair<float>(hv, state->out(target), 1, lr, h_grad);
  ++loss->pairs;
  for (int n = 0; n < config->negative; ++n) {
    uint32_t negative = target;
    for (int attempt = 0; attempt < kMaxNegativeRedraws && negative == target;
         ++attempt) {
      negative = noise->Sample(rng);
    }
    if (negative == target) continue;
    loss->loss += StepPair<float>(hv, state->out(negative), 0, lr, h_grad);
    ++loss->pairs;
  }
}

SentenceLoss SentenceTrainer::Cbow(std::span<const uint32_t> sentence,
                                   float lr, Rng &rng) {
  SentenceLoss loss;
  if (sentence.size() < 2) return loss;
  const size_t dim = h.size();
  for (size_t p = 0; p < sentence.size(); ++p) {
    int b = rng.UniformInt(1, config->window);
    ContextPositions(sentence.size(), p, b, &context);
    if (context.empty()) continue;
    std::fill(h.begin(), h.end(), 0.0f);
    for (size_t c : context) {
      std::span<const float> v = state->in(sentence[c]);
      for (size_t i = 0; i < dim; ++i) h[i] += v[i];
    }
    float inv = 1.0f / static_cast<float>(context.size());
    for (float &x : h) x *= inv;
    std::fill(h_grad.begin(), h_grad.end(), 0.0f);
    TrainTarget(sentence[p], lr, rng, &loss);
    for (size_t c : context) {
      std::span<float> v = state->in(sentence[c]);
      for (size_t i = 0; i < dim; ++i) v[i] += h_grad[i] * inv;
    }
  }
  return loss;
}

SentenceLoss SentenceTrainer::SkipGram(std::span<const uint32_t> sentence,
                                       float lr, Rng &rng) {
  SentenceLoss loss;
  if (sentence.size() < 2) return loss;
  const size_t dim = h.size();
  for (size_t p = 0; p < sentence.size(); ++p) {
    int b = rng.UniformInt(1, config->window);
    ContextPositions(sentence.size(), p, b, &context);
    for (size_t c : context) {
      std::span<float> v = state->in(sentence[c]);
      std::copy(v.begin(), v.end(), h.begin());
      std::fill(h_grad.begin(), h_grad.end(), 0.0f);
      TrainTarget(sentence[p], lr, rng, &loss);
      for (size_t i = 0; i < dim; ++i) v[i] += h_grad[i];
    }
  }
  return loss;
}

void VectorTripleSource::ForEach(
    const std::function<void(const Triple &)> &fn) const {
  for (const Triple &t : triples_) fn(t);
}

void FileTripleSource::ForEach(
    const std::function<void(const Triple &)> &fn) const {
  TripleReader reader(path_);
  Triple t;
  while (reader.Next(&t)) fn(t);
}

EmbeddingModel Train(const TripleSource &source, const Vocabulary &vocab,
                     const TrainingConfig &config,
                     const EpochCallback &on_epoch) {
  config.Validate();
  if (vocab.empty()) throw std::invalid_argument("empty vocabulary");

  NoiseTable noise(vocab, config.noise_exponent);
  TrainingState state = InitModel(config, vocab.size());

  std::vector<float> keep;
  const bool subsample = config.subsample_t > 0 && vocab.has_counts();
  if (subsample) {
    keep.resize(vocab.size());
    for (size_t i = 0; i < vocab.size(); ++i) {
      keep[i] = static_cast<float>(KeepProbability(
          vocab.count(i), vocab.total_count(), config.subsample_t));
    }
  }

  uint64_t tokens_per_epoch = vocab.total_count();
  if (!vocab.has_counts()) {
    source.ForEach([&](const Triple &t) {
      auto tokens = SentenceOf(t);
      for (EntityId id : tokens) tokens_per_epoch += vocab.Contains(id);
    });
  }
  const double total_tokens =
      std::max<double>(1.0, static_cast<double>(tokens_per_epoch) *
                                config.epochs);

  std::atomic<uint64_t> processed{0};
  uint64_t trained_tokens = 0;
  const int workers = config.workers;

  std::vector<Rng> rngs;
  for (int w = 0; w < workers; ++w) {
    rngs.emplace_back(MixSeed(config.seed, 1 + w));
  }

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::vector<SentenceLoss> losses(workers);
    std::vector<uint64_t> used(workers, 0);
    std::vector<double> last_lr(workers, config.lr_initial);

    auto run = [&](int w) {
      SentenceTrainer trainer(config, noise, state);
      Rng &rng = rngs[w];
      std::vector<uint32_t> sentence;
      uint64_t k = 0;
      source.ForEach([&](const Triple &t) {
        if (k++ % workers != static_cast<uint64_t>(w)) return;
        auto tokens = SentenceOf(t);
        sentence.clear();
        EncodeSentence(vocab, tokens, &sentence);
        uint64_t done = processed.fetch_add(sentence.size(),
                                            std::memory_order_relaxed);
        if (subsample) {
          std::erase_if(sentence, [&](uint32_t i) {
            return keep[i] < 1.0f && rng.Uniform() >= keep[i];
          });
        }
        double lr = config.lr_initial - (config.lr_initial - config.lr_min) *
                                            (static_cast<double>(done) /
                                             total_tokens);
        lr = std::max(lr, config.lr_min);
        last_lr[w] = lr;
        if (sentence.size() < 2) return;
        used[w] += sentence.size();
        SentenceLoss l = config.algorithm == Algorithm::kCbow
                             ? trainer.Cbow(sentence, static_cast<float>(lr),
                                            rng)
                             : trainer.SkipGram(sentence,
                                                static_cast<float>(lr), rng);
        losses[w].loss += l.loss;
        losses[w].pairs += l.pairs;
      });
    };

    if (workers == 1) {
      run(0);
    } else {
      std::vector<std::thread> threads;
      for (int w = 0; w < workers; ++w) threads.emplace_back(run, w);
      for (auto &t : threads) t.join();
    }

    if (!AllFinite(state.input) || !AllFinite(state.output)) {
      throw TrainingError("non-finite value in model after epoch " +
                          std::to_string(epoch));
    }
    EpochReport report{epoch, 0.0, 0, *std::min_element(last_lr.begin(),
                                                        last_lr.end())};
    double loss = 0;
    for (int w = 0; w < workers; ++w) {
      loss += losses[w].loss;
      report.pairs += losses[w].pairs;
      trained_tokens += used[w];
    }
    report.mean_loss = report.pairs ? loss / report.pairs : 0.0;
    if (on_epoch) on_epoch(report);
  }

  EmbeddingModel model;
  model.vocab = vocab;
  model.dim = config.dim;
  model.vectors = std::move(state.input);
  model.config = config;
  model.trained_tokens = trained_tokens;
  return model;
}

}  // namespace wembed
