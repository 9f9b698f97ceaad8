#ifndef LAHJA_EMBEDDING_HPP
#define LAHJA_EMBEDDING_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <vector>

#include "lahja/binary_io.hpp"
#include "lahja/error.hpp"
#include "lahja/preprocess.hpp"
#include "lahja/random.hpp"
#include "lahja/utf8.hpp"

namespace lahja {

using Vector = std::vector<double>;

struct EmbeddingConfig {
  std::uint32_t min_count = 2;
  double learning_rate = 0.08;
  std::uint32_t word_ngrams = 1;
  std::uint32_t window_size = 6;
  std::uint32_t epochs = 10;
  std::uint32_t dimension = 100;
  std::uint32_t negative_samples = 5;
  std::uint32_t char_ngram_min = 3;
  std::uint32_t char_ngram_max = 6; // 0 disables subword n-grams
  std::uint32_t bucket_count = 100000;
  std::uint64_t seed = 0;

  bool subwords_enabled() const noexcept { return char_ngram_max > 0; }

  void validate() const {
    if (min_count < 1) throw ConfigError("min_count must be >= 1");
    if (dimension < 1) throw ConfigError("dimension must be >= 1");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning_rate must be > 0");
    if (word_ngrams != 1) throw ConfigError("only word_ngrams = 1 is supported");
    if (window_size < 1) throw ConfigError("window_size must be >= 1");
    if (bucket_count < 1) throw ConfigError("bucket_count must be >= 1");
    if (subwords_enabled() && (char_ngram_min < 1 || char_ngram_min > char_ngram_max))
      throw ConfigError("require 1 <= char_ngram_min <= char_ngram_max");
  }

  bool operator==(const EmbeddingConfig&) const = default;
};

/// Word <-> index bijection, indices in descending frequency order.
class Vocabulary {
public:
  Vocabulary() = default;

  void add(std::string word, std::uint64_t frequency) {
    index_.emplace(word, words_.size());
    words_.push_back(std::move(word));
    freqs_.push_back(frequency);
  }

  std::size_t size() const noexcept { return words_.size(); }
  bool empty() const noexcept { return words_.empty(); }
  const std::string& word(std::size_t i) const { return words_.at(i); }
  std::uint64_t frequency(std::size_t i) const { return freqs_.at(i); }
  const std::vector<std::string>& words() const noexcept { return words_; }

  std::optional<std::size_t> find(std::string_view w) const {
    auto it = index_.find(std::string(w));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  bool contains(std::string_view w) const { return find(w).has_value(); }

  bool operator==(const Vocabulary& o) const { return words_ == o.words_ && freqs_ == o.freqs_; }

private:
  std::vector<std::string> words_;
  std::vector<std::uint64_t> freqs_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline Vocabulary build_vocab(std::span<const TokenSequence> sentences, const EmbeddingConfig& cfg) {
  if (sentences.empty()) throw DataError("cannot build a vocabulary from an empty token stream");
  std::unordered_map<std::string, std::uint64_t> counts;
  for (const auto& s : sentences)
    for (const auto& t : s) ++counts[t];
  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (auto& [w, c] : counts)
    if (c >= cfg.min_count) kept.emplace_back(w, c);
  if (kept.empty())
    throw DataError("empty vocabulary: no word reaches min_count = " + std::to_string(cfg.min_count));
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  Vocabulary vocab;
  for (auto& [w, c] : kept) vocab.add(std::move(w), c);
  return vocab;
}

/// Character n-grams of "<word>", grouped by length (shortest first) and
/// left to right within a length; the whole wrapped word is appended last
/// unless already produced.
inline std::vector<std::string> char_ngrams(std::string_view word, std::uint32_t min_n, std::uint32_t max_n) {
  std::vector<std::string> out;
  if (max_n == 0) return out;
  std::u32string wrapped = U"<" + utf8::decode(word) + U">";
  std::u32string_view view(wrapped);
  bool has_whole = false;
  for (std::size_t n = min_n; n <= max_n && n <= wrapped.size(); ++n) {
    for (std::size_t i = 0; i + n <= wrapped.size(); ++i) {
      out.push_back(utf8::encode(view.substr(i, n)));
      has_whole = has_whole || n == wrapped.size();
    }
  }
  if (!has_whole) out.push_back(utf8::encode(view));
  return out;
}

inline std::vector<std::string> char_ngrams(std::string_view word, const EmbeddingConfig& cfg) {
  return char_ngrams(word, cfg.char_ngram_min, cfg.char_ngram_max);
}

/// 32-bit FNV-1a over the UTF-8 bytes, reduced modulo bucket_count.
inline std::uint32_t hash_ngram(std::string_view ngram, std::uint32_t bucket_count) {
  std::uint32_t h = 2166136261u;
  for (unsigned char c : ngram) {
    h ^= c;
    h *= 16777619u;
  }
  return h % bucket_count;
}

/// Dense row-major float matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0f) {}

  std::span<float> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const float> row(std::size_t i) const { return {data.data() + i * cols, cols}; }

  bool operator==(const Matrix&) const = default;
};

struct SubwordEmbeddingModel {
  EmbeddingConfig config;
  Vocabulary vocab;
  Matrix word_vectors;    // |V| x d
  Matrix ngram_vectors;   // bucket_count x d
  Matrix context_vectors; // |V| x d

  std::size_t dimension() const noexcept { return config.dimension; }

  std::vector<std::uint32_t> ngram_buckets(std::string_view word) const {
    std::vector<std::uint32_t> ids;
    for (const auto& g : char_ngrams(word, config)) ids.push_back(hash_ngram(g, config.bucket_count));
    return ids;
  }

  bool operator==(const SubwordEmbeddingModel& o) const {
    return config == o.config && vocab == o.vocab && word_vectors == o.word_vectors &&
           ngram_vectors == o.ngram_vectors && context_vectors == o.context_vectors;
  }
};

/// Model with hand-set composed vectors; used for fixtures and imports.
/// Subwords are disabled so vector_of returns exactly the given vectors.
inline SubwordEmbeddingModel model_from_vectors(const std::vector<std::string>& words,
                                                const std::vector<Vector>& vectors) {
  if (words.empty() || words.size() != vectors.size()) throw DataError("words and vectors must be non-empty and aligned");
  SubwordEmbeddingModel m;
  m.config.dimension = static_cast<std::uint32_t>(vectors.front().size());
  m.config.char_ngram_max = 0;
  m.config.char_ngram_min = 0;
  m.config.bucket_count = 1;
  m.config.min_count = 1;
  m.config.validate();
  for (const auto& w : words) m.vocab.add(w, 1);
  m.word_vectors = Matrix(words.size(), m.config.dimension);
  m.ngram_vectors = Matrix(1, m.config.dimension);
  m.context_vectors = Matrix(words.size(), m.config.dimension);
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (vectors[i].size() != m.config.dimension) throw DataError("vector dimensions differ");
    for (std::size_t k = 0; k < m.config.dimension; ++k) m.word_vectors.row(i)[k] = static_cast<float>(vectors[i][k]);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Negative-sampling objective.

namespace detail {

template <std::floating_point T>
T softplus(T x) {
  return std::max(x, T(0)) + std::log1p(std::exp(-std::abs(x)));
}

template <std::floating_point T>
T sigmoid(T x) {
  if (x >= 0) return T(1) / (T(1) + std::exp(-x));
  T e = std::exp(x);
  return e / (T(1) + e);
}

} // namespace detail

/// One binary-logistic term of the skip-gram loss:
/// -log sigma(u.h) for the observed context, -log sigma(-u.h) for a negative.
/// Adds dL/dh into d_hidden and writes dL/du into d_output. Returns the loss.
template <std::floating_point T>
T logistic_term(std::span<const T> hidden, std::span<const T> output, bool positive, std::span<T> d_hidden,
                std::span<T> d_output) {
  T score = 0;
  for (std::size_t k = 0; k < hidden.size(); ++k) score += hidden[k] * output[k];
  T loss = positive ? detail::softplus(-score) : detail::softplus(score);
  T g = detail::sigmoid(score) - (positive ? T(1) : T(0));
  for (std::size_t k = 0; k < hidden.size(); ++k) {
    d_hidden[k] += g * output[k];
    d_output[k] = g * hidden[k];
  }
  return loss;
}

template <std::floating_point T>
struct SgnsGradient {
  T loss = 0;
  std::vector<T> d_hidden;
  std::vector<std::vector<T>> d_outputs; // [0] is the observed context
};

/// Loss and gradients of one (target, context, negatives) step with respect
/// to the hidden vector and every output vector. outputs[0] is the context.
template <std::floating_point T>
SgnsGradient<T> sgns_gradient(std::span<const T> hidden, std::span<const std::vector<T>> outputs) {
  SgnsGradient<T> g;
  g.d_hidden.assign(hidden.size(), T(0));
  for (std::size_t j = 0; j < outputs.size(); ++j) {
    std::vector<T> d_out(hidden.size());
    g.loss += logistic_term<T>(hidden, outputs[j], j == 0, g.d_hidden, d_out);
    g.d_outputs.push_back(std::move(d_out));
  }
  return g;
}

/// Mean of the input rows (word row plus n-gram rows); the hidden vector.
template <std::floating_point T>
std::vector<T> compose_mean(std::span<const std::vector<T>> rows) {
  std::vector<T> h(rows.front().size(), T(0));
  for (const auto& r : rows)
    for (std::size_t k = 0; k < h.size(); ++k) h[k] += r[k];
  for (auto& x : h) x /= static_cast<T>(rows.size());
  return h;
}

/// Gradient reaching each input row through the mean composition.
template <std::floating_point T>
std::vector<T> input_row_gradient(std::span<const T> d_hidden, std::size_t row_count) {
  std::vector<T> g(d_hidden.begin(), d_hidden.end());
  for (auto& x : g) x /= static_cast<T>(row_count);
  return g;
}

// ---------------------------------------------------------------------------
// Training.

struct TrainOptions {
  unsigned threads = 1; // > 1 enables lock-free parallel updates (non-deterministic)
};

struct TrainStats {
  std::vector<double> epoch_mean_loss;
  std::uint64_t pairs_per_epoch = 0;
};

namespace detail {

class NegativeSampler {
public:
  explicit NegativeSampler(const Vocabulary& vocab) {
    double acc = 0.0;
    for (std::size_t i = 0; i < vocab.size(); ++i) {
      acc += std::pow(static_cast<double>(vocab.frequency(i)), 0.75);
      cumulative_.push_back(acc);
    }
  }

  std::size_t draw(Rng& rng) const {
    double x = rng.uniform() * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), x);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
  }

private:
  std::vector<double> cumulative_;
};

struct TrainState {
  SubwordEmbeddingModel& model;
  std::vector<std::vector<std::uint32_t>> buckets; // per vocab word
  NegativeSampler sampler;
  std::uint64_t total_steps;
  std::atomic<std::uint64_t> step{0};
};

struct Workspace {
  std::vector<float> hidden, d_hidden, d_output;
  explicit Workspace(std::size_t d) : hidden(d), d_hidden(d), d_output(d) {}
};

inline double train_pair(TrainState& st, Workspace& ws, Rng& rng, std::size_t target, std::size_t context, float lr) {
  auto& m = st.model;
  const std::size_t d = m.dimension();
  const auto& bk = st.buckets[target];
  const float rows = static_cast<float>(1 + bk.size());

  std::fill(ws.hidden.begin(), ws.hidden.end(), 0.0f);
  auto wrow = m.word_vectors.row(target);
  for (std::size_t k = 0; k < d; ++k) ws.hidden[k] += wrow[k];
  for (auto b : bk) {
    auto nrow = m.ngram_vectors.row(b);
    for (std::size_t k = 0; k < d; ++k) ws.hidden[k] += nrow[k];
  }
  for (auto& x : ws.hidden) x /= rows;
  std::fill(ws.d_hidden.begin(), ws.d_hidden.end(), 0.0f);

  auto apply = [&](std::size_t out, bool positive) {
    auto u = m.context_vectors.row(out);
    double loss = logistic_term<float>(ws.hidden, u, positive, ws.d_hidden, ws.d_output);
    for (std::size_t k = 0; k < d; ++k) u[k] -= lr * ws.d_output[k];
    return loss;
  };

  double loss = apply(context, true);
  if (m.vocab.size() > 1) {
    for (std::uint32_t n = 0; n < m.config.negative_samples; ++n) {
      std::size_t neg = st.sampler.draw(rng);
      for (int tries = 0; neg == context && tries < 16; ++tries) neg = st.sampler.draw(rng);
      if (neg == context) continue;
      loss += apply(neg, false);
    }
  }

  const float scale = lr / rows;
  for (std::size_t k = 0; k < d; ++k) wrow[k] -= scale * ws.d_hidden[k];
  for (auto b : bk) {
    auto nrow = m.ngram_vectors.row(b);
    for (std::size_t k = 0; k < d; ++k) nrow[k] -= scale * ws.d_hidden[k];
  }
  return loss;
}

inline double train_sentences(TrainState& st, std::span<const std::vector<std::size_t>> sentences, Rng& rng) {
  Workspace ws(st.model.dimension());
  const std::size_t window = st.model.config.window_size;
  const double lr0 = st.model.config.learning_rate;
  double loss = 0.0;
  for (const auto& ids : sentences) {
    for (std::size_t t = 0; t < ids.size(); ++t) {
      std::size_t lo = t >= window ? t - window : 0;
      std::size_t hi = std::min(ids.size() - 1, t + window);
      for (std::size_t c = lo; c <= hi; ++c) {
        if (c == t) continue;
        auto step = st.step.fetch_add(1, std::memory_order_relaxed);
        double progress = static_cast<double>(step) / static_cast<double>(st.total_steps);
        auto lr = static_cast<float>(lr0 * std::max(0.0, 1.0 - progress));
        loss += train_pair(st, ws, rng, ids[t], ids[c], lr);
      }
    }
  }
  return loss;
}

} // namespace detail

/// Seeded initial model: word and n-gram rows uniform in [-0.5/d, 0.5/d],
/// context rows zero.
inline SubwordEmbeddingModel init_model(Vocabulary vocab, const EmbeddingConfig& cfg) {
  cfg.validate();
  SubwordEmbeddingModel m;
  m.config = cfg;
  m.vocab = std::move(vocab);
  const std::size_t d = cfg.dimension;
  m.word_vectors = Matrix(m.vocab.size(), d);
  m.ngram_vectors = Matrix(cfg.bucket_count, d);
  m.context_vectors = Matrix(m.vocab.size(), d);
  Rng rng(cfg.seed);
  const double bound = 0.5 / static_cast<double>(d);
  for (auto& x : m.word_vectors.data) x = static_cast<float>(rng.uniform(-bound, bound));
  for (auto& x : m.ngram_vectors.data) x = static_cast<float>(rng.uniform(-bound, bound));
  return m;
}

/// Skip-gram with negative sampling over subword-composed target vectors.
/// Single-threaded training is bit-reproducible for a given seed.
inline SubwordEmbeddingModel train_skipgram(std::span<const TokenSequence> sentences, const EmbeddingConfig& cfg,
                                            TrainStats* stats = nullptr, TrainOptions opts = {}) {
  cfg.validate();
  auto model = init_model(build_vocab(sentences, cfg), cfg);

  std::vector<std::vector<std::size_t>> ids;
  std::uint64_t pairs = 0;
  const std::uint64_t window = cfg.window_size;
  for (const auto& s : sentences) {
    std::vector<std::size_t> row;
    for (const auto& t : s)
      if (auto i = model.vocab.find(t)) row.push_back(*i);
    const std::uint64_t n = row.size();
    for (std::uint64_t t = 0; t < n; ++t) pairs += std::min(t, window) + std::min(n - 1 - t, window);
    if (row.size() > 1) ids.push_back(std::move(row));
  }

  detail::TrainState st{model, {}, detail::NegativeSampler(model.vocab),
                        std::max<std::uint64_t>(1, pairs * cfg.epochs)};
  st.buckets.reserve(model.vocab.size());
  for (const auto& w : model.vocab.words()) st.buckets.push_back(model.ngram_buckets(w));

  if (stats != nullptr) {
    stats->pairs_per_epoch = pairs;
    stats->epoch_mean_loss.clear();
  }
  Rng rng(cfg.seed ^ 0x9E3779B97F4A7C15ull);
  const unsigned threads = std::max(1u, opts.threads);

  for (std::uint32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    double loss = 0.0;
    if (threads == 1 || ids.size() < threads) {
      loss = detail::train_sentences(st, ids, rng);
    } else {
      std::vector<double> partial(threads, 0.0);
      std::vector<std::thread> pool;
      const std::size_t chunk = (ids.size() + threads - 1) / threads;
      for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
          std::size_t lo = std::min(ids.size(), t * chunk), hi = std::min(ids.size(), lo + chunk);
          Rng local(cfg.seed + 0x1000 * (epoch + 1) + t);
          partial[t] = detail::train_sentences(st, std::span(ids).subspan(lo, hi - lo), local);
        });
      }
      for (auto& th : pool) th.join();
      for (double p : partial) loss += p;
    }
    if (stats != nullptr) stats->epoch_mean_loss.push_back(pairs > 0 ? loss / static_cast<double>(pairs) : 0.0);
  }
  return model;
}

// ---------------------------------------------------------------------------
// Queries.

/// In-vocabulary: (word row + sum of n-gram rows) / (1 + #ngrams).
/// Out-of-vocabulary: mean of the n-gram rows (zero if subwords are disabled).
inline Vector vector_of(const SubwordEmbeddingModel& model, std::string_view word) {
  const std::size_t d = model.dimension();
  Vector v(d, 0.0);
  std::size_t rows = 0;
  if (auto i = model.vocab.find(word)) {
    auto r = model.word_vectors.row(*i);
    for (std::size_t k = 0; k < d; ++k) v[k] += r[k];
    ++rows;
  }
  for (auto b : model.ngram_buckets(word)) {
    auto r = model.ngram_vectors.row(b);
    for (std::size_t k = 0; k < d; ++k) v[k] += r[k];
    ++rows;
  }
  if (rows > 0)
    for (auto& x : v) x /= static_cast<double>(rows);
  return v;
}

inline double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) dot += a[k] * b[k];
  double na = norm(a), nb = norm(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (na * nb);
}

struct CentroidResult {
  Vector vector;
  std::vector<std::string> used;
  std::vector<std::string> skipped; // out of vocabulary
};

inline CentroidResult centroid(const SubwordEmbeddingModel& model, const std::set<std::string>& words) {
  CentroidResult out;
  out.vector.assign(model.dimension(), 0.0);
  for (const auto& w : words) {
    if (!model.vocab.contains(w)) {
      out.skipped.push_back(w);
      continue;
    }
    auto v = vector_of(model, w);
    for (std::size_t k = 0; k < v.size(); ++k) out.vector[k] += v[k];
    out.used.push_back(w);
  }
  if (out.used.empty()) {
    std::string list;
    for (const auto& w : out.skipped) list += (list.empty() ? "" : ", ") + w;
    throw DataError("no word in vocabulary for centroid: " + list);
  }
  for (auto& x : out.vector) x /= static_cast<double>(out.used.size());
  return out;
}

struct Neighbor {
  std::string word;
  double similarity;
  bool operator==(const Neighbor&) const = default;
};

/// Composed vectors for the whole vocabulary, cached for repeated queries.
class EmbeddingIndex {
public:
  explicit EmbeddingIndex(const SubwordEmbeddingModel& model) : model_(&model) {
    vectors_.reserve(model.vocab.size());
    for (const auto& w : model.vocab.words()) vectors_.push_back(vector_of(model, w));
  }

  const SubwordEmbeddingModel& model() const noexcept { return *model_; }
  const std::vector<Vector>& vectors() const noexcept { return vectors_; }
  const Vector& vector(std::size_t i) const { return vectors_.at(i); }

  /// Highest-cosine words outside `exclude`, descending; ties by word.
  std::vector<Neighbor> top_n(std::span<const double> query, std::size_t n,
                              const std::set<std::string>& exclude = {}) const {
    if (norm(query) == 0.0) throw DataError("nearest-neighbour query has zero norm");
    std::vector<Neighbor> all;
    if (n == 0) return all;
    const auto& words = model_->vocab.words();
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (exclude.contains(words[i])) continue;
      all.push_back({words[i], cosine_similarity(query, vectors_[i])});
    }
    auto better = [](const Neighbor& a, const Neighbor& b) {
      return a.similarity != b.similarity ? a.similarity > b.similarity : a.word < b.word;
    };
    const std::size_t k = std::min(n, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), better);
    all.resize(k);
    return all;
  }

private:
  const SubwordEmbeddingModel* model_;
  std::vector<Vector> vectors_;
};

inline std::vector<Neighbor> top_n_nearest(const SubwordEmbeddingModel& model, std::span<const double> query,
                                           std::size_t n, const std::set<std::string>& exclude = {}) {
  return EmbeddingIndex(model).top_n(query, n, exclude);
}

// ---------------------------------------------------------------------------
// Persistence. Binary layout (little-endian):
//   "LAHJEMB1" | config | u64 |V| {u32 len, bytes, u64 freq}* | f32 word | f32 ngram | f32 context

inline constexpr std::string_view kEmbeddingMagic = "LAHJEMB1";

namespace detail {

inline void write_config(binary::Writer& w, const EmbeddingConfig& c) {
  w.u32(c.min_count);
  w.f64(c.learning_rate);
  w.u32(c.word_ngrams);
  w.u32(c.window_size);
  w.u32(c.epochs);
  w.u32(c.dimension);
  w.u32(c.negative_samples);
  w.u32(c.char_ngram_min);
  w.u32(c.char_ngram_max);
  w.u32(c.bucket_count);
  w.u64(c.seed);
}

inline EmbeddingConfig read_config(binary::Reader& r) {
  EmbeddingConfig c;
  c.min_count = r.u32();
  c.learning_rate = r.f64();
  c.word_ngrams = r.u32();
  c.window_size = r.u32();
  c.epochs = r.u32();
  c.dimension = r.u32();
  c.negative_samples = r.u32();
  c.char_ngram_min = r.u32();
  c.char_ngram_max = r.u32();
  c.bucket_count = r.u32();
  c.seed = r.u64();
  return c;
}

inline void check_magic(binary::Reader& r, std::string_view magic, std::string_view what) {
  auto head = r.bytes(magic.size());
  const auto stem = magic.substr(0, magic.size() - 1);
  if (head.substr(0, stem.size()) == stem && head != magic)
    throw FormatError(std::string(what) + " version mismatch: found \"" + std::string(head) + "\", expected \"" +
                      std::string(magic) + "\"");
  if (head != magic) throw FormatError(std::string("not a ") + std::string(what) + " file (bad magic header)");
}

inline void write_matrix(binary::Writer& w, const Matrix& m) {
  for (float x : m.data) w.f32(x);
}

inline Matrix read_matrix(binary::Reader& r, std::size_t rows, std::size_t cols) {
  r.need(rows * cols * 4);
  Matrix m(rows, cols);
  for (auto& x : m.data) x = r.f32();
  return m;
}

} // namespace detail

inline std::string serialize_embedding(const SubwordEmbeddingModel& model) {
  binary::Writer w;
  w.bytes(kEmbeddingMagic);
  detail::write_config(w, model.config);
  w.u64(model.vocab.size());
  for (std::size_t i = 0; i < model.vocab.size(); ++i) {
    w.str(model.vocab.word(i));
    w.u64(model.vocab.frequency(i));
  }
  detail::write_matrix(w, model.word_vectors);
  detail::write_matrix(w, model.ngram_vectors);
  detail::write_matrix(w, model.context_vectors);
  return w.data();
}

inline SubwordEmbeddingModel deserialize_embedding(std::string bytes) {
  binary::Reader r(std::move(bytes));
  detail::check_magic(r, kEmbeddingMagic, "embedding model");
  SubwordEmbeddingModel m;
  m.config = detail::read_config(r);
  try {
    m.config.validate();
  } catch (const ConfigError& e) {
    throw FormatError(std::string("corrupt embedding config: ") + e.what());
  }
  const auto n = r.u64();
  for (std::uint64_t i = 0; i < n; ++i) {
    auto w = r.str();
    auto f = r.u64();
    m.vocab.add(std::move(w), f);
  }
  const std::size_t d = m.config.dimension;
  m.word_vectors = detail::read_matrix(r, n, d);
  m.ngram_vectors = detail::read_matrix(r, m.config.bucket_count, d);
  m.context_vectors = detail::read_matrix(r, n, d);
  if (!r.at_end()) throw FormatError("trailing bytes after embedding model at offset " + std::to_string(r.offset()));
  return m;
}

inline void save_embedding(const SubwordEmbeddingModel& model, const std::string& path) {
  binary::Writer w;
  w.bytes(serialize_embedding(model));
  w.save(path);
}

inline SubwordEmbeddingModel load_embedding(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open embedding model: " + path);
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_embedding(std::move(data));
}

/// Content fingerprint of a model (FNV-1a 64 over its serialized bytes).
inline std::uint64_t model_fingerprint(const SubwordEmbeddingModel& model) {
  return binary::fnv1a64(serialize_embedding(model));
}

/// Read-only text export: "|V| d" then one line per word with its composed vector.
inline void export_text_vectors(const SubwordEmbeddingModel& model, std::ostream& out) {
  out << model.vocab.size() << ' ' << model.dimension() << '\n';
  char buf[32];
  for (const auto& w : model.vocab.words()) {
    out << w;
    for (double x : vector_of(model, w)) {
      std::snprintf(buf, sizeof buf, " %.6f", x);
      out << buf;
    }
    out << '\n';
  }
}

} // namespace lahja

#endif
