#ifndef LAHJA_CLASSIFY_HPP
#define LAHJA_CLASSIFY_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "lahja/binary_io.hpp"
#include "lahja/corpus.hpp"
#include "lahja/embedding.hpp"
#include "lahja/error.hpp"
#include "lahja/labels.hpp"
#include "lahja/lexicon.hpp"
#include "lahja/preprocess.hpp"

namespace lahja {

/// Token <-> feature index map for bag-of-words features.
class TokenIndex {
public:
  TokenIndex() = default;

  /// Every distinct token, indexed in lexicographic order.
  static TokenIndex build(std::span<const TokenSequence> docs) {
    std::set<std::string> all;
    for (const auto& d : docs) all.insert(d.begin(), d.end());
    TokenIndex ix;
    for (const auto& t : all) ix.add(t);
    return ix;
  }

  std::uint32_t add(const std::string& token) {
    auto [it, inserted] = index_.emplace(token, static_cast<std::uint32_t>(tokens_.size()));
    if (inserted) tokens_.push_back(token);
    return it->second;
  }

  std::optional<std::uint32_t> find(const std::string& token) const {
    auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t size() const noexcept { return tokens_.size(); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  bool operator==(const TokenIndex& o) const { return tokens_ == o.tokens_; }

private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

/// Sparse token counts; every stored count is >= 1.
using FeatureVector = std::map<std::uint32_t, std::uint32_t>;

inline FeatureVector featurize(const TokenSequence& tokens, const TokenIndex& vocabulary) {
  FeatureVector fv;
  for (const auto& t : tokens)
    if (auto i = vocabulary.find(t)) ++fv[*i];
  return fv;
}

template <class Label>
struct LabeledExample {
  FeatureVector features;
  Label label;
};

/// Multinomial naive Bayes with additive smoothing. Classes are kept in
/// canonical label order, which is also the tie-break order.
template <class Label>
struct NaiveBayesModel {
  std::vector<Label> classes;
  std::vector<double> log_priors;
  std::vector<std::vector<double>> log_likelihoods; // [class][token]
  double smoothing_alpha = 1.0;
  TokenIndex vocabulary;

  bool operator==(const NaiveBayesModel&) const = default;
};

template <class Label>
NaiveBayesModel<Label> nb_train(std::span<const LabeledExample<Label>> examples, TokenIndex vocabulary,
                                double alpha = 1.0, std::optional<std::vector<Label>> declared = std::nullopt) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("naive Bayes smoothing alpha must be > 0");
  std::set<Label> seen;
  for (const auto& ex : examples) seen.insert(ex.label);
  std::set<Label> classes = declared ? std::set<Label>(declared->begin(), declared->end()) : seen;
  if (classes.empty()) throw DataError("naive Bayes needs at least one training example");
  for (auto c : classes)
    if (!seen.contains(c)) throw DataError("declared class " + std::string(to_string(c)) + " has no training examples");
  for (auto c : seen)
    if (!classes.contains(c)) throw DataError("example labelled with undeclared class " + std::string(to_string(c)));

  NaiveBayesModel<Label> m;
  m.smoothing_alpha = alpha;
  m.classes.assign(classes.begin(), classes.end());
  const std::size_t V = vocabulary.size();
  std::vector<std::vector<double>> counts(m.classes.size(), std::vector<double>(V, 0.0));
  std::vector<double> docs(m.classes.size(), 0.0);
  auto slot = [&](Label l) {
    return static_cast<std::size_t>(std::lower_bound(m.classes.begin(), m.classes.end(), l) - m.classes.begin());
  };
  for (const auto& ex : examples) {
    auto c = slot(ex.label);
    docs[c] += 1.0;
    for (auto [t, n] : ex.features) {
      if (t >= V) throw DataError("feature index out of vocabulary range");
      counts[c][t] += n;
    }
  }
  const double total_docs = static_cast<double>(examples.size());
  for (std::size_t c = 0; c < m.classes.size(); ++c) {
    m.log_priors.push_back(std::log(docs[c] / total_docs));
    double mass = alpha * static_cast<double>(V);
    for (double x : counts[c]) mass += x;
    std::vector<double> ll(V);
    for (std::size_t t = 0; t < V; ++t) ll[t] = std::log((counts[c][t] + alpha) / mass);
    m.log_likelihoods.push_back(std::move(ll));
  }
  m.vocabulary = std::move(vocabulary);
  return m;
}

template <class Label>
struct NbPrediction {
  Label label;
  std::vector<double> log_scores; // aligned with model.classes
};

template <class Label>
NbPrediction<Label> nb_predict(const NaiveBayesModel<Label>& model, const FeatureVector& fv) {
  NbPrediction<Label> p{model.classes.front(), {}};
  std::size_t best = 0;
  for (std::size_t c = 0; c < model.classes.size(); ++c) {
    double s = model.log_priors[c];
    for (auto [t, n] : fv) s += static_cast<double>(n) * model.log_likelihoods[c][t];
    p.log_scores.push_back(s);
    if (s > p.log_scores[best]) best = c;
  }
  p.label = model.classes[best];
  return p;
}

template <class Label>
NbPrediction<Label> nb_predict(const NaiveBayesModel<Label>& model, const TokenSequence& tokens) {
  return nb_predict(model, featurize(tokens, model.vocabulary));
}

// ---------------------------------------------------------------------------
// Persistence: "LAHJNB01" | u32 label kind | f64 alpha | u64 |V| strings |
//              u32 |C| label strings | f64 priors | f64 likelihoods [C][V]

inline constexpr std::string_view kNaiveBayesMagic = "LAHJNB01";
inline constexpr std::string_view kPipelineMagic = "LAHJPL01";

template <class Label>
void write_nb(binary::Writer& w, const NaiveBayesModel<Label>& m) {
  w.bytes(kNaiveBayesMagic);
  w.u32(LabelTraits<Label>::kind);
  w.f64(m.smoothing_alpha);
  w.u64(m.vocabulary.size());
  for (const auto& t : m.vocabulary.tokens()) w.str(t);
  w.u32(static_cast<std::uint32_t>(m.classes.size()));
  for (auto c : m.classes) w.str(to_string(c));
  for (double x : m.log_priors) w.f64(x);
  for (const auto& row : m.log_likelihoods)
    for (double x : row) w.f64(x);
}

template <class Label>
NaiveBayesModel<Label> read_nb(binary::Reader& r) {
  detail::check_magic(r, kNaiveBayesMagic, "naive Bayes model");
  if (r.u32() != LabelTraits<Label>::kind) throw FormatError("naive Bayes model has the wrong label kind");
  NaiveBayesModel<Label> m;
  m.smoothing_alpha = r.f64();
  const auto V = r.u64();
  for (std::uint64_t i = 0; i < V; ++i) m.vocabulary.add(r.str());
  if (m.vocabulary.size() != V) throw FormatError("duplicate token in naive Bayes vocabulary");
  const auto C = r.u32();
  for (std::uint32_t c = 0; c < C; ++c) {
    try {
      m.classes.push_back(LabelTraits<Label>::parse(r.str()));
    } catch (const LabelError& e) {
      throw FormatError(std::string("naive Bayes model: ") + e.what());
    }
  }
  r.need(static_cast<std::size_t>(C) * 8 * (1 + V));
  for (std::uint32_t c = 0; c < C; ++c) m.log_priors.push_back(r.f64());
  m.log_likelihoods.assign(C, std::vector<double>(V));
  for (auto& row : m.log_likelihoods)
    for (auto& x : row) x = r.f64();
  return m;
}

template <class Label>
void save_nb(const NaiveBayesModel<Label>& m, const std::string& path) {
  binary::Writer w;
  write_nb(w, m);
  w.save(path);
}

template <class Label>
NaiveBayesModel<Label> load_nb(const std::string& path) {
  auto r = binary::Reader::from_file(path);
  auto m = read_nb<Label>(r);
  if (!r.at_end()) throw FormatError("trailing bytes after naive Bayes model");
  return m;
}

// ---------------------------------------------------------------------------
// Dialect-aware pipeline: dialect first, then the emotion model of that dialect.

struct ClassifierConfig {
  double alpha = 1.0;
  std::size_t min_per_class = 2;
};

/// Seed plus reviewed dialect lexicons, used to derive silver emotion labels.
struct SilverLabelSource {
  SeedLexicon seed;
  std::map<DialectLabel, DialectLexicon> lexicons;
};

struct DialectAwarePipeline {
  NormalizationConfig normalization;
  TokenizeMode tokenize_mode = TokenizeMode::whitespace;
  NaiveBayesModel<DialectLabel> dialect_model;
  std::map<DialectLabel, NaiveBayesModel<EmotionLabel>> emotion_models;
  NaiveBayesModel<EmotionLabel> general_emotion_model;

  Preprocessor preprocessor() const { return Preprocessor(normalization, tokenize_mode); }
  bool operator==(const DialectAwarePipeline&) const = default;
};

struct TrainingSummary {
  std::size_t documents = 0;
  std::size_t gold_emotion = 0;
  std::size_t silver_emotion = 0;
  std::size_t excluded_from_emotion = 0;
};

/// Trains from documents whose tokens were already produced by `pre`.
inline DialectAwarePipeline train_pipeline(const Corpus& train, std::span<const TokenSequence> tokens,
                                           const Preprocessor& pre, const ClassifierConfig& cfg = {},
                                           const SilverLabelSource* silver = nullptr,
                                           TrainingSummary* summary = nullptr, Warnings* warnings = nullptr) {
  if (tokens.size() != train.size()) throw DataError("token sequences do not align with documents");
  if (train.empty()) throw DataError("training corpus is empty");
  for (const auto& d : train.documents)
    if (!d.dialect) throw DataError("training document " + d.id + " has no dialect label");

  DialectAwarePipeline p;
  p.normalization = pre.config();
  p.tokenize_mode = pre.mode();
  auto vocab = TokenIndex::build(tokens);

  std::optional<LexiconLabeler> labeler;
  if (silver != nullptr) labeler.emplace(silver->seed, silver->lexicons);

  TrainingSummary sum;
  sum.documents = train.size();
  std::vector<LabeledExample<DialectLabel>> dialect_examples;
  std::map<DialectLabel, std::vector<LabeledExample<EmotionLabel>>> by_dialect;
  std::vector<LabeledExample<EmotionLabel>> pooled;
  for (std::size_t i = 0; i < train.size(); ++i) {
    const auto& doc = train.documents[i];
    auto fv = featurize(tokens[i], vocab);
    dialect_examples.push_back({fv, *doc.dialect});
    std::optional<EmotionLabel> emotion = doc.emotion;
    if (emotion) {
      ++sum.gold_emotion;
    } else if (labeler) {
      emotion = (*labeler)(tokens[i], *doc.dialect);
      if (emotion) ++sum.silver_emotion;
    }
    if (!emotion) {
      ++sum.excluded_from_emotion;
      continue;
    }
    by_dialect[*doc.dialect].push_back({fv, *emotion});
    pooled.push_back({std::move(fv), *emotion});
  }
  if (pooled.empty()) throw DataError("no emotion-labelled training documents (gold or lexicon-derived)");

  p.dialect_model = nb_train<DialectLabel>(dialect_examples, vocab, cfg.alpha);
  p.general_emotion_model = nb_train<EmotionLabel>(pooled, vocab, cfg.alpha);
  for (auto& [dialect, examples] : by_dialect) {
    std::map<EmotionLabel, std::size_t> per_class;
    for (const auto& ex : examples) ++per_class[ex.label];
    std::vector<LabeledExample<EmotionLabel>> kept;
    for (auto& ex : examples)
      if (per_class[ex.label] >= cfg.min_per_class) kept.push_back(std::move(ex));
    if (kept.empty()) {
      warn(warnings, "no emotion class reaches min_per_class for dialect " + std::string(to_string(dialect)) +
                         "; it will use the general model");
      continue;
    }
    p.emotion_models.emplace(dialect, nb_train<EmotionLabel>(kept, vocab, cfg.alpha));
  }
  if (summary != nullptr) *summary = sum;
  return p;
}

inline DialectAwarePipeline train_pipeline(const Corpus& train, const Preprocessor& pre = {},
                                           const ClassifierConfig& cfg = {}, const SilverLabelSource* silver = nullptr,
                                           TrainingSummary* summary = nullptr, Warnings* warnings = nullptr) {
  auto tokens = pre(train);
  return train_pipeline(train, tokens, pre, cfg, silver, summary, warnings);
}

struct RoutingDiagnostics {
  bool fallback = false;               // general model used
  std::optional<DialectLabel> routed_to; // per-dialect model consulted, if any
  std::vector<double> dialect_scores;
  std::vector<double> emotion_scores;
};

struct PipelinePrediction {
  DialectLabel dialect;
  EmotionLabel emotion;
  RoutingDiagnostics diagnostics;
};

inline PipelinePrediction predict_pipeline(const DialectAwarePipeline& p, const TokenSequence& tokens) {
  auto fv = featurize(tokens, p.dialect_model.vocabulary);
  auto d = nb_predict(p.dialect_model, fv);
  PipelinePrediction out{d.label, EmotionLabel::anger, {}};
  out.diagnostics.dialect_scores = std::move(d.log_scores);
  auto it = p.emotion_models.find(d.label);
  const auto& model = it != p.emotion_models.end() ? it->second : p.general_emotion_model;
  out.diagnostics.fallback = it == p.emotion_models.end();
  if (!out.diagnostics.fallback) out.diagnostics.routed_to = d.label;
  auto e = nb_predict(model, featurize(tokens, model.vocabulary));
  out.emotion = e.label;
  out.diagnostics.emotion_scores = std::move(e.log_scores);
  return out;
}

inline PipelinePrediction predict_text(const DialectAwarePipeline& p, std::string_view text) {
  return predict_pipeline(p, p.preprocessor()(text));
}

namespace detail {

inline void write_pipeline(binary::Writer& w, const DialectAwarePipeline& p) {
  w.bytes(kPipelineMagic);
  w.u32(p.normalization.strip_diacritics);
  w.u32(p.normalization.strip_tatweel);
  w.u32(p.normalization.fold_alef_variants);
  w.u32(p.normalization.collapse_elongation);
  w.u32(p.tokenize_mode == TokenizeMode::segmented);
  write_nb(w, p.dialect_model);
  write_nb(w, p.general_emotion_model);
  w.u32(static_cast<std::uint32_t>(p.emotion_models.size()));
  for (const auto& [d, m] : p.emotion_models) {
    w.str(to_string(d));
    write_nb(w, m);
  }
}

} // namespace detail

inline void save_pipeline(const DialectAwarePipeline& p, const std::string& path) {
  binary::Writer w;
  detail::write_pipeline(w, p);
  w.save(path);
}

inline DialectAwarePipeline deserialize_pipeline(std::string bytes) {
  binary::Reader r(std::move(bytes));
  detail::check_magic(r, kPipelineMagic, "pipeline");
  DialectAwarePipeline p;
  p.normalization.strip_diacritics = r.u32() != 0;
  p.normalization.strip_tatweel = r.u32() != 0;
  p.normalization.fold_alef_variants = r.u32() != 0;
  p.normalization.collapse_elongation = r.u32() != 0;
  p.tokenize_mode = r.u32() != 0 ? TokenizeMode::segmented : TokenizeMode::whitespace;
  p.dialect_model = read_nb<DialectLabel>(r);
  p.general_emotion_model = read_nb<EmotionLabel>(r);
  const auto n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    auto code = r.str();
    auto d = try_parse_dialect(code);
    if (!d) throw FormatError("pipeline: unknown dialect key " + code);
    p.emotion_models.emplace(*d, read_nb<EmotionLabel>(r));
  }
  if (!r.at_end()) throw FormatError("trailing bytes after pipeline");
  return p;
}

inline DialectAwarePipeline load_pipeline(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open pipeline: " + path);
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_pipeline(std::move(data));
}

} // namespace lahja

#endif
