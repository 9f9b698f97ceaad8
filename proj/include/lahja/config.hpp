#ifndef LAHJA_CONFIG_HPP
#define LAHJA_CONFIG_HPP

#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "lahja/classify.hpp"
#include "lahja/cluster.hpp"
#include "lahja/corpus.hpp"
#include "lahja/embedding.hpp"
#include "lahja/error.hpp"
#include "lahja/lexicon.hpp"
#include "lahja/preprocess.hpp"

namespace lahja {

inline constexpr int kConfigVersion = 1;

/// Every tunable of a run, in one versioned JSON document. Omitted keys keep
/// the module defaults; unknown keys are rejected.
struct RunConfig {
  int config_version = kConfigVersion;
  std::uint64_t seed = 0;
  CorpusFormat format = CorpusFormat::tsv;
  NormalizationConfig normalization;
  TokenizeMode tokenize_mode = TokenizeMode::whitespace;
  EmbeddingConfig embedding;
  InductionConfig induction; // carries the DBSCAN settings
  ClassifierConfig classifier;
  SplitSpec split{0.8, 0.1, 0.1, 0, StratifyOn::dialect};

  /// Propagates the global seed into the per-module configs.
  void apply_seed(std::uint64_t s) {
    seed = s;
    embedding.seed = s;
    split.seed = s;
  }

  void validate() const {
    embedding.validate();
    induction.validate();
    split.validate();
    if (!(classifier.alpha > 0.0)) throw ConfigError("classifier alpha must be > 0");
  }
};

namespace detail {

using json = nlohmann::json;
using Setter = std::function<void(const json&)>;

template <class T>
Setter set_to(T& field) {
  return [&field](const json& v) {
    try {
      field = v.get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(std::string("bad config value: ") + e.what());
    }
  };
}

inline void apply_section(const json& obj, const std::string& name, const std::map<std::string, Setter>& setters) {
  if (!obj.is_object()) throw ConfigError("config section \"" + name + "\" must be an object");
  for (const auto& [key, value] : obj.items()) {
    auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown config key \"" + name + "." + key + "\"");
    it->second(value);
  }
}

template <class Fn>
Setter parse_with(Fn&& fn) {
  return [fn](const json& v) {
    if (!v.is_string()) throw ConfigError("expected a string value");
    fn(v.get<std::string>());
  };
}

} // namespace detail

inline RunConfig parse_run_config(const nlohmann::json& j, RunConfig cfg = {}) {
  using detail::set_to;
  auto& n = cfg.normalization;
  auto& e = cfg.embedding;
  auto& in = cfg.induction;
  auto& s = cfg.split;
  std::uint64_t seed = cfg.seed;

  std::map<std::string, detail::Setter> top = {
      {"config_version", set_to(cfg.config_version)},
      {"seed", set_to(seed)},
      {"format", detail::parse_with([&](const std::string& v) { cfg.format = parse_corpus_format(v); })},
      {"preprocess",
       [&](const nlohmann::json& v) {
         detail::apply_section(v, "preprocess",
                               {{"strip_diacritics", set_to(n.strip_diacritics)},
                                {"strip_tatweel", set_to(n.strip_tatweel)},
                                {"fold_alef_variants", set_to(n.fold_alef_variants)},
                                {"collapse_elongation", set_to(n.collapse_elongation)},
                                {"tokenize_mode", detail::parse_with([&](const std::string& m) {
                                   cfg.tokenize_mode = parse_tokenize_mode(m);
                                 })}});
       }},
      {"embedding",
       [&](const nlohmann::json& v) {
         detail::apply_section(v, "embedding",
                               {{"min_count", set_to(e.min_count)},
                                {"learning_rate", set_to(e.learning_rate)},
                                {"word_ngrams", set_to(e.word_ngrams)},
                                {"window_size", set_to(e.window_size)},
                                {"epochs", set_to(e.epochs)},
                                {"dimension", set_to(e.dimension)},
                                {"negative_samples", set_to(e.negative_samples)},
                                {"char_ngram_min", set_to(e.char_ngram_min)},
                                {"char_ngram_max", set_to(e.char_ngram_max)},
                                {"bucket_count", set_to(e.bucket_count)}});
       }},
      {"dbscan",
       [&](const nlohmann::json& v) {
         detail::apply_section(v, "dbscan",
                               {{"eps", set_to(in.dbscan.eps)}, {"min_samples", set_to(in.dbscan.min_samples)}});
       }},
      {"induction",
       [&](const nlohmann::json& v) {
         detail::apply_section(v, "induction",
                               {{"top_n", set_to(in.top_n)},
                                {"specificity_ratio", set_to(in.specificity_ratio)},
                                {"min_dialect_freq", set_to(in.min_dialect_freq)},
                                {"restrict_dbscan_to_neighborhood", set_to(in.restrict_dbscan_to_neighborhood)},
                                {"neighborhood_size", set_to(in.neighborhood_size)}});
       }},
      {"classifier",
       [&](const nlohmann::json& v) {
         detail::apply_section(v, "classifier",
                               {{"alpha", set_to(cfg.classifier.alpha)},
                                {"min_per_class", set_to(cfg.classifier.min_per_class)}});
       }},
      {"split",
       [&](const nlohmann::json& v) {
         detail::apply_section(v, "split",
                               {{"train", set_to(s.train_fraction)},
                                {"valid", set_to(s.valid_fraction)},
                                {"test", set_to(s.test_fraction)},
                                {"stratify_on", detail::parse_with([&](const std::string& m) {
                                   s.stratify_on = parse_stratify_on(m);
                                 })}});
       }},
  };
  detail::apply_section(j, "config", top);
  if (cfg.config_version != kConfigVersion)
    throw ConfigError("unsupported config_version " + std::to_string(cfg.config_version) + " (expected " +
                      std::to_string(kConfigVersion) + ")");
  cfg.apply_seed(seed);
  cfg.validate();
  return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open config: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_run_config(j);
}

inline nlohmann::ordered_json to_json(const RunConfig& c) {
  const auto& n = c.normalization;
  const auto& e = c.embedding;
  const auto& in = c.induction;
  nlohmann::ordered_json j;
  j["config_version"] = c.config_version;
  j["seed"] = c.seed;
  j["format"] = c.format == CorpusFormat::tsv ? "tsv" : "jsonl";
  j["preprocess"] = {{"strip_diacritics", n.strip_diacritics},
                     {"strip_tatweel", n.strip_tatweel},
                     {"fold_alef_variants", n.fold_alef_variants},
                     {"collapse_elongation", n.collapse_elongation},
                     {"tokenize_mode", std::string(to_string(c.tokenize_mode))}};
  j["embedding"] = {{"min_count", e.min_count},           {"learning_rate", e.learning_rate},
                    {"word_ngrams", e.word_ngrams},       {"window_size", e.window_size},
                    {"epochs", e.epochs},                 {"dimension", e.dimension},
                    {"negative_samples", e.negative_samples}, {"char_ngram_min", e.char_ngram_min},
                    {"char_ngram_max", e.char_ngram_max}, {"bucket_count", e.bucket_count}};
  j["dbscan"] = {{"eps", in.dbscan.eps}, {"min_samples", in.dbscan.min_samples}};
  j["induction"] = {{"top_n", in.top_n},
                    {"specificity_ratio", in.specificity_ratio},
                    {"min_dialect_freq", in.min_dialect_freq},
                    {"restrict_dbscan_to_neighborhood", in.restrict_dbscan_to_neighborhood},
                    {"neighborhood_size", in.neighborhood_size}};
  j["classifier"] = {{"alpha", c.classifier.alpha}, {"min_per_class", c.classifier.min_per_class}};
  j["split"] = {{"train", c.split.train_fraction},
                {"valid", c.split.valid_fraction},
                {"test", c.split.test_fraction},
                {"stratify_on", std::string(to_string(c.split.stratify_on))}};
  return j;
}

} // namespace lahja

#endif
