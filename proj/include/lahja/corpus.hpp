#ifndef LAHJA_CORPUS_HPP
#define LAHJA_CORPUS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "lahja/error.hpp"
#include "lahja/labels.hpp"
#include "lahja/random.hpp"

namespace lahja {

struct Document {
  std::string id;
  std::string text;
  std::optional<DialectLabel> dialect;
  std::optional<EmotionLabel> emotion;
  std::optional<std::string> source;

  bool operator==(const Document&) const = default;
};

/// Documents in file order. Immutable once loaded.
struct Corpus {
  std::vector<Document> documents;
  std::string provenance;

  std::size_t size() const noexcept { return documents.size(); }
  bool empty() const noexcept { return documents.empty(); }
  bool operator==(const Corpus&) const = default;
};

enum class CorpusFormat { tsv, jsonl };
enum class StratifyOn { none, dialect, emotion };

inline CorpusFormat parse_corpus_format(std::string_view s) {
  if (s == "tsv") return CorpusFormat::tsv;
  if (s == "jsonl") return CorpusFormat::jsonl;
  throw ConfigError("unknown corpus format: " + std::string(s));
}

inline StratifyOn parse_stratify_on(std::string_view s) {
  if (s == "none") return StratifyOn::none;
  if (s == "dialect") return StratifyOn::dialect;
  if (s == "emotion") return StratifyOn::emotion;
  throw ConfigError("unknown stratification target: " + std::string(s));
}

inline std::string_view to_string(StratifyOn s) {
  switch (s) {
  case StratifyOn::dialect: return "dialect";
  case StratifyOn::emotion: return "emotion";
  default: return "none";
  }
}

struct SplitSpec {
  double train_fraction = 0.8;
  double valid_fraction = 0.1;
  double test_fraction = 0.1;
  std::uint64_t seed = 0;
  StratifyOn stratify_on = StratifyOn::none;

  void validate() const {
    for (double f : {train_fraction, valid_fraction, test_fraction})
      if (!(f >= 0.0 && f <= 1.0)) throw ConfigError("split fractions must lie in [0,1]");
    if (std::abs(train_fraction + valid_fraction + test_fraction - 1.0) > 1e-9)
      throw ConfigError("split fractions must sum to 1");
  }
};

struct CorpusSplit {
  Corpus train;
  Corpus valid;
  Corpus test;
};

namespace detail {

inline std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> cols;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find('\t', start);
    if (pos == std::string_view::npos) {
      cols.push_back(line.substr(start));
      break;
    }
    cols.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return cols;
}

inline std::optional<std::string> json_optional_string(const nlohmann::json& obj, const char* key,
                                                       std::size_t line_no) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw ParseError(line_no, std::string("field \"") + key + "\" must be a string");
  auto s = it->get<std::string>();
  if (s.empty()) return std::nullopt;
  return s;
}

} // namespace detail

/// Parses one TSV (id, text, dialect, emotion, source) or JSONL line.
/// `line_no` is only used in error messages.
inline Document parse_document_line(std::string_view line, CorpusFormat format, std::size_t line_no = 1) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  Document doc;
  if (format == CorpusFormat::tsv) {
    auto cols = detail::split_tabs(line);
    if (cols.size() != 5)
      throw ParseError(line_no, "expected 5 tab-separated columns, found " + std::to_string(cols.size()));
    doc.id = std::string(cols[0]);
    doc.text = std::string(cols[1]);
    if (!cols[2].empty()) doc.dialect = parse_dialect(cols[2]);
    if (!cols[3].empty()) doc.emotion = parse_emotion(cols[3]);
    if (!cols[4].empty()) doc.source = std::string(cols[4]);
  } else {
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw ParseError(line_no, "expected a JSON object");
    auto id = detail::json_optional_string(obj, "id", line_no);
    auto text = detail::json_optional_string(obj, "text", line_no);
    doc.id = id.value_or("");
    doc.text = text.value_or("");
    if (auto d = detail::json_optional_string(obj, "dialect", line_no)) doc.dialect = parse_dialect(*d);
    if (auto e = detail::json_optional_string(obj, "emotion", line_no)) doc.emotion = parse_emotion(*e);
    doc.source = detail::json_optional_string(obj, "source", line_no);
  }
  if (doc.id.empty()) throw ParseError(line_no, "missing document id");
  return doc;
}

inline std::string format_document_line(const Document& doc, CorpusFormat format) {
  if (format == CorpusFormat::tsv) {
    auto clean = [&](std::string_view field, const char* name) {
      if (field.find_first_of("\t\n\r") != std::string_view::npos)
        throw DataError("document " + doc.id + ": " + name + " contains a tab or newline; not representable in TSV");
      return std::string(field);
    };
    std::string line = clean(doc.id, "id");
    line += '\t';
    line += clean(doc.text, "text");
    line += '\t';
    if (doc.dialect) line += to_string(*doc.dialect);
    line += '\t';
    if (doc.emotion) line += to_string(*doc.emotion);
    line += '\t';
    if (doc.source) line += clean(*doc.source, "source");
    return line;
  }
  nlohmann::ordered_json obj;
  obj["id"] = doc.id;
  obj["text"] = doc.text;
  if (doc.dialect) obj["dialect"] = std::string(to_string(*doc.dialect));
  if (doc.emotion) obj["emotion"] = std::string(to_string(*doc.emotion));
  if (doc.source) obj["source"] = *doc.source;
  return obj.dump();
}

inline Corpus parse_corpus(std::istream& in, CorpusFormat format, std::string provenance = {},
                           Warnings* warnings = nullptr) {
  Corpus corpus;
  corpus.provenance = std::move(provenance);
  std::unordered_map<std::string, std::size_t> first_line;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    Document doc = parse_document_line(line, format, line_no);
    if (doc.text.empty()) throw ParseError(line_no, "document " + doc.id + " has empty text");
    auto [it, inserted] = first_line.emplace(doc.id, line_no);
    if (!inserted)
      throw ParseError(line_no, "duplicate document id \"" + doc.id + "\" (first seen on line " +
                                    std::to_string(it->second) + ", again on line " + std::to_string(line_no) + ")");
    corpus.documents.push_back(std::move(doc));
  }
  if (corpus.empty()) warn(warnings, "corpus " + corpus.provenance + " is empty");
  return corpus;
}

inline Corpus load_corpus(const std::string& path, CorpusFormat format, Warnings* warnings = nullptr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus: " + path);
  return parse_corpus(in, format, path, warnings);
}

inline void write_corpus(std::ostream& out, const Corpus& corpus, CorpusFormat format) {
  for (const auto& doc : corpus.documents) out << format_document_line(doc, format) << '\n';
}

inline void save_corpus(const std::string& path, const Corpus& corpus, CorpusFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + path);
  write_corpus(out, corpus, format);
}

namespace detail {

/// Largest-remainder apportionment of n items over the three fractions.
/// Ties in the fractional parts favour train, then valid, then test.
inline std::array<std::size_t, 3> apportion(std::size_t n, const SplitSpec& spec) {
  const std::array<double, 3> fr = {spec.train_fraction, spec.valid_fraction, spec.test_fraction};
  std::array<std::size_t, 3> counts{};
  std::array<double, 3> rem{};
  std::size_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    double exact = static_cast<double>(n) * fr[i];
    double fl = std::floor(exact + 1e-9);
    counts[i] = static_cast<std::size_t>(fl);
    rem[i] = std::max(0.0, exact - fl);
    assigned += counts[i];
  }
  // Float slop can overshoot by one; take it back from the smallest remainder.
  while (assigned > n) {
    int k = 2;
    while (counts[k] == 0) --k;
    --counts[k];
    --assigned;
  }
  std::array<int, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return rem[a] > rem[b] + 1e-12; });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++counts[order[k % 3]];
  return counts;
}

} // namespace detail

/// Seeded, optionally stratified three-way partition. Each output keeps
/// the input's relative document order.
inline CorpusSplit split_corpus(const Corpus& corpus, const SplitSpec& spec) {
  spec.validate();
  if (corpus.empty()) throw DataError("cannot split an empty corpus");

  std::map<int, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& doc = corpus.documents[i];
    int key = 0;
    if (spec.stratify_on == StratifyOn::dialect) {
      if (!doc.dialect) throw DataError("document " + doc.id + " has no dialect label to stratify on");
      key = static_cast<int>(*doc.dialect);
    } else if (spec.stratify_on == StratifyOn::emotion) {
      if (!doc.emotion) throw DataError("document " + doc.id + " has no emotion label to stratify on");
      key = static_cast<int>(*doc.emotion);
    }
    strata[key].push_back(i);
  }

  Rng rng(spec.seed);
  std::vector<int> part(corpus.size(), 0);
  for (auto& [key, idx] : strata) {
    rng.shuffle(std::span(idx));
    auto counts = detail::apportion(idx.size(), spec);
    for (std::size_t k = 0; k < idx.size(); ++k)
      part[idx[k]] = k < counts[0] ? 0 : (k < counts[0] + counts[1] ? 1 : 2);
  }

  CorpusSplit out;
  Corpus* targets[3] = {&out.train, &out.valid, &out.test};
  const char* names[3] = {"train", "valid", "test"};
  for (int p = 0; p < 3; ++p) targets[p]->provenance = corpus.provenance + "#" + names[p];
  for (std::size_t i = 0; i < corpus.size(); ++i) targets[part[i]]->documents.push_back(corpus.documents[i]);
  return out;
}

} // namespace lahja

#endif
