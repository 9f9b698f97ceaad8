#ifndef LAHJA_PREPROCESS_HPP
#define LAHJA_PREPROCESS_HPP

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "lahja/corpus.hpp"
#include "lahja/error.hpp"
#include "lahja/utf8.hpp"

namespace lahja {

struct NormalizationConfig {
  bool strip_diacritics = true;
  bool strip_tatweel = true;
  bool fold_alef_variants = false;
  bool collapse_elongation = false;

  bool operator==(const NormalizationConfig&) const = default;
};

enum class TokenizeMode { whitespace, segmented };

inline TokenizeMode parse_tokenize_mode(std::string_view s) {
  if (s == "whitespace") return TokenizeMode::whitespace;
  if (s == "segmented") return TokenizeMode::segmented;
  throw ConfigError("unknown tokenize mode: " + std::string(s));
}

inline std::string_view to_string(TokenizeMode m) {
  return m == TokenizeMode::segmented ? "segmented" : "whitespace";
}

/// prefix + stem + suffix always reconstitutes the segmented word.
struct SegmentedWord {
  std::string prefix;
  std::string stem;
  std::string suffix;

  bool operator==(const SegmentedWord&) const = default;
};

using TokenSequence = std::vector<std::string>;

namespace arabic {

inline constexpr char32_t kTatweel = 0x0640;
inline constexpr std::size_t kMaxElongationRun = 2;
inline constexpr std::size_t kMinStemLength = 2;

/// Harakat plus superscript alef.
inline bool is_diacritic(char32_t cp) { return (cp >= 0x064B && cp <= 0x0652) || cp == 0x0670; }

inline bool in_arabic_block(char32_t cp) {
  return (cp >= 0x0600 && cp <= 0x06FF) || (cp >= 0x0750 && cp <= 0x077F);
}

/// Arabic letters proper: excludes digits, punctuation and combining marks.
inline bool is_letter(char32_t cp) {
  return (cp >= 0x0621 && cp <= 0x064A) || (cp >= 0x066E && cp <= 0x066F) || (cp >= 0x0671 && cp <= 0x06D3) ||
         cp == 0x06D5 || (cp >= 0x06EE && cp <= 0x06EF) || (cp >= 0x06FA && cp <= 0x06FC) || cp == 0x06FF ||
         (cp >= 0x0750 && cp <= 0x077F);
}

// Longest entries first so the first match is the longest.
inline const std::array<std::u32string_view, 8> kPrefixes = {
    U"وال", U"لل", U"ال", U"و", U"ف", U"ب", U"ك", U"ل"};
inline const std::array<std::u32string_view, 12> kSuffixes = {
    U"ها", U"هم", U"هن", U"كم", U"كن", U"نا", U"ون", U"ين", U"ات", U"ة", U"ه", U"ي"};

} // namespace arabic

inline std::string normalize_text(std::string_view text, const NormalizationConfig& cfg = {}) {
  std::u32string out;
  for (char32_t cp : utf8::decode(text)) {
    if (cfg.strip_diacritics && arabic::is_diacritic(cp)) continue;
    if (cfg.strip_tatweel && cp == arabic::kTatweel) continue;
    if (cfg.fold_alef_variants && (cp == 0x0622 || cp == 0x0623 || cp == 0x0625)) cp = 0x0627;
    if (cfg.collapse_elongation && out.size() >= arabic::kMaxElongationRun && !utf8::is_space(cp)) {
      bool run = true;
      for (std::size_t k = 1; k <= arabic::kMaxElongationRun; ++k) run = run && out[out.size() - k] == cp;
      if (run) continue;
    }
    out.push_back(cp);
  }
  return utf8::encode(out);
}

namespace detail {

template <class Fn>
void for_each_whitespace_token(std::u32string_view cps, Fn&& fn) {
  std::size_t i = 0;
  while (i < cps.size()) {
    while (i < cps.size() && utf8::is_space(cps[i])) ++i;
    std::size_t start = i;
    while (i < cps.size() && !utf8::is_space(cps[i])) ++i;
    if (i > start) fn(cps.substr(start, i - start));
  }
}

} // namespace detail

/// Keeps the whitespace-delimited tokens that contain at least one Arabic letter.
inline std::string filter_non_arabic(std::string_view text) {
  auto cps = utf8::decode(text);
  std::string out;
  detail::for_each_whitespace_token(cps, [&](std::u32string_view tok) {
    for (char32_t cp : tok) {
      if (arabic::is_letter(cp)) {
        if (!out.empty()) out.push_back(' ');
        out += utf8::encode(tok);
        return;
      }
    }
  });
  return out;
}

/// Light affix stripping: the longest prefix, then the longest suffix, that
/// leave a stem of at least two codepoints.
inline SegmentedWord segment_word(std::string_view word) {
  auto cps = utf8::decode(word);
  std::size_t pre = 0;
  for (auto p : arabic::kPrefixes) {
    if (cps.size() >= p.size() + arabic::kMinStemLength && std::u32string_view(cps).starts_with(p)) {
      pre = p.size();
      break;
    }
  }
  std::size_t suf = 0;
  for (auto s : arabic::kSuffixes) {
    if (cps.size() >= pre + s.size() + arabic::kMinStemLength && std::u32string_view(cps).ends_with(s)) {
      suf = s.size();
      break;
    }
  }
  std::u32string_view view(cps);
  return SegmentedWord{utf8::encode(view.substr(0, pre)), utf8::encode(view.substr(pre, cps.size() - pre - suf)),
                       utf8::encode(view.substr(cps.size() - suf))};
}

inline TokenSequence tokenize(std::string_view text, TokenizeMode mode = TokenizeMode::whitespace) {
  TokenSequence tokens;
  auto cps = utf8::decode(text);
  detail::for_each_whitespace_token(cps, [&](std::u32string_view tok) {
    auto word = utf8::encode(tok);
    if (mode == TokenizeMode::whitespace) {
      tokens.push_back(std::move(word));
      return;
    }
    auto seg = segment_word(word);
    for (auto* part : {&seg.prefix, &seg.stem, &seg.suffix})
      if (!part->empty()) tokens.push_back(std::move(*part));
  });
  return tokens;
}

/// Immutable text pipeline: filter non-Arabic tokens, normalize, tokenize.
class Preprocessor {
public:
  Preprocessor() = default;
  explicit Preprocessor(NormalizationConfig cfg, TokenizeMode mode = TokenizeMode::whitespace)
      : cfg_(cfg), mode_(mode) {}

  const NormalizationConfig& config() const noexcept { return cfg_; }
  TokenizeMode mode() const noexcept { return mode_; }

  TokenSequence operator()(std::string_view text) const {
    return tokenize(normalize_text(filter_non_arabic(text), cfg_), mode_);
  }

  TokenSequence operator()(const Document& doc, Warnings* warnings = nullptr) const {
    auto tokens = (*this)(doc.text);
    if (tokens.empty()) warn(warnings, "document " + doc.id + " has no Arabic content after filtering");
    return tokens;
  }

  std::vector<TokenSequence> operator()(const Corpus& corpus, Warnings* warnings = nullptr) const {
    std::vector<TokenSequence> out;
    out.reserve(corpus.size());
    for (const auto& doc : corpus.documents) out.push_back((*this)(doc, warnings));
    return out;
  }

private:
  NormalizationConfig cfg_;
  TokenizeMode mode_ = TokenizeMode::whitespace;
};

inline TokenSequence preprocess_document(const Document& doc, const NormalizationConfig& cfg = {},
                                         TokenizeMode mode = TokenizeMode::whitespace, Warnings* warnings = nullptr) {
  return Preprocessor(cfg, mode)(doc, warnings);
}

inline std::string join_tokens(const TokenSequence& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

} // namespace lahja

#endif
