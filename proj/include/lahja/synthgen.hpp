#ifndef LAHJA_SYNTHGEN_HPP
#define LAHJA_SYNTHGEN_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <set>
#include <string>
#include <span>
#include <vector>

#include "lahja/corpus.hpp"
#include "lahja/error.hpp"
#include "lahja/labels.hpp"
#include "lahja/lexicon.hpp"
#include "lahja/preprocess.hpp"
#include "lahja/random.hpp"
#include "lahja/utf8.hpp"

namespace lahja {

enum class CueMode { global, dialect_conditional };

inline CueMode parse_cue_mode(std::string_view s) {
  if (s == "global") return CueMode::global;
  if (s == "dialect_conditional") return CueMode::dialect_conditional;
  throw ConfigError("unknown cue mode: " + std::string(s));
}

inline std::string_view to_string(CueMode m) { return m == CueMode::global ? "global" : "dialect_conditional"; }

/// The first `fraction` of `second`'s marker vocabulary is replaced by the
/// corresponding markers of `first`, so those tokens are shared.
struct MarkerOverlap {
  DialectLabel first;
  DialectLabel second;
  double fraction = 0.0;
};

struct SynthSpec {
  std::vector<DialectLabel> dialects = {DialectLabel::EGY, DialectLabel::GLF};
  std::vector<EmotionLabel> emotions = {kAllEmotions.begin(), kAllEmotions.end()};
  std::size_t docs_per_cell = 10;
  std::size_t vocab_per_dialect = 50;
  std::size_t shared_vocab = 100;
  CueMode emotion_cue_mode = CueMode::global;
  double cue_strength = 0.9;
  std::size_t min_length = 8;
  std::size_t max_length = 16;
  std::uint64_t seed = 0;
  double filler_fraction = 0.3;   // per-slot probability of a shared filler token
  double cue_fraction = 0.2;      // per-slot probability of an emotion cue token
  std::size_t cues_per_emotion = 5;
  std::vector<MarkerOverlap> marker_overlap;

  void validate() const {
    if (dialects.empty() || emotions.empty()) throw ConfigError("synth spec needs dialects and emotions");
    if (std::set(dialects.begin(), dialects.end()).size() != dialects.size())
      throw ConfigError("synth spec lists a dialect twice");
    if (std::set(emotions.begin(), emotions.end()).size() != emotions.size())
      throw ConfigError("synth spec lists an emotion twice");
    if (docs_per_cell < 1) throw ConfigError("docs_per_cell must be >= 1");
    if (vocab_per_dialect < 1 || cues_per_emotion < 1 || (shared_vocab < 1 && filler_fraction > 0.0))
      throw ConfigError("degenerate synth spec: zero vocabulary");
    if (!(cue_strength >= 0.0 && cue_strength <= 1.0)) throw ConfigError("cue_strength must lie in [0,1]");
    if (min_length < 1 || max_length < min_length) throw ConfigError("invalid document length range");
    if (filler_fraction < 0.0 || cue_fraction < 0.0 || filler_fraction + cue_fraction > 1.0)
      throw ConfigError("filler_fraction + cue_fraction must lie in [0,1]");
    for (const auto& o : marker_overlap)
      if (!(o.fraction >= 0.0 && o.fraction <= 1.0)) throw ConfigError("marker overlap fraction must lie in [0,1]");
  }
};

struct SynthOutput {
  Corpus corpus;
  VotingTable voting;  // ground-truth marker votes (SMADC dialects only)
  SeedLexicon seed;    // emotion -> cue tokens of the unshifted mapping
};

namespace synth {

// Letters outside the segmenter's affix tables, so segmented mode leaves
// generated words intact.
inline constexpr std::array<char32_t, 20> kLetters = {U'ب', U'ت', U'ث', U'ج', U'ح', U'خ', U'د', U'ذ', U'ر', U'ز',
                                                      U'س', U'ش', U'ص', U'ض', U'ط', U'ظ', U'ع', U'غ', U'ق', U'م'};

inline std::string word(char32_t category, std::size_t group, std::size_t id) {
  std::u32string w;
  w.push_back(category);
  w.push_back(kLetters[group % kLetters.size()]);
  std::u32string digits;
  do {
    digits.push_back(kLetters[id % kLetters.size()]);
    id /= kLetters.size();
  } while (id > 0);
  if (digits.size() < 2) digits.push_back(kLetters[0]);
  w.append(digits.rbegin(), digits.rend());
  return utf8::encode(w);
}

inline std::string marker(std::size_t dialect_index, std::size_t i) { return word(U'ش', dialect_index, i); }
inline std::string filler(std::size_t i) { return word(U'ر', 0, i); }
inline std::string cue(std::size_t block, std::size_t j) { return word(U'ع', block, j); }

/// Cue block that signals emotion `e` in dialect `d` (indices into the spec lists).
inline std::size_t cue_block(const SynthSpec& spec, std::size_t e, std::size_t d) {
  return spec.emotion_cue_mode == CueMode::global ? e : (e + d) % spec.emotions.size();
}

} // namespace synth

inline SynthOutput generate(const SynthSpec& spec) {
  spec.validate();
  const std::size_t D = spec.dialects.size(), E = spec.emotions.size();
  auto dialect_index = [&](DialectLabel d) -> std::size_t {
    for (std::size_t i = 0; i < D; ++i)
      if (spec.dialects[i] == d) return i;
    throw ConfigError("marker overlap names a dialect not in the spec: " + std::string(to_string(d)));
  };

  std::vector<std::vector<std::string>> markers(D);
  for (std::size_t d = 0; d < D; ++d)
    for (std::size_t i = 0; i < spec.vocab_per_dialect; ++i) markers[d].push_back(synth::marker(d, i));
  for (const auto& o : spec.marker_overlap) {
    auto a = dialect_index(o.first), b = dialect_index(o.second);
    auto k = static_cast<std::size_t>(std::llround(o.fraction * static_cast<double>(spec.vocab_per_dialect)));
    for (std::size_t i = 0; i < k; ++i) markers[b][i] = markers[a][i];
  }

  SynthOutput out;
  for (std::size_t d = 0; d < D; ++d) {
    if (std::find(kVotingDialects.begin(), kVotingDialects.end(), spec.dialects[d]) == kVotingDialects.end()) continue;
    for (const auto& m : markers[d]) out.voting.votes[m].insert(spec.dialects[d]);
  }
  for (std::size_t e = 0; e < E; ++e)
    for (std::size_t j = 0; j < spec.cues_per_emotion; ++j)
      out.seed.entries[spec.emotions[e]].insert(synth::cue(e, j));

  Rng rng(spec.seed);
  out.corpus.provenance = "synthgen seed=" + std::to_string(spec.seed);
  std::size_t serial = 0;
  char id[32];
  for (std::size_t d = 0; d < D; ++d) {
    for (std::size_t e = 0; e < E; ++e) {
      for (std::size_t n = 0; n < spec.docs_per_cell; ++n) {
        const std::size_t len = spec.min_length + rng.below(spec.max_length - spec.min_length + 1);
        std::vector<std::string> tokens;
        for (std::size_t s = 0; s < len; ++s) {
          const double r = rng.uniform();
          if (s == 0 || (r >= spec.filler_fraction && r < spec.filler_fraction + spec.cue_fraction)) {
            std::size_t block = rng.bernoulli(spec.cue_strength) ? synth::cue_block(spec, e, d) : rng.below(E);
            tokens.push_back(synth::cue(block, rng.below(spec.cues_per_emotion)));
          } else if (r < spec.filler_fraction) {
            tokens.push_back(synth::filler(rng.below(spec.shared_vocab)));
          } else {
            tokens.push_back(markers[d][rng.below(spec.vocab_per_dialect)]);
          }
        }
        rng.shuffle(std::span(tokens));
        std::snprintf(id, sizeof id, "syn-%06zu", ++serial);
        Document doc;
        doc.id = id;
        doc.text = join_tokens(tokens);
        doc.dialect = spec.dialects[d];
        doc.emotion = spec.emotions[e];
        doc.source = "synthgen";
        out.corpus.documents.push_back(std::move(doc));
      }
    }
  }
  return out;
}

} // namespace lahja

#endif
