#ifndef LAHJA_LABELS_HPP
#define LAHJA_LABELS_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "lahja/error.hpp"

namespace lahja {

// Enumerator order is the canonical (alphabetical) order used for tie-breaking.
enum class DialectLabel : std::uint8_t { EGY, GLF, IRQ, LEV, MSA, NOR };
enum class EmotionLabel : std::uint8_t { anger, disgust, fear, joy, sadness, surprise };

inline constexpr std::array<DialectLabel, 6> kAllDialects = {
    DialectLabel::EGY, DialectLabel::GLF, DialectLabel::IRQ,
    DialectLabel::LEV, DialectLabel::MSA, DialectLabel::NOR};

inline constexpr std::array<EmotionLabel, 6> kAllEmotions = {
    EmotionLabel::anger, EmotionLabel::disgust, EmotionLabel::fear,
    EmotionLabel::joy,   EmotionLabel::sadness, EmotionLabel::surprise};

/// Column order of the simple-voting table.
inline constexpr std::array<DialectLabel, 5> kVotingDialects = {
    DialectLabel::NOR, DialectLabel::EGY, DialectLabel::IRQ, DialectLabel::LEV, DialectLabel::GLF};

inline std::string_view to_string(DialectLabel d) {
  static constexpr std::array<std::string_view, 6> names = {"EGY", "GLF", "IRQ", "LEV", "MSA", "NOR"};
  return names[static_cast<std::size_t>(d)];
}

inline std::string_view to_string(EmotionLabel e) {
  static constexpr std::array<std::string_view, 6> names = {"anger", "disgust", "fear",
                                                            "joy",   "sadness", "surprise"};
  return names[static_cast<std::size_t>(e)];
}

inline std::optional<DialectLabel> try_parse_dialect(std::string_view token) {
  for (auto d : kAllDialects)
    if (to_string(d) == token) return d;
  return std::nullopt;
}

inline std::optional<EmotionLabel> try_parse_emotion(std::string_view token) {
  for (auto e : kAllEmotions)
    if (to_string(e) == token) return e;
  return std::nullopt;
}

inline DialectLabel parse_dialect(std::string_view token) {
  if (auto d = try_parse_dialect(token)) return *d;
  throw LabelError(std::string(token));
}

inline EmotionLabel parse_emotion(std::string_view token) {
  if (auto e = try_parse_emotion(token)) return *e;
  throw LabelError(std::string(token));
}

/// Generic access used by templated code (classifiers, metrics).
template <class Label>
struct LabelTraits;

template <>
struct LabelTraits<DialectLabel> {
  static constexpr std::uint32_t kind = 0;
  static constexpr const auto& all() { return kAllDialects; }
  static DialectLabel parse(std::string_view s) { return parse_dialect(s); }
};

template <>
struct LabelTraits<EmotionLabel> {
  static constexpr std::uint32_t kind = 1;
  static constexpr const auto& all() { return kAllEmotions; }
  static EmotionLabel parse(std::string_view s) { return parse_emotion(s); }
};

} // namespace lahja

#endif
