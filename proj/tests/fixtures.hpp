#ifndef LAHJA_TESTS_FIXTURES_HPP
#define LAHJA_TESTS_FIXTURES_HPP

#include <string>
#include <vector>

#include "lahja/embedding.hpp"
#include "lahja/lexicon.hpp"

namespace fixture {

// Planted 2-D embedding. Anger seeds sit at (1, +-0.01); X is their nearest
// non-seed word and Y shares X's density cluster without being near the
// centroid. Joy seeds sit at (+-0.01, 1) with J1, J2 beside them; Z is alone.
struct Planted {
  std::vector<std::string> words = {"سب1", "سب2", "اكس", "واي", "فرح1", "فرح2", "جي1", "جي2", "زد"};
  std::vector<lahja::Vector> vectors = {{1.0, 0.01},  {1.0, -0.01}, {0.98, 0.02}, {0.85, 0.15}, {0.01, 1.0},
                                        {-0.01, 1.0}, {0.02, 0.98}, {0.05, 0.95}, {-1.0, -1.0}};
  std::string X = "اكس", Y = "واي", J1 = "جي1", J2 = "جي2", Z = "زد";

  lahja::SubwordEmbeddingModel model() const { return lahja::model_from_vectors(words, vectors); }

  lahja::SeedLexicon seed() const {
    lahja::SeedLexicon s;
    s.entries[lahja::EmotionLabel::anger] = {"سب1", "سب2"};
    s.entries[lahja::EmotionLabel::joy] = {"فرح1", "فرح2"};
    return s;
  }

  lahja::InductionConfig config() const {
    lahja::InductionConfig c;
    c.top_n = 1;
    c.dbscan = {0.3, 2};
    return c;
  }
};

// Reference voting table, as (word, NOR EGY IRQ LEV GLF). Totals over the
// seven words are NOR 2, EGY 2, IRQ 3, LEV 3, GLF 3.
inline const char* kReferenceVotes = "Words\tNOR\tEGY\tIRQ\tLEV\tGLF\n"
                             "هههههههههههه\t0\t1\t1\t1\t1\n"
                             "وقت\t0\t0\t0\t0\t0\n"
                             "لش\t1\t0\t1\t1\t1\n"
                             "بالهطريقة\t0\t0\t1\t0\t1\n"
                             "صافي\t1\t0\t0\t0\t0\n"
                             "ده\t0\t1\t0\t0\t0\n"
                             "زاكي\t0\t0\t0\t1\t0\n";

inline const std::vector<std::string> kReferenceWords = {"هههههههههههه", "وقت",  "لش",  "بالهطريقة",
                                                      "صافي",         "ده", "زاكي"};

} // namespace fixture

#endif
