#include <gtest/gtest.h>

#include <sstream>

#include "fixtures.hpp"
#include "lahja/lexicon.hpp"
#include "lahja/synthgen.hpp"
#include "test_util.hpp"

using namespace lahja;

namespace {

std::set<std::string> words_of(const DialectLexicon& lex, EmotionLabel e) { return lex.words(e); }

LexiconCandidate cand(std::string w, EmotionLabel e, ReviewStatus s = ReviewStatus::candidate,
                      DialectLabel d = DialectLabel::EGY) {
  return {std::move(w), d, e, 0.5, kNoise, CandidateOrigin::top_n, s};
}

} // namespace

TEST(SeedLexicon, ParsesRow) {
  std::istringstream in("اخرس\tanger\n");
  auto s = parse_seed_lexicon(in);
  EXPECT_TRUE(s.words(EmotionLabel::anger).contains("اخرس"));
}

TEST(SeedLexicon, UnknownEmotion) {
  std::istringstream in("كلمة\thappiness\n");
  EXPECT_THROW(parse_seed_lexicon(in), LabelError);
}

TEST(SeedLexicon, AelShapedFileCountsPairs) {
  // 3207 distinct (word, emotion) rows over the six emotions.
  std::ostringstream file;
  for (std::size_t i = 0; i < 3207; ++i)
    file << synth::word(U'ك', i % 6, i) << '\t' << to_string(kAllEmotions[i % 6]) << '\n';
  std::istringstream in(file.str());
  auto s = parse_seed_lexicon(in);
  EXPECT_EQ(s.pair_count(), 3207u);
  EXPECT_EQ(s.entries.size(), 6u);
}

TEST(SeedLexicon, SaveLoadRoundTrip) {
  testutil::TempDir dir;
  fixture::Planted f;
  save_seed_lexicon(f.seed(), dir.file("seed.tsv"));
  EXPECT_EQ(load_seed_lexicon(dir.file("seed.tsv")).entries, f.seed().entries);
}

TEST(InduceCandidates, PlantedFixture) {
  fixture::Planted f;
  auto lex = induce_candidates(f.model(), f.seed(), DialectLabel::EGY, f.config());
  EXPECT_EQ(words_of(lex, EmotionLabel::anger), (std::set<std::string>{f.X, f.Y}));
  EXPECT_EQ(words_of(lex, EmotionLabel::joy), (std::set<std::string>{f.J1, f.J2}));
  const auto* x = lex.find(f.X, DialectLabel::EGY, EmotionLabel::anger);
  const auto* y = lex.find(f.Y, DialectLabel::EGY, EmotionLabel::anger);
  ASSERT_TRUE(x && y);
  EXPECT_EQ(x->origin, CandidateOrigin::top_n);
  EXPECT_EQ(y->origin, CandidateOrigin::cluster_expansion);
  EXPECT_EQ(x->cluster_id, y->cluster_id);
  EXPECT_EQ(lex.candidates.front().word, f.X) << "sorted by similarity";
}

TEST(InduceCandidates, ZeroTopNYieldsNothing) {
  fixture::Planted f;
  auto cfg = f.config();
  cfg.top_n = 0;
  EXPECT_TRUE(induce_candidates(f.model(), f.seed(), DialectLabel::EGY, cfg).candidates.empty());
}

TEST(InduceCandidates, OovEmotionSkippedWithWarning) {
  fixture::Planted f;
  auto seed = f.seed();
  seed.entries[EmotionLabel::fear] = {"غائب1", "غائب2"};
  Warnings w;
  auto lex = induce_candidates(f.model(), seed, DialectLabel::EGY, f.config(), &w);
  ASSERT_EQ(w.size(), 1u);
  EXPECT_NE(w[0].find("fear"), std::string::npos);
  EXPECT_TRUE(words_of(lex, EmotionLabel::fear).empty());
  EXPECT_EQ(words_of(lex, EmotionLabel::anger), (std::set<std::string>{f.X, f.Y}));
}

TEST(InduceCandidates, RestrictedClusteringOnFixture) {
  fixture::Planted f;
  auto cfg = f.config();
  cfg.restrict_dbscan_to_neighborhood = true;
  cfg.neighborhood_size = 3;
  auto lex = induce_candidates(f.model(), f.seed(), DialectLabel::EGY, cfg);
  EXPECT_EQ(words_of(lex, EmotionLabel::anger), (std::set<std::string>{f.X, f.Y}));
}

namespace {

struct RandomFixture {
  SubwordEmbeddingModel model;
  SeedLexicon seed;
};

RandomFixture random_fixture(Rng& rng) {
  std::vector<std::string> words;
  std::vector<Vector> vecs;
  std::size_t V = 30 + rng.below(60);
  for (std::size_t i = 0; i < V; ++i) {
    words.push_back("w" + std::to_string(i));
    vecs.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
  }
  RandomFixture f{model_from_vectors(words, vecs), {}};
  for (auto e : kAllEmotions) {
    std::size_t k = rng.below(4);
    for (std::size_t j = 0; j < k; ++j) f.seed.entries[e].insert(words[rng.below(V)]);
  }
  if (f.seed.entries.empty()) f.seed.entries[EmotionLabel::joy] = {words[0]};
  return f;
}

} // namespace

TEST(InduceProperty, NoSeedLeakage) {
  Rng rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    auto f = random_fixture(rng);
    InductionConfig cfg;
    cfg.top_n = 1 + rng.below(8);
    cfg.dbscan = {0.3 + rng.uniform(), 2 + rng.below(4)};
    auto seeds = f.seed.all_words();
    for (const auto& c : induce_candidates(f.model, f.seed, DialectLabel::GLF, cfg).candidates)
      EXPECT_FALSE(seeds.contains(c.word)) << c.word;
  }
}

TEST(InduceProperty, MonotoneInTopN) {
  Rng rng(42);
  for (int trial = 0; trial < 30; ++trial) {
    auto f = random_fixture(rng);
    InductionConfig cfg;
    cfg.dbscan = {0.3 + rng.uniform(), 2 + rng.below(4)};
    for (std::size_t k = 0; k < 6; ++k) {
      cfg.top_n = k;
      auto small = induce_candidates(f.model, f.seed, DialectLabel::GLF, cfg);
      cfg.top_n = k + 1;
      auto big = induce_candidates(f.model, f.seed, DialectLabel::GLF, cfg);
      for (auto e : kAllEmotions) {
        auto a = small.words(e), b = big.words(e);
        EXPECT_TRUE(std::includes(b.begin(), b.end(), a.begin(), a.end())) << "k=" << k;
      }
    }
  }
}

TEST(SpecificityFilter, Rules) {
  InductionConfig cfg; // ratio 2.0, min_dialect_freq 2
  FrequencyTable egy, glf;
  egy.total = glf.total = 1000000;
  egy.counts = {{"خاص", 30}, {"مشترك", 50}, {"نادر", 1}};
  glf.counts = {{"خاص", 10}, {"مشترك", 50}};
  DialectLexicon lex;
  for (const char* w : {"خاص", "مشترك", "نادر"}) lex.candidates.push_back(cand(w, EmotionLabel::joy));
  auto out = specificity_filter({{DialectLabel::EGY, lex}}, {{DialectLabel::EGY, egy}, {DialectLabel::GLF, glf}}, cfg);
  EXPECT_EQ(out.at(DialectLabel::EGY).words(EmotionLabel::joy), (std::set<std::string>{"خاص"}));
}

TEST(FrequencyTable, PerMillion) {
  std::vector<TokenSequence> s = {{"ا", "ب", "ا", "ج"}};
  auto t = frequency_table(s);
  EXPECT_EQ(t.total, 4u);
  EXPECT_EQ(t.count("ا"), 2u);
  EXPECT_DOUBLE_EQ(t.per_million("ا"), 500000.0);
}

TEST(Review, EmitThenApplyAllVerified) {
  testutil::TempDir dir;
  fixture::Planted f;
  auto lex = induce_candidates(f.model(), f.seed(), DialectLabel::EGY, f.config());
  emit_review_file(lex, dir.file("cands.tsv"));
  auto edited = load_lexicon(dir.file("cands.tsv"));
  for (auto& c : edited.candidates) c.status = ReviewStatus::verified;
  emit_review_file(edited, dir.file("r1.tsv"));
  auto out = apply_review_files(load_lexicon(dir.file("cands.tsv")), std::vector<std::string>{dir.file("r1.tsv")});
  for (const auto& c : out.candidates) EXPECT_EQ(c.status, ReviewStatus::verified);
}

TEST(Review, MajorityOfThree) {
  DialectLexicon lex;
  lex.candidates = {cand("ا", EmotionLabel::joy), cand("ب", EmotionLabel::joy), cand("ج", EmotionLabel::joy)};
  auto vote = [&](ReviewStatus a, ReviewStatus b, ReviewStatus c) {
    DialectLexicon r = lex;
    r.candidates[0].status = a;
    r.candidates[1].status = b;
    r.candidates[2].status = c;
    return r;
  };
  using RS = ReviewStatus;
  std::vector<DialectLexicon> reviews = {vote(RS::verified, RS::rejected, RS::verified),
                                         vote(RS::verified, RS::rejected, RS::candidate),
                                         vote(RS::rejected, RS::verified, RS::rejected)};
  auto out = apply_review(lex, reviews);
  EXPECT_EQ(out.candidates[0].status, RS::verified);
  EXPECT_EQ(out.candidates[1].status, RS::rejected);
  EXPECT_EQ(out.candidates[2].status, RS::candidate) << "1 verified, 1 rejected, 1 abstain: no majority";
  EXPECT_EQ(apply_review(out, reviews).candidates, out.candidates) << "idempotent";
}

TEST(Review, DecidedRowsAreFinal) {
  DialectLexicon lex;
  lex.candidates = {cand("ا", EmotionLabel::joy, ReviewStatus::rejected)};
  DialectLexicon r = lex;
  r.candidates[0].status = ReviewStatus::verified;
  EXPECT_EQ(apply_review(lex, std::vector{r, r, r}).candidates[0].status, ReviewStatus::rejected);
}

TEST(Review, UnknownRowRejected) {
  DialectLexicon lex, r;
  lex.candidates = {cand("ا", EmotionLabel::joy)};
  r.candidates = {cand("ب", EmotionLabel::joy, ReviewStatus::verified)};
  EXPECT_THROW(apply_review(lex, std::vector{r}), DataError);
}

TEST(LexiconFile, RoundTripAndDuplicates) {
  DialectLexicon lex;
  lex.provenance = "prov";
  lex.candidates = {cand("ا", EmotionLabel::joy, ReviewStatus::verified), cand("ب", EmotionLabel::fear)};
  std::stringstream io;
  write_lexicon(io, lex);
  auto back = parse_lexicon(io);
  EXPECT_EQ(back.candidates, lex.candidates);
  EXPECT_EQ(back.provenance, "prov");
  std::istringstream dup(std::string(kReviewHeader) + "\nا\tEGY\tjoy\t0.5\t-1\ttop_n\tcandidate\n" +
                         "ا\tEGY\tjoy\t0.4\t-1\ttop_n\tverified\n");
  EXPECT_THROW(parse_lexicon(dup), ParseError);
}

TEST(LabelEmotion, CountingRule) {
  SeedLexicon seed;
  seed.entries[EmotionLabel::joy] = {"فرح", "سعيد"};
  seed.entries[EmotionLabel::anger] = {"غضب"};
  std::map<DialectLabel, DialectLexicon> lex;
  EXPECT_EQ(label_emotion({"فرح", "سعيد", "غضب"}, DialectLabel::EGY, seed, lex), EmotionLabel::joy);
  EXPECT_EQ(label_emotion({"كلام"}, DialectLabel::EGY, seed, lex), std::nullopt);
  EXPECT_EQ(label_emotion({"فرح", "غضب"}, DialectLabel::EGY, seed, lex), std::nullopt);
}

TEST(LabelEmotion, VerifiedDialectWordsOnly) {
  SeedLexicon seed;
  seed.entries[EmotionLabel::joy] = {"فرح"};
  std::map<DialectLabel, DialectLexicon> lex;
  lex[DialectLabel::EGY].candidates = {cand("مبسوط", EmotionLabel::sadness, ReviewStatus::verified),
                                       cand("زعلان", EmotionLabel::sadness, ReviewStatus::candidate)};
  EXPECT_EQ(label_emotion({"مبسوط", "مبسوط", "فرح"}, DialectLabel::EGY, seed, lex), EmotionLabel::sadness);
  EXPECT_EQ(label_emotion({"مبسوط", "مبسوط", "فرح"}, DialectLabel::GLF, seed, lex), EmotionLabel::joy);
  EXPECT_EQ(label_emotion({"زعلان"}, DialectLabel::EGY, seed, lex), std::nullopt);
}

TEST(LabelEmotionProperty, RejectingNeverRaisesScores) {
  Rng rng(5);
  const std::vector<std::string> vocab = {"ا", "ب", "ت", "ث", "ج", "ح", "خ", "د"};
  for (int trial = 0; trial < 200; ++trial) {
    SeedLexicon seed;
    seed.entries[EmotionLabel::fear] = {vocab[rng.below(8)]};
    std::map<DialectLabel, DialectLexicon> lex;
    for (int k = 0; k < 4; ++k)
      lex[DialectLabel::LEV].candidates.push_back(
          cand(vocab[rng.below(8)], kAllEmotions[rng.below(6)], ReviewStatus::verified, DialectLabel::LEV));
    TokenSequence doc;
    for (int k = 0; k < 6; ++k) doc.push_back(vocab[rng.below(8)]);
    auto before = label_emotion(doc, DialectLabel::LEV, seed, lex);
    auto after_lex = lex;
    auto& victim = after_lex[DialectLabel::LEV].candidates[rng.below(4)];
    victim.status = ReviewStatus::rejected;
    auto after = label_emotion(doc, DialectLabel::LEV, seed, after_lex);
    // A rejection can only remove hits from the victim's emotion, so that
    // emotion cannot newly win.
    if (after == victim.emotion) {
      EXPECT_EQ(before, victim.emotion);
    }
  }
}

TEST(SimpleVote, ReferenceTable) {
  std::istringstream in(fixture::kReferenceVotes);
  auto table = parse_voting_table(in);
  auto r = simple_vote(fixture::kReferenceWords, table);
  EXPECT_EQ(r.totals.at(DialectLabel::NOR), 2u);
  EXPECT_EQ(r.totals.at(DialectLabel::EGY), 2u);
  EXPECT_EQ(r.totals.at(DialectLabel::IRQ), 3u);
  EXPECT_EQ(r.totals.at(DialectLabel::LEV), 3u);
  EXPECT_EQ(r.totals.at(DialectLabel::GLF), 3u);
  EXPECT_EQ(r.winners, (std::set{DialectLabel::IRQ, DialectLabel::LEV, DialectLabel::GLF}));
}

TEST(SimpleVote, SingleEgyptianWord) {
  std::istringstream in(fixture::kReferenceVotes);
  auto r = simple_vote({"ده"}, parse_voting_table(in));
  EXPECT_EQ(r.totals.at(DialectLabel::EGY), 1u);
  for (auto d : {DialectLabel::NOR, DialectLabel::IRQ, DialectLabel::LEV, DialectLabel::GLF})
    EXPECT_EQ(r.totals.at(d), 0u);
  EXPECT_EQ(r.winners, (std::set{DialectLabel::EGY}));
}

TEST(SimpleVote, NoHitsAllWin) {
  std::istringstream in(fixture::kReferenceVotes);
  auto r = simple_vote({"مرحبا"}, parse_voting_table(in));
  EXPECT_EQ(r.winners.size(), 5u);
}

TEST(SimpleVoteProperty, PermutationAndConcatenation) {
  std::istringstream in(fixture::kReferenceVotes);
  auto table = parse_voting_table(in);
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    TokenSequence a, b;
    for (int k = 0; k < 10; ++k) a.push_back(fixture::kReferenceWords[rng.below(7)]);
    for (int k = 0; k < 7; ++k) b.push_back(fixture::kReferenceWords[rng.below(7)]);
    auto shuffled = a;
    rng.shuffle(std::span(shuffled));
    EXPECT_EQ(simple_vote(a, table).totals, simple_vote(shuffled, table).totals);
    auto ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    auto ra = simple_vote(a, table), rb = simple_vote(b, table), rab = simple_vote(ab, table);
    for (auto d : kVotingDialects) EXPECT_EQ(rab.totals[d], ra.totals[d] + rb.totals[d]);
  }
}

TEST(VotingTable, RoundTripAndValidation) {
  std::istringstream in(fixture::kReferenceVotes);
  auto table = parse_voting_table(in);
  std::stringstream io;
  write_voting_table(io, table);
  EXPECT_EQ(parse_voting_table(io), table);
  VotingTable t;
  EXPECT_THROW(t.add("x", {DialectLabel::MSA}), DataError);
}
