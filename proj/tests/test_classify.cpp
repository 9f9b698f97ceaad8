#include <gtest/gtest.h>

#include <cmath>

#include "lahja/classify.hpp"
#include "lahja/random.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace lahja;

namespace {

using DExample = LabeledExample<DialectLabel>;

Document doc(std::string id, std::string text, std::optional<DialectLabel> d, std::optional<EmotionLabel> e) {
  return {std::move(id), std::move(text), d, e, {}};
}

// Same word, opposite emotion per dialect: "حيل" is joy in EGY and anger in GLF.
Corpus routing_corpus() {
  Corpus c;
  int n = 0;
  auto add = [&](const char* text, DialectLabel d, EmotionLabel e, int times) {
    for (int i = 0; i < times; ++i) c.documents.push_back(doc("r" + std::to_string(n++), text, d, e));
  };
  add("ده حيل", DialectLabel::EGY, EmotionLabel::joy, 4);
  add("ده زعل", DialectLabel::EGY, EmotionLabel::anger, 4);
  add("وايد حيل", DialectLabel::GLF, EmotionLabel::anger, 4);
  add("وايد وناسة", DialectLabel::GLF, EmotionLabel::joy, 4);
  add("شلون", DialectLabel::IRQ, EmotionLabel::fear, 3);
  return c;
}

} // namespace

TEST(Featurize, Examples) {
  TokenIndex ix;
  ix.add("a");
  ix.add("b");
  EXPECT_EQ(featurize({"a", "a", "b"}, ix), (FeatureVector{{0, 2}, {1, 1}}));
  EXPECT_TRUE(featurize({"q", "r"}, ix).empty());
  EXPECT_TRUE(featurize({}, ix).empty());
}

TEST(NbTrain, UniformPriorsForOneDocEach) {
  std::vector<TokenSequence> docs = {{"a"}, {"b"}};
  auto ix = TokenIndex::build(docs);
  std::vector<DExample> ex = {{featurize(docs[0], ix), DialectLabel::EGY}, {featurize(docs[1], ix), DialectLabel::GLF}};
  auto m = nb_train<DialectLabel>(ex, ix);
  EXPECT_DOUBLE_EQ(m.log_priors[0], std::log(0.5));
  EXPECT_DOUBLE_EQ(m.log_priors[1], std::log(0.5));
}

TEST(NbTrain, HandBayesArithmetic) {
  std::vector<TokenSequence> docs = {{"x", "x", "y"}, {"z"}};
  auto ix = TokenIndex::build(docs);
  std::vector<DExample> ex = {{featurize(docs[0], ix), DialectLabel::EGY}, {featurize(docs[1], ix), DialectLabel::GLF}};
  auto m = nb_train<DialectLabel>(ex, ix, 1.0);
  const auto x = *ix.find("x");
  EXPECT_NEAR(std::exp(m.log_likelihoods[0][x]), 0.5, 1e-15);

  auto p = nb_predict(m, TokenSequence{"x"});
  EXPECT_EQ(p.label, DialectLabel::EGY);
  EXPECT_NEAR(p.log_scores[0], std::log(0.5) + std::log(3.0 / 6.0), 1e-12);
  EXPECT_NEAR(p.log_scores[1], std::log(0.5) + std::log(1.0 / 4.0), 1e-12);
}

TEST(NbTrain, RejectsNonPositiveAlpha) {
  std::vector<TokenSequence> docs = {{"a"}};
  auto ix = TokenIndex::build(docs);
  std::vector<DExample> ex = {{featurize(docs[0], ix), DialectLabel::EGY}};
  EXPECT_THROW(nb_train<DialectLabel>(ex, ix, 0.0), ConfigError);
  EXPECT_THROW(nb_train<DialectLabel>(ex, ix, -1.0), ConfigError);
}

TEST(NbPredict, EmptyInputFollowsPriors) {
  std::vector<TokenSequence> docs = {{"a"}, {"b"}, {"b"}};
  auto ix = TokenIndex::build(docs);
  std::vector<DExample> ex = {{featurize(docs[0], ix), DialectLabel::EGY},
                              {featurize(docs[1], ix), DialectLabel::GLF},
                              {featurize(docs[2], ix), DialectLabel::GLF}};
  auto m = nb_train<DialectLabel>(ex, ix);
  EXPECT_EQ(nb_predict(m, FeatureVector{}).label, DialectLabel::GLF);
}

TEST(NbPredict, TiesGoToCanonicalOrder) {
  std::vector<TokenSequence> docs = {{"a"}, {"a"}};
  auto ix = TokenIndex::build(docs);
  std::vector<DExample> ex = {{featurize(docs[0], ix), DialectLabel::LEV}, {featurize(docs[1], ix), DialectLabel::EGY}};
  EXPECT_EQ(nb_predict(nb_train<DialectLabel>(ex, ix), TokenSequence{"a"}).label, DialectLabel::EGY);
}

TEST(NbOracle, RandomSmallCorpora) {
  Rng rng(2718);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t V = 1 + rng.below(20), N = 1 + rng.below(50);
    const double alpha = trial % 5 == 0 ? 1.0 : 0.05 + rng.uniform() * 3;
    std::vector<TokenSequence> docs;
    std::vector<std::string> labels;
    std::vector<DExample> ex;
    for (std::size_t i = 0; i < N; ++i) {
      TokenSequence d;
      for (std::size_t k = 0, len = 1 + rng.below(8); k < len; ++k) d.push_back("t" + std::to_string(rng.below(V)));
      docs.push_back(d);
    }
    auto ix = TokenIndex::build(docs);
    for (const auto& d : docs) {
      auto lab = kAllDialects[rng.below(4)];
      labels.emplace_back(to_string(lab));
      ex.push_back({featurize(d, ix), lab});
    }
    auto m = nb_train<DialectLabel>(ex, ix, alpha);
    std::vector<std::string> classes;
    for (auto c : m.classes) classes.emplace_back(to_string(c));
    for (int q = 0; q < 5; ++q) {
      TokenSequence query;
      for (std::size_t k = 0, len = rng.below(10); k < len; ++k) query.push_back("t" + std::to_string(rng.below(V + 3)));
      auto got = nb_predict(m, query).log_scores;
      auto want = oracle::nb_log_scores(docs, labels, classes, query, alpha);
      ASSERT_EQ(got.size(), want.size());
      for (std::size_t c = 0; c < got.size(); ++c) EXPECT_NEAR(got[c], want[c], 1e-10);
    }
  }
}

TEST(NbProperty, AddingClassDocNeverLowersItsPrior) {
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<TokenSequence> docs;
    std::vector<DialectLabel> labs;
    for (std::size_t i = 0, n = 2 + rng.below(20); i < n; ++i) {
      docs.push_back({"t" + std::to_string(rng.below(5))});
      labs.push_back(kAllDialects[rng.below(3)]);
    }
    auto train = [&] {
      auto ix = TokenIndex::build(docs);
      std::vector<DExample> ex;
      for (std::size_t i = 0; i < docs.size(); ++i) ex.push_back({featurize(docs[i], ix), labs[i]});
      return nb_train<DialectLabel>(ex, ix);
    };
    auto before = train();
    auto c = labs[rng.below(labs.size())];
    docs.push_back({"t0"});
    labs.push_back(c);
    auto after = train();
    auto idx = [&](const auto& m) { return std::find(m.classes.begin(), m.classes.end(), c) - m.classes.begin(); };
    EXPECT_GE(after.log_priors[idx(after)], before.log_priors[idx(before)]);
  }
}

TEST(NbPersistence, RoundTripAndErrors) {
  testutil::TempDir dir;
  std::vector<TokenSequence> docs = {{"x", "x", "y"}, {"z"}};
  auto ix = TokenIndex::build(docs);
  std::vector<DExample> ex = {{featurize(docs[0], ix), DialectLabel::EGY}, {featurize(docs[1], ix), DialectLabel::GLF}};
  auto m = nb_train<DialectLabel>(ex, ix);
  save_nb(m, dir.file("nb.bin"));
  EXPECT_EQ(load_nb<DialectLabel>(dir.file("nb.bin")), m);
  EXPECT_THROW(load_nb<EmotionLabel>(dir.file("nb.bin")), FormatError);
  auto bytes = testutil::slurp(dir.file("nb.bin"));
  testutil::spit(dir.file("cut.bin"), bytes.substr(0, bytes.size() - 5));
  EXPECT_THROW(load_nb<DialectLabel>(dir.file("cut.bin")), TruncationError);
  bytes[0] = 'X';
  testutil::spit(dir.file("bad.bin"), bytes);
  EXPECT_THROW(load_nb<DialectLabel>(dir.file("bad.bin")), FormatError);
}

TEST(Pipeline, TwoDialectsTwoModels) {
  Corpus c;
  c.documents = {doc("1", "ده فرح", DialectLabel::EGY, EmotionLabel::joy),
                 doc("2", "ده فرح", DialectLabel::EGY, EmotionLabel::joy),
                 doc("3", "وايد زعل", DialectLabel::GLF, EmotionLabel::anger),
                 doc("4", "وايد زعل", DialectLabel::GLF, EmotionLabel::anger)};
  auto p = train_pipeline(c);
  EXPECT_EQ(p.emotion_models.size(), 2u);
  EXPECT_TRUE(p.emotion_models.contains(DialectLabel::EGY));
  EXPECT_TRUE(p.emotion_models.contains(DialectLabel::GLF));
  EXPECT_EQ(p.general_emotion_model.classes.size(), 2u);
}

TEST(Pipeline, DialectWithoutEmotionsFallsBack) {
  Corpus c;
  c.documents = {doc("1", "ده فرح", DialectLabel::EGY, EmotionLabel::joy),
                 doc("2", "ده زعل", DialectLabel::EGY, EmotionLabel::anger),
                 doc("3", "ده فرح", DialectLabel::EGY, EmotionLabel::joy),
                 doc("4", "ده زعل", DialectLabel::EGY, EmotionLabel::anger),
                 doc("5", "وايد", DialectLabel::GLF, std::nullopt)};
  TrainingSummary s;
  auto p = train_pipeline(c, {}, {}, nullptr, &s);
  EXPECT_FALSE(p.emotion_models.contains(DialectLabel::GLF));
  EXPECT_EQ(s.excluded_from_emotion, 1u);
  auto pred = predict_text(p, "وايد");
  EXPECT_EQ(pred.dialect, DialectLabel::GLF);
  EXPECT_TRUE(pred.diagnostics.fallback);
  EXPECT_FALSE(pred.diagnostics.routed_to.has_value());
}

TEST(Pipeline, NoEmotionInformationIsError) {
  Corpus c;
  c.documents = {doc("1", "ده", DialectLabel::EGY, std::nullopt), doc("2", "وايد", DialectLabel::GLF, std::nullopt)};
  EXPECT_THROW(train_pipeline(c), DataError);
}

TEST(Pipeline, MinPerClassGuard) {
  Corpus c;
  c.documents = {doc("1", "ده فرح", DialectLabel::EGY, EmotionLabel::joy),
                 doc("2", "ده فرح", DialectLabel::EGY, EmotionLabel::joy),
                 doc("3", "ده زعل", DialectLabel::EGY, EmotionLabel::anger),
                 doc("4", "وايد زعل", DialectLabel::GLF, EmotionLabel::anger)};
  Warnings w;
  auto p = train_pipeline(c, {}, {}, nullptr, nullptr, &w);
  ASSERT_TRUE(p.emotion_models.contains(DialectLabel::EGY));
  EXPECT_EQ(p.emotion_models.at(DialectLabel::EGY).classes, (std::vector{EmotionLabel::joy}));
  EXPECT_FALSE(p.emotion_models.contains(DialectLabel::GLF));
  EXPECT_EQ(w.size(), 1u);
}

TEST(Pipeline, RoutesBySameWordDifferentEmotion) {
  auto p = train_pipeline(routing_corpus());
  auto egy = predict_text(p, "ده حيل");
  EXPECT_EQ(egy.dialect, DialectLabel::EGY);
  EXPECT_EQ(egy.emotion, EmotionLabel::joy);
  EXPECT_EQ(egy.diagnostics.routed_to, DialectLabel::EGY);
  EXPECT_FALSE(egy.diagnostics.fallback);
  auto glf = predict_text(p, "وايد حيل");
  EXPECT_EQ(glf.dialect, DialectLabel::GLF);
  EXPECT_EQ(glf.emotion, EmotionLabel::anger);
  EXPECT_EQ(glf.diagnostics.routed_to, DialectLabel::GLF);
}

TEST(Pipeline, MissingDialectModelUsesGeneral) {
  auto p = train_pipeline(routing_corpus(), {}, {2, 4});
  // IRQ has only 3 fear documents, below min_per_class = 4.
  EXPECT_FALSE(p.emotion_models.contains(DialectLabel::IRQ));
  auto r = predict_text(p, "شلون");
  EXPECT_EQ(r.dialect, DialectLabel::IRQ);
  EXPECT_TRUE(r.diagnostics.fallback);
}

TEST(PipelineProperty, RoutingDiagnosticsNameTheModelUsed) {
  auto p = train_pipeline(routing_corpus(), {}, {1.0, 4});
  Rng rng(8);
  const std::vector<std::string> vocab = {"ده", "وايد", "حيل", "زعل", "وناسة", "شلون", "جديد"};
  for (int trial = 0; trial < 300; ++trial) {
    TokenSequence t;
    for (std::size_t k = 0, n = rng.below(5); k < n; ++k) t.push_back(vocab[rng.below(vocab.size())]);
    auto r = predict_pipeline(p, t);
    auto it = p.emotion_models.find(r.dialect);
    const auto& expected = it == p.emotion_models.end() ? p.general_emotion_model : it->second;
    EXPECT_EQ(r.diagnostics.fallback, it == p.emotion_models.end());
    EXPECT_EQ(r.diagnostics.emotion_scores, nb_predict(expected, t).log_scores);
    EXPECT_EQ(r.emotion, nb_predict(expected, t).label);
  }
}

TEST(Pipeline, SilverLabelsWhenGoldMissing) {
  Corpus c;
  c.documents = {doc("1", "ده فرحان", DialectLabel::EGY, std::nullopt),
                 doc("2", "ده فرحان جدا", DialectLabel::EGY, std::nullopt),
                 doc("3", "ده زعلان", DialectLabel::EGY, EmotionLabel::anger),
                 doc("4", "ده كلام", DialectLabel::EGY, std::nullopt)};
  SilverLabelSource silver;
  silver.seed.entries[EmotionLabel::joy] = {"فرحان"};
  TrainingSummary s;
  auto p = train_pipeline(c, {}, {1.0, 1}, &silver, &s);
  EXPECT_EQ(s.gold_emotion, 1u);
  EXPECT_EQ(s.silver_emotion, 2u);
  EXPECT_EQ(s.excluded_from_emotion, 1u);
  EXPECT_EQ(p.general_emotion_model.classes, (std::vector{EmotionLabel::anger, EmotionLabel::joy}));
}

TEST(PipelinePersistence, RoundTrip) {
  testutil::TempDir dir;
  auto p = train_pipeline(routing_corpus(), Preprocessor({}, TokenizeMode::segmented));
  save_pipeline(p, dir.file("p.bin"));
  auto back = load_pipeline(dir.file("p.bin"));
  EXPECT_EQ(back, p);
  EXPECT_EQ(back.tokenize_mode, TokenizeMode::segmented);
  auto bytes = testutil::slurp(dir.file("p.bin"));
  EXPECT_THROW(deserialize_pipeline(bytes.substr(0, bytes.size() / 2)), TruncationError);
  bytes[7] = '2';
  EXPECT_THROW(deserialize_pipeline(bytes), FormatError);
}
