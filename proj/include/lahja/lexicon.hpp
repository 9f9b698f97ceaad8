#ifndef LAHJA_LEXICON_HPP
#define LAHJA_LEXICON_HPP

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "lahja/cluster.hpp"
#include "lahja/corpus.hpp"
#include "lahja/embedding.hpp"
#include "lahja/error.hpp"
#include "lahja/labels.hpp"
#include "lahja/preprocess.hpp"

namespace lahja {

// ---------------------------------------------------------------------------
// Seed lexicon (word, emotion) pairs.

struct SeedLexicon {
  std::map<EmotionLabel, std::set<std::string>> entries;

  const std::set<std::string>& words(EmotionLabel e) const {
    static const std::set<std::string> none;
    auto it = entries.find(e);
    return it == entries.end() ? none : it->second;
  }

  std::set<std::string> all_words() const {
    std::set<std::string> out;
    for (const auto& [e, ws] : entries) out.insert(ws.begin(), ws.end());
    return out;
  }

  std::size_t pair_count() const {
    std::size_t n = 0;
    for (const auto& [e, ws] : entries) n += ws.size();
    return n;
  }

  bool operator==(const SeedLexicon&) const = default;
};

namespace detail {

inline std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

inline std::ifstream open_input(const std::string& path, std::string_view what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + std::string(what) + ": " + path);
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + path);
  return out;
}

} // namespace detail

/// TSV rows "word<TAB>emotion"; words are normalized with `norm`.
inline SeedLexicon parse_seed_lexicon(std::istream& in, const NormalizationConfig& norm = {}) {
  SeedLexicon lex;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = detail::strip_cr(raw);
    if (line.empty()) continue;
    auto cols = detail::split_tabs(line);
    if (cols.size() != 2) throw ParseError(line_no, "seed lexicon rows need 2 columns (word, emotion)");
    auto emotion = parse_emotion(cols[1]);
    auto word = normalize_text(cols[0], norm);
    if (word.empty()) throw ParseError(line_no, "empty seed word");
    lex.entries[emotion].insert(std::move(word));
  }
  if (lex.entries.empty()) throw DataError("seed lexicon is empty");
  return lex;
}

inline SeedLexicon load_seed_lexicon(const std::string& path, const NormalizationConfig& norm = {}) {
  auto in = detail::open_input(path, "seed lexicon");
  return parse_seed_lexicon(in, norm);
}

inline void save_seed_lexicon(const SeedLexicon& lex, const std::string& path) {
  auto out = detail::open_output(path);
  for (const auto& [e, ws] : lex.entries)
    for (const auto& w : ws) out << w << '\t' << to_string(e) << '\n';
}

// ---------------------------------------------------------------------------
// Induced, reviewable dialect lexicons.

struct InductionConfig {
  std::size_t top_n = 10;
  double specificity_ratio = 2.0;
  std::uint64_t min_dialect_freq = 2;
  DbscanConfig dbscan;
  bool restrict_dbscan_to_neighborhood = false;
  std::size_t neighborhood_size = 200; // per emotion, when restricted

  void validate() const {
    if (!(specificity_ratio >= 1.0)) throw ConfigError("specificity_ratio must be >= 1");
    dbscan.validate();
  }
};

enum class CandidateOrigin { top_n, cluster_expansion };
enum class ReviewStatus { candidate, verified, rejected };

inline std::string_view to_string(CandidateOrigin o) {
  return o == CandidateOrigin::top_n ? "top_n" : "cluster_expansion";
}

inline std::string_view to_string(ReviewStatus s) {
  switch (s) {
  case ReviewStatus::verified: return "verified";
  case ReviewStatus::rejected: return "rejected";
  default: return "candidate";
  }
}

inline CandidateOrigin parse_origin(std::string_view s) {
  if (s == "top_n") return CandidateOrigin::top_n;
  if (s == "cluster_expansion") return CandidateOrigin::cluster_expansion;
  throw LabelError(std::string(s));
}

inline ReviewStatus parse_status(std::string_view s) {
  if (s == "candidate") return ReviewStatus::candidate;
  if (s == "verified") return ReviewStatus::verified;
  if (s == "rejected") return ReviewStatus::rejected;
  throw LabelError(std::string(s));
}

struct LexiconCandidate {
  std::string word;
  DialectLabel dialect;
  EmotionLabel emotion;
  double centroid_similarity = 0.0;
  int cluster_id = kNoise;
  CandidateOrigin origin = CandidateOrigin::top_n;
  ReviewStatus status = ReviewStatus::candidate;

  auto key() const { return std::tie(word, dialect, emotion); }
  bool operator==(const LexiconCandidate&) const = default;
};

struct DialectLexicon {
  std::vector<LexiconCandidate> candidates;
  std::string provenance;

  std::set<std::string> words(EmotionLabel e) const {
    std::set<std::string> out;
    for (const auto& c : candidates)
      if (c.emotion == e) out.insert(c.word);
    return out;
  }

  std::set<std::string> verified_words(DialectLabel d, EmotionLabel e) const {
    std::set<std::string> out;
    for (const auto& c : candidates)
      if (c.dialect == d && c.emotion == e && c.status == ReviewStatus::verified) out.insert(c.word);
    return out;
  }

  const LexiconCandidate* find(std::string_view word, DialectLabel d, EmotionLabel e) const {
    for (const auto& c : candidates)
      if (c.word == word && c.dialect == d && c.emotion == e) return &c;
    return nullptr;
  }

  bool operator==(const DialectLexicon&) const = default;
};

inline std::string describe(const InductionConfig& cfg) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "top_n=%zu specificity_ratio=%g min_dialect_freq=%" PRIu64
                " eps=%g min_samples=%zu restrict=%d neighborhood=%zu",
                cfg.top_n, cfg.specificity_ratio, cfg.min_dialect_freq, cfg.dbscan.eps, cfg.dbscan.min_samples,
                cfg.restrict_dbscan_to_neighborhood ? 1 : 0, cfg.neighborhood_size);
  return buf;
}

/// Centroid -> top-n -> density-cluster expansion for each emotion, on a
/// model trained on one dialect's data. Seed words never become candidates.
inline DialectLexicon induce_candidates(const SubwordEmbeddingModel& model, const SeedLexicon& seed,
                                        DialectLabel dialect, const InductionConfig& cfg,
                                        Warnings* warnings = nullptr) {
  cfg.validate();
  if (model.vocab.empty()) throw DataError("cannot induce candidates from an empty vocabulary");
  const EmbeddingIndex index(model);
  const auto seed_words = seed.all_words();

  struct EmotionQuery {
    EmotionLabel emotion;
    Vector centroid;
    std::vector<Neighbor> top;
  };
  std::vector<EmotionQuery> queries;
  for (auto e : kAllEmotions) {
    const auto& words = seed.words(e);
    if (words.empty()) continue;
    CentroidResult c;
    try {
      c = centroid(model, words);
    } catch (const DataError&) {
      warn(warnings, std::string("emotion ") + std::string(to_string(e)) +
                         " skipped: no seed word is in the vocabulary");
      continue;
    }
    if (norm(c.vector) == 0.0) {
      warn(warnings, std::string("emotion ") + std::string(to_string(e)) + " skipped: centroid has zero norm");
      continue;
    }
    queries.push_back({e, std::move(c.vector), {}});
  }

  // Cluster over the whole vocabulary, or only the union of the centroid
  // neighbourhoods when restricted.
  std::vector<std::size_t> point_ids;
  if (cfg.restrict_dbscan_to_neighborhood) {
    std::set<std::size_t> ids;
    for (const auto& q : queries)
      for (const auto& nb : index.top_n(q.centroid, std::max(cfg.neighborhood_size, cfg.top_n), seed_words))
        ids.insert(*model.vocab.find(nb.word));
    point_ids.assign(ids.begin(), ids.end());
  } else {
    for (std::size_t i = 0; i < model.vocab.size(); ++i) point_ids.push_back(i);
  }
  std::vector<int> cluster_of(model.vocab.size(), kNoise);
  std::map<int, std::vector<std::size_t>> members;
  if (!point_ids.empty() && cfg.top_n > 0 && !queries.empty()) {
    std::vector<Vector> points;
    points.reserve(point_ids.size());
    for (auto i : point_ids) points.push_back(index.vector(i));
    auto assignment = dbscan(points, cfg.dbscan);
    for (std::size_t p = 0; p < point_ids.size(); ++p) {
      cluster_of[point_ids[p]] = assignment.labels[p];
      if (assignment.labels[p] != kNoise) members[assignment.labels[p]].push_back(point_ids[p]);
    }
  }

  DialectLexicon out;
  out.provenance = describe(cfg);
  {
    char buf[64];
    std::snprintf(buf, sizeof buf, " model=%016" PRIx64, model_fingerprint(model));
    out.provenance += buf;
  }

  for (auto& q : queries) {
    q.top = index.top_n(q.centroid, cfg.top_n, seed_words);
    std::map<std::size_t, CandidateOrigin> picked;
    for (const auto& nb : q.top) picked[*model.vocab.find(nb.word)] = CandidateOrigin::top_n;
    for (const auto& nb : q.top) {
      int c = cluster_of[*model.vocab.find(nb.word)];
      if (c == kNoise) continue;
      for (auto i : members[c]) picked.emplace(i, CandidateOrigin::cluster_expansion);
    }
    std::vector<LexiconCandidate> cands;
    for (const auto& [i, origin] : picked) {
      const auto& w = model.vocab.word(i);
      if (seed_words.contains(w)) continue;
      cands.push_back({w, dialect, q.emotion, cosine_similarity(q.centroid, index.vector(i)), cluster_of[i], origin,
                       ReviewStatus::candidate});
    }
    std::sort(cands.begin(), cands.end(), [](const auto& a, const auto& b) {
      return a.centroid_similarity != b.centroid_similarity ? a.centroid_similarity > b.centroid_similarity
                                                            : a.word < b.word;
    });
    out.candidates.insert(out.candidates.end(), cands.begin(), cands.end());
  }
  return out;
}

/// Raw token counts for one dialect's corpus.
struct FrequencyTable {
  std::unordered_map<std::string, std::uint64_t> counts;
  std::uint64_t total = 0;

  std::uint64_t count(const std::string& w) const {
    auto it = counts.find(w);
    return it == counts.end() ? 0 : it->second;
  }

  double per_million(const std::string& w) const {
    return total == 0 ? 0.0 : 1e6 * static_cast<double>(count(w)) / static_cast<double>(total);
  }
};

inline FrequencyTable frequency_table(std::span<const TokenSequence> sentences) {
  FrequencyTable t;
  for (const auto& s : sentences)
    for (const auto& w : s) {
      ++t.counts[w];
      ++t.total;
    }
  return t;
}

/// Keeps a candidate when its raw count in its own dialect reaches
/// min_dialect_freq and its per-million rate is at least specificity_ratio
/// times the highest rate in any other dialect.
inline std::map<DialectLabel, DialectLexicon>
specificity_filter(const std::map<DialectLabel, DialectLexicon>& lexicons,
                   const std::map<DialectLabel, FrequencyTable>& frequencies, const InductionConfig& cfg) {
  static const FrequencyTable empty;
  auto table = [&](DialectLabel d) -> const FrequencyTable& {
    auto it = frequencies.find(d);
    return it == frequencies.end() ? empty : it->second;
  };
  std::map<DialectLabel, DialectLexicon> out;
  for (const auto& [dialect, lex] : lexicons) {
    DialectLexicon kept;
    kept.provenance = lex.provenance;
    for (const auto& c : lex.candidates) {
      const auto& own = table(c.dialect);
      if (own.count(c.word) < cfg.min_dialect_freq) continue;
      double own_rate = own.per_million(c.word);
      double other = 0.0;
      for (const auto& [d, t] : frequencies)
        if (d != c.dialect) other = std::max(other, t.per_million(c.word));
      if (other > 0.0 && own_rate < cfg.specificity_ratio * other) continue;
      kept.candidates.push_back(c);
    }
    out.emplace(dialect, std::move(kept));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Review files: TSV word, dialect, emotion, similarity, cluster_id, origin, status.

inline constexpr std::string_view kReviewHeader = "word\tdialect\temotion\tsimilarity\tcluster_id\torigin\tstatus";

inline void write_lexicon(std::ostream& out, const DialectLexicon& lex) {
  if (!lex.provenance.empty()) out << "# " << lex.provenance << '\n';
  out << kReviewHeader << '\n';
  char buf[32];
  for (const auto& c : lex.candidates) {
    std::snprintf(buf, sizeof buf, "%.6f", c.centroid_similarity);
    out << c.word << '\t' << to_string(c.dialect) << '\t' << to_string(c.emotion) << '\t' << buf << '\t'
        << c.cluster_id << '\t' << to_string(c.origin) << '\t' << to_string(c.status) << '\n';
  }
}

inline void emit_review_file(const DialectLexicon& lex, const std::string& path) {
  auto out = detail::open_output(path);
  write_lexicon(out, lex);
}

inline DialectLexicon parse_lexicon(std::istream& in) {
  DialectLexicon lex;
  std::set<std::tuple<std::string, DialectLabel, EmotionLabel>> seen;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = detail::strip_cr(raw);
    if (line.empty()) continue;
    if (line.starts_with("#")) {
      if (lex.provenance.empty()) lex.provenance = std::string(line.substr(line.starts_with("# ") ? 2 : 1));
      continue;
    }
    if (line == kReviewHeader) continue;
    auto cols = detail::split_tabs(line);
    if (cols.size() != 7) throw ParseError(line_no, "lexicon rows need 7 columns");
    LexiconCandidate c;
    c.word = std::string(cols[0]);
    c.dialect = parse_dialect(cols[1]);
    c.emotion = parse_emotion(cols[2]);
    try {
      c.centroid_similarity = std::stod(std::string(cols[3]));
      c.cluster_id = std::stoi(std::string(cols[4]));
    } catch (const std::exception&) {
      throw ParseError(line_no, "malformed similarity or cluster_id");
    }
    c.origin = parse_origin(cols[5]);
    c.status = parse_status(cols[6]);
    if (!seen.emplace(c.word, c.dialect, c.emotion).second)
      throw ParseError(line_no, "duplicate lexicon row for \"" + c.word + "\"");
    lex.candidates.push_back(std::move(c));
  }
  return lex;
}

inline DialectLexicon load_lexicon(const std::string& path) {
  auto in = detail::open_input(path, "lexicon");
  return parse_lexicon(in);
}

/// Applies one or more review rounds. For every row still in `candidate`
/// state, a strict majority of all reviews voting verified (or rejected)
/// decides; rows already decided keep their status.
inline DialectLexicon apply_review(const DialectLexicon& lexicon, std::span<const DialectLexicon> reviews) {
  for (const auto& review : reviews)
    for (const auto& r : review.candidates)
      if (lexicon.find(r.word, r.dialect, r.emotion) == nullptr)
        throw DataError("reviewed row not present in lexicon: " + r.word + " " + std::string(to_string(r.dialect)) +
                        " " + std::string(to_string(r.emotion)));
  DialectLexicon out = lexicon;
  const std::size_t n = reviews.size();
  for (auto& c : out.candidates) {
    if (c.status != ReviewStatus::candidate) continue;
    std::size_t yes = 0, no = 0;
    for (const auto& review : reviews) {
      if (const auto* r = review.find(c.word, c.dialect, c.emotion)) {
        yes += r->status == ReviewStatus::verified;
        no += r->status == ReviewStatus::rejected;
      }
    }
    if (2 * yes > n)
      c.status = ReviewStatus::verified;
    else if (2 * no > n)
      c.status = ReviewStatus::rejected;
  }
  return out;
}

inline DialectLexicon apply_review_files(const DialectLexicon& lexicon, std::span<const std::string> paths) {
  std::vector<DialectLexicon> reviews;
  for (const auto& p : paths) reviews.push_back(load_lexicon(p));
  return apply_review(lexicon, reviews);
}

// ---------------------------------------------------------------------------
// Lexicon labelling.

/// Precomputed emotion word sets per dialect: seed words plus verified
/// dialect-lexicon words.
class LexiconLabeler {
public:
  LexiconLabeler(const SeedLexicon& seed, const std::map<DialectLabel, DialectLexicon>& lexicons) {
    for (auto d : kAllDialects) {
      auto& sets = words_[d];
      for (auto e : kAllEmotions) sets[e] = seed.words(e);
    }
    for (const auto& [d, lex] : lexicons)
      for (const auto& c : lex.candidates)
        if (c.status == ReviewStatus::verified) words_[c.dialect][c.emotion].insert(c.word);
  }

  /// Unique emotion with the most lexicon hits; none on ties or no hits.
  std::optional<EmotionLabel> operator()(const TokenSequence& tokens, DialectLabel dialect) const {
    const auto& sets = words_.at(dialect);
    std::array<std::size_t, kAllEmotions.size()> score{};
    for (const auto& t : tokens)
      for (auto e : kAllEmotions)
        if (sets.at(e).contains(t)) ++score[static_cast<std::size_t>(e)];
    std::size_t best = 0, count = 0;
    std::optional<EmotionLabel> winner;
    for (auto e : kAllEmotions) {
      auto s = score[static_cast<std::size_t>(e)];
      if (s > best) {
        best = s;
        count = 1;
        winner = e;
      } else if (s == best && s > 0) {
        ++count;
      }
    }
    if (best == 0 || count != 1) return std::nullopt;
    return winner;
  }

private:
  std::map<DialectLabel, std::map<EmotionLabel, std::set<std::string>>> words_;
};

inline std::optional<EmotionLabel> label_emotion(const TokenSequence& tokens, DialectLabel dialect,
                                                 const SeedLexicon& seed,
                                                 const std::map<DialectLabel, DialectLexicon>& lexicons) {
  return LexiconLabeler(seed, lexicons)(tokens, dialect);
}

// ---------------------------------------------------------------------------
// Simple voting.

struct VotingTable {
  std::map<std::string, std::set<DialectLabel>> votes;

  void add(std::string word, std::set<DialectLabel> dialects) {
    for (auto d : dialects)
      if (std::find(kVotingDialects.begin(), kVotingDialects.end(), d) == kVotingDialects.end())
        throw DataError("voting table only covers NOR, EGY, IRQ, LEV, GLF; got " + std::string(to_string(d)));
    votes[std::move(word)] = std::move(dialects);
  }

  bool operator==(const VotingTable&) const = default;
};

/// TSV: word then five 0/1 columns ordered NOR, EGY, IRQ, LEV, GLF. A header
/// row naming those columns is skipped.
inline VotingTable parse_voting_table(std::istream& in) {
  VotingTable table;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = detail::strip_cr(raw);
    if (line.empty()) continue;
    auto cols = detail::split_tabs(line);
    if (cols.size() != 6) throw ParseError(line_no, "voting rows need 6 columns (word + NOR EGY IRQ LEV GLF)");
    bool header = true;
    for (std::size_t k = 0; k < 5; ++k) header = header && cols[k + 1] == to_string(kVotingDialects[k]);
    if (header) continue;
    std::set<DialectLabel> ds;
    for (std::size_t k = 0; k < 5; ++k) {
      if (cols[k + 1] == "1")
        ds.insert(kVotingDialects[k]);
      else if (cols[k + 1] != "0")
        throw ParseError(line_no, "voting cells must be 0 or 1");
    }
    table.add(std::string(cols[0]), std::move(ds));
  }
  return table;
}

inline VotingTable load_voting_table(const std::string& path) {
  auto in = detail::open_input(path, "voting table");
  return parse_voting_table(in);
}

inline void write_voting_table(std::ostream& out, const VotingTable& table) {
  out << "word";
  for (auto d : kVotingDialects) out << '\t' << to_string(d);
  out << '\n';
  for (const auto& [w, ds] : table.votes) {
    out << w;
    for (auto d : kVotingDialects) out << '\t' << (ds.contains(d) ? '1' : '0');
    out << '\n';
  }
}

inline void save_voting_table(const VotingTable& table, const std::string& path) {
  auto out = detail::open_output(path);
  write_voting_table(out, table);
}

struct VoteResult {
  std::map<DialectLabel, std::size_t> totals; // one entry per voting dialect
  std::set<DialectLabel> winners;
};

inline VoteResult simple_vote(const TokenSequence& tokens, const VotingTable& table) {
  VoteResult r;
  for (auto d : kVotingDialects) r.totals[d] = 0;
  for (const auto& t : tokens) {
    auto it = table.votes.find(t);
    if (it == table.votes.end()) continue;
    for (auto d : it->second) ++r.totals[d];
  }
  std::size_t best = 0;
  for (const auto& [d, n] : r.totals) best = std::max(best, n);
  for (const auto& [d, n] : r.totals)
    if (n == best) r.winners.insert(d);
  return r;
}

} // namespace lahja

#endif
