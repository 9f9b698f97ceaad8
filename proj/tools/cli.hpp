#ifndef LAHJA_TOOLS_CLI_HPP
#define LAHJA_TOOLS_CLI_HPP

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lahja/lahja.hpp"

namespace lahja::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

namespace detail {

class OutputFile {
public:
  OutputFile(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      stream_ = &fallback;
    } else {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw DataError("cannot open for writing: " + path);
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }

private:
  std::ofstream file_;
  std::ostream* stream_;
};

template <class T>
void override_with(T& field, const std::optional<T>& flag) {
  if (flag) field = *flag;
}

inline std::vector<std::string> split_list(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

} // namespace detail

/// All subcommands of the `lahja` tool. Data goes to files or `out`;
/// diagnostics, warnings and the resolved configuration go to `err`.
class Application {
public:
  Application(std::ostream& out, std::ostream& err) : out_(out), err_(err) { build(); }

  int run(int argc, const char* const* argv) {
    try {
      app_.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      // --help lands here with exit code 0.
      if (e.get_exit_code() == 0) return app_.exit(e, out_, err_) == 0 ? kOk : kUsage;
      CLI::App* sub = &app_;
      while (!sub->get_subcommands().empty()) sub = sub->get_subcommands().front();
      err_ << "error: " << e.what() << '\n' << sub->help();
      return kUsage;
    }
    try {
      resolve_config();
      echo_config();
      handler_();
      flush_warnings();
      return kOk;
    } catch (const ConfigError& e) {
      flush_warnings();
      err_ << "error: " << e.what() << '\n';
      return kUsage;
    } catch (const DataError& e) {
      flush_warnings();
      err_ << "error: " << e.what() << '\n';
      return kData;
    } catch (const std::exception& e) {
      flush_warnings();
      err_ << "internal error: " << e.what() << '\n';
      return kInternal;
    }
  }

  const RunConfig& config() const noexcept { return cfg_; }

private:
  // ---- global ----
  std::optional<std::uint64_t> seed_;
  std::string config_path_;
  std::optional<std::string> format_;

  // ---- shared per-command flags ----
  std::string input_, output_, tokens_path_, embedding_path_, model_path_, test_path_, lexicon_path_;
  std::string seed_lexicon_path_, text_out_, confusion_csv_, split_prefix_, seed_lexicon_out_, voting_out_;
  std::optional<std::string> mode_, dialect_, target_;
  std::vector<std::string> reviews_, lexicons_;

  std::optional<std::uint32_t> dim_, epochs_, min_count_, window_, negatives_, minn_, maxn_, bucket_;
  std::optional<double> lr_, eps_, alpha_, specificity_ratio_;
  std::optional<std::size_t> min_samples_, top_n_, min_per_class_;
  std::optional<bool> restrict_;
  unsigned threads_ = 1;
  std::string corpus_for_specificity_;

  // ---- synth ----
  SynthSpec synth_;
  std::string synth_dialects_ = "EGY,GLF", synth_emotions_ = "anger,disgust,fear,joy,sadness,surprise";
  std::string synth_cue_mode_ = "global";
  std::vector<std::string> synth_overlaps_;

  CLI::App app_{"lahja: dialect-aware Arabic emotion lexicon induction and classification"};
  std::function<void()> handler_;
  RunConfig cfg_;
  Warnings warnings_;
  std::ostream& out_;
  std::ostream& err_;

  void flush_warnings() {
    for (const auto& w : warnings_) err_ << "warning: " << w << '\n';
    warnings_.clear();
  }

  void resolve_config() {
    if (!config_path_.empty()) cfg_ = load_run_config(config_path_);
    if (seed_) cfg_.apply_seed(*seed_);
    if (format_) cfg_.format = parse_corpus_format(*format_);
    auto& e = cfg_.embedding;
    detail::override_with(e.dimension, dim_);
    detail::override_with(e.epochs, epochs_);
    detail::override_with(e.min_count, min_count_);
    detail::override_with(e.window_size, window_);
    detail::override_with(e.negative_samples, negatives_);
    detail::override_with(e.char_ngram_min, minn_);
    detail::override_with(e.char_ngram_max, maxn_);
    detail::override_with(e.bucket_count, bucket_);
    detail::override_with(e.learning_rate, lr_);
    detail::override_with(cfg_.induction.dbscan.eps, eps_);
    detail::override_with(cfg_.induction.dbscan.min_samples, min_samples_);
    detail::override_with(cfg_.induction.top_n, top_n_);
    detail::override_with(cfg_.induction.specificity_ratio, specificity_ratio_);
    detail::override_with(cfg_.induction.restrict_dbscan_to_neighborhood, restrict_);
    detail::override_with(cfg_.classifier.alpha, alpha_);
    detail::override_with(cfg_.classifier.min_per_class, min_per_class_);
    if (mode_) cfg_.tokenize_mode = parse_tokenize_mode(*mode_);
    cfg_.validate();
  }

  void echo_config() { err_ << "# resolved config: " << to_json(cfg_).dump() << '\n'; }

  Preprocessor preprocessor() const { return Preprocessor(cfg_.normalization, cfg_.tokenize_mode); }

  Corpus load(const std::string& path) { return load_corpus(path, cfg_.format, &warnings_); }

  void on(CLI::App* sub, std::function<void()> fn) {
    sub->callback([this, fn = std::move(fn)] { handler_ = fn; });
  }

  void add_global() {
    app_.add_option("--seed", seed_, "Seed for every randomized step")->group("Global");
    app_.add_option("--config", config_path_, "Versioned JSON run configuration")->group("Global");
    app_.add_option("--format", format_, "Corpus format: tsv or jsonl")->group("Global");
    app_.require_subcommand(1);
    app_.fallthrough();
  }

  void add_embedding_flags(CLI::App* sub) {
    sub->add_option("--dim", dim_, "Embedding dimension");
    sub->add_option("--epochs", epochs_, "Training epochs");
    sub->add_option("--min-count", min_count_, "Minimum word frequency");
    sub->add_option("--lr", lr_, "Initial learning rate");
    sub->add_option("--window", window_, "Context window size");
    sub->add_option("--negatives", negatives_, "Negative samples per pair");
    sub->add_option("--minn", minn_, "Shortest character n-gram");
    sub->add_option("--maxn", maxn_, "Longest character n-gram (0 disables subwords)");
    sub->add_option("--bucket", bucket_, "Number of n-gram hash buckets");
  }

  void build() {
    add_global();

    // preprocess
    auto* pre = app_.add_subcommand("preprocess", "Write one space-joined token line per document");
    pre->add_option("--input", input_, "Corpus file")->required();
    pre->add_option("--out", output_, "Output file (default stdout)");
    pre->add_option("--mode", mode_, "whitespace or segmented");
    on(pre, [this] {
      auto corpus = load(input_);
      detail::OutputFile out(output_, out_);
      auto p = preprocessor();
      for (const auto& doc : corpus.documents) *out << join_tokens(p(doc, &warnings_)) << '\n';
    });

    // train-embedding
    auto* te = app_.add_subcommand("train-embedding", "Train subword skip-gram embeddings");
    te->add_option("--input", input_, "Corpus file");
    te->add_option("--tokens", tokens_path_, "Pre-tokenized file (one document per line)");
    te->add_option("--dialect", dialect_, "Only use documents of this dialect (requires --input)");
    te->add_option("--out", output_, "Binary model output")->required();
    te->add_option("--text-out", text_out_, "Also export composed vectors as text");
    te->add_option("--mode", mode_, "whitespace or segmented");
    te->add_option("--threads", threads_, "Parallel (non-deterministic) training threads");
    add_embedding_flags(te);
    on(te, [this] { train_embedding(); });

    // cluster
    auto* cl = app_.add_subcommand("cluster", "DBSCAN over the composed vocabulary vectors");
    cl->add_option("--embedding", embedding_path_, "Binary embedding model")->required();
    cl->add_option("--out", output_, "TSV word, cluster_id (default stdout)");
    cl->add_option("--eps", eps_, "Neighbourhood radius (Manhattan)");
    cl->add_option("--min-samples", min_samples_, "Core-point threshold");
    on(cl, [this] {
      auto model = load_embedding(embedding_path_);
      EmbeddingIndex index(model);
      auto assignment = dbscan(index.vectors(), cfg_.induction.dbscan);
      detail::OutputFile out(output_, out_);
      for (std::size_t i = 0; i < model.vocab.size(); ++i)
        *out << model.vocab.word(i) << '\t' << assignment.labels[i] << '\n';
      err_ << "clusters: " << assignment.cluster_count << '\n';
    });

    // induce-lexicon
    auto* il = app_.add_subcommand("induce-lexicon", "Induce dialect-specific emotion candidates");
    il->add_option("--dialect", dialect_, "Dialect the embedding was trained on")->required();
    il->add_option("--embedding", embedding_path_, "Binary embedding model")->required();
    il->add_option("--seed-lexicon", seed_lexicon_path_, "Seed lexicon TSV (word, emotion)")->required();
    il->add_option("--out", output_, "Candidate/review TSV")->required();
    il->add_option("--corpus", corpus_for_specificity_, "Multi-dialect corpus enabling the specificity filter");
    il->add_option("--top-n", top_n_, "Nearest words per emotion centroid");
    il->add_option("--eps", eps_, "DBSCAN radius");
    il->add_option("--min-samples", min_samples_, "DBSCAN core threshold");
    il->add_option("--specificity-ratio", specificity_ratio_, "Own/other frequency ratio");
    il->add_option("--restrict", restrict_, "Cluster only the centroid neighbourhoods (true/false)");
    on(il, [this] { induce(); });

    // review apply
    auto* rv = app_.add_subcommand("review", "Native-speaker review workflow");
    rv->require_subcommand(1);
    auto* ra = rv->add_subcommand("apply", "Apply one or more edited review files (majority rule)");
    ra->add_option("--lexicon", lexicon_path_, "Candidate TSV")->required();
    ra->add_option("--review", reviews_, "Edited review TSV (repeatable)")->required();
    ra->add_option("--out", output_, "Updated lexicon TSV")->required();
    on(ra, [this] {
      auto lex = load_lexicon(lexicon_path_);
      auto updated = apply_review_files(lex, reviews_);
      emit_review_file(updated, output_);
      std::size_t verified = 0;
      for (const auto& c : updated.candidates) verified += c.status == ReviewStatus::verified;
      err_ << "verified: " << verified << " of " << updated.candidates.size() << '\n';
    });

    // train
    auto* tr = app_.add_subcommand("train", "Train the dialect-aware classifier pipeline");
    tr->add_option("--train", input_, "Training corpus")->required();
    tr->add_option("--out", output_, "Pipeline output file")->required();
    tr->add_option("--seed-lexicon", seed_lexicon_path_, "Seed lexicon for silver emotion labels");
    tr->add_option("--lexicon", lexicons_, "Reviewed dialect lexicon TSV (repeatable)");
    tr->add_option("--alpha", alpha_, "Additive smoothing");
    tr->add_option("--min-per-class", min_per_class_, "Documents per emotion class for a dialect model");
    tr->add_option("--mode", mode_, "whitespace or segmented");
    on(tr, [this] { train(); });

    // predict
    auto* pr = app_.add_subcommand("predict", "Predict dialect and emotion per document");
    pr->add_option("--model", model_path_, "Pipeline file")->required();
    pr->add_option("--input", input_, "Corpus file")->required();
    pr->add_option("--out", output_, "TSV id, dialect, emotion, route (default stdout)");
    on(pr, [this] {
      auto p = load_pipeline(model_path_);
      auto corpus = load(input_);
      auto pre = p.preprocessor();
      detail::OutputFile out(output_, out_);
      for (const auto& doc : corpus.documents) {
        auto r = predict_pipeline(p, pre(doc, &warnings_));
        *out << doc.id << '\t' << to_string(r.dialect) << '\t' << to_string(r.emotion) << '\t'
             << (r.diagnostics.fallback ? std::string("general") : std::string(to_string(*r.diagnostics.routed_to)))
             << '\n';
      }
    });

    // evaluate
    auto* ev = app_.add_subcommand("evaluate", "Metrics and confusion matrix on a labelled test set");
    ev->add_option("--model", model_path_, "Pipeline file")->required();
    ev->add_option("--test", test_path_, "Test corpus")->required();
    ev->add_option("--target", target_, "dialect or emotion")->required();
    ev->add_option("--out", output_, "Metrics JSON (default: printed after the table)");
    ev->add_option("--confusion-csv", confusion_csv_, "Confusion matrix CSV");
    on(ev, [this] {
      auto p = load_pipeline(model_path_);
      auto res = evaluate_run(p, load(test_path_), parse_eval_target(*target_));
      write_text_report(out_, res);
      auto j = to_json(res).dump(2);
      if (output_.empty()) {
        out_ << j << '\n';
      } else {
        detail::OutputFile out(output_, out_);
        *out << j << '\n';
      }
      if (!confusion_csv_.empty()) {
        detail::OutputFile csv(confusion_csv_, out_);
        write_confusion_csv(*csv, res.confusion);
      }
    });

    // compare-aware
    auto* ca = app_.add_subcommand("compare-aware", "Dialect-aware vs general emotion accuracy per dialect");
    ca->add_option("--model", model_path_, "Pipeline file")->required();
    ca->add_option("--test", test_path_, "Test corpus with gold dialect and emotion")->required();
    ca->add_option("--out", output_, "Comparison JSON (default: printed after the table)");
    on(ca, [this] {
      auto p = load_pipeline(model_path_);
      auto cmp = compare_dialect_aware(p, load(test_path_), &warnings_);
      write_text_report(out_, cmp);
      auto j = to_json(cmp).dump(2);
      if (output_.empty()) {
        out_ << j << '\n';
      } else {
        detail::OutputFile out(output_, out_);
        *out << j << '\n';
      }
    });

    // split
    auto* sp = app_.add_subcommand("split", "Seeded stratified train/valid/test split");
    sp->add_option("--input", input_, "Corpus file")->required();
    sp->add_option("--out-prefix", split_prefix_, "Writes PREFIX.train/.valid/.test")->required();
    on(sp, [this] { write_split(load(input_), split_prefix_); });

    // synth
    auto* sy = app_.add_subcommand("synth", "Generate a deterministic synthetic labelled corpus");
    sy->add_option("--out", output_, "Corpus output (default stdout)");
    sy->add_option("--dialects", synth_dialects_, "Comma-separated dialect codes");
    sy->add_option("--emotions", synth_emotions_, "Comma-separated emotion codes");
    sy->add_option("--docs-per-cell", synth_.docs_per_cell, "Documents per (dialect, emotion)");
    sy->add_option("--vocab-per-dialect", synth_.vocab_per_dialect, "Marker tokens per dialect");
    sy->add_option("--shared-vocab", synth_.shared_vocab, "Shared filler tokens");
    sy->add_option("--cue-mode", synth_cue_mode_, "global or dialect_conditional");
    sy->add_option("--cue-strength", synth_.cue_strength, "Probability a cue matches the label");
    sy->add_option("--min-length", synth_.min_length, "Minimum tokens per document");
    sy->add_option("--max-length", synth_.max_length, "Maximum tokens per document");
    sy->add_option("--filler-fraction", synth_.filler_fraction, "Per-slot filler probability");
    sy->add_option("--cue-fraction", synth_.cue_fraction, "Per-slot cue probability");
    sy->add_option("--cues-per-emotion", synth_.cues_per_emotion, "Cue tokens per emotion");
    sy->add_option("--overlap", synth_overlaps_, "Marker overlap A:B:fraction (repeatable)");
    sy->add_option("--seed-lexicon-out", seed_lexicon_out_, "Write the planted seed lexicon");
    sy->add_option("--voting-out", voting_out_, "Write the ground-truth voting table");
    sy->add_option("--split-prefix", split_prefix_, "Also write PREFIX.train/.valid/.test");
    on(sy, [this] { synth(); });
  }

  void train_embedding() {
    std::vector<TokenSequence> sentences;
    if (!tokens_path_.empty()) {
      if (dialect_) throw ConfigError("--dialect needs --input, not --tokens");
      std::ifstream in(tokens_path_, std::ios::binary);
      if (!in) throw DataError("cannot open tokens file: " + tokens_path_);
      std::string line;
      while (std::getline(in, line)) sentences.push_back(tokenize(line));
    } else if (!input_.empty()) {
      auto corpus = load(input_);
      auto p = preprocessor();
      std::optional<DialectLabel> only;
      if (dialect_) only = parse_dialect(*dialect_);
      for (const auto& doc : corpus.documents)
        if (!only || doc.dialect == only) sentences.push_back(p(doc, &warnings_));
    } else {
      throw ConfigError("train-embedding needs --input or --tokens");
    }
    TrainStats stats;
    auto model = train_skipgram(sentences, cfg_.embedding, &stats, TrainOptions{threads_});
    save_embedding(model, output_);
    if (!text_out_.empty()) {
      detail::OutputFile out(text_out_, out_);
      export_text_vectors(model, *out);
    }
    err_ << "vocabulary: " << model.vocab.size() << ", pairs/epoch: " << stats.pairs_per_epoch << '\n';
    for (std::size_t i = 0; i < stats.epoch_mean_loss.size(); ++i)
      err_ << "epoch " << i + 1 << " mean loss " << stats.epoch_mean_loss[i] << '\n';
  }

  void induce() {
    const auto dialect = parse_dialect(*dialect_);
    auto model = load_embedding(embedding_path_);
    auto seed = load_seed_lexicon(seed_lexicon_path_, cfg_.normalization);
    auto lex = induce_candidates(model, seed, dialect, cfg_.induction, &warnings_);
    if (!corpus_for_specificity_.empty()) {
      auto corpus = load(corpus_for_specificity_);
      auto p = preprocessor();
      std::map<DialectLabel, std::vector<TokenSequence>> by_dialect;
      for (const auto& doc : corpus.documents)
        if (doc.dialect) by_dialect[*doc.dialect].push_back(p(doc.text));
      std::map<DialectLabel, FrequencyTable> freqs;
      for (const auto& [d, s] : by_dialect) freqs.emplace(d, frequency_table(s));
      std::size_t before = lex.candidates.size();
      lex = specificity_filter({{dialect, lex}}, freqs, cfg_.induction).at(dialect);
      err_ << "specificity filter kept " << lex.candidates.size() << " of " << before << '\n';
    }
    emit_review_file(lex, output_);
    err_ << "candidates: " << lex.candidates.size() << '\n';
  }

  void train() {
    auto corpus = load(input_);
    std::optional<SilverLabelSource> silver;
    if (!seed_lexicon_path_.empty()) {
      silver.emplace();
      silver->seed = load_seed_lexicon(seed_lexicon_path_, cfg_.normalization);
      for (const auto& path : lexicons_)
        for (auto& c : load_lexicon(path).candidates) silver->lexicons[c.dialect].candidates.push_back(c);
    } else if (!lexicons_.empty()) {
      throw ConfigError("--lexicon requires --seed-lexicon");
    }
    TrainingSummary summary;
    auto p = train_pipeline(corpus, preprocessor(), cfg_.classifier, silver ? &*silver : nullptr, &summary, &warnings_);
    save_pipeline(p, output_);
    err_ << "documents: " << summary.documents << ", gold emotions: " << summary.gold_emotion
         << ", silver emotions: " << summary.silver_emotion << ", excluded: " << summary.excluded_from_emotion
         << ", per-dialect emotion models: " << p.emotion_models.size() << '\n';
  }

  void write_split(const Corpus& corpus, const std::string& prefix) {
    auto parts = split_corpus(corpus, cfg_.split);
    const char* ext = cfg_.format == CorpusFormat::tsv ? ".tsv" : ".jsonl";
    save_corpus(prefix + ".train" + ext, parts.train, cfg_.format);
    save_corpus(prefix + ".valid" + ext, parts.valid, cfg_.format);
    save_corpus(prefix + ".test" + ext, parts.test, cfg_.format);
    err_ << "split sizes: " << parts.train.size() << '/' << parts.valid.size() << '/' << parts.test.size() << '\n';
  }

  void synth() {
    SynthSpec spec = synth_;
    spec.seed = cfg_.seed;
    spec.dialects.clear();
    for (const auto& d : detail::split_list(synth_dialects_)) spec.dialects.push_back(parse_dialect(d));
    spec.emotions.clear();
    for (const auto& e : detail::split_list(synth_emotions_)) spec.emotions.push_back(parse_emotion(e));
    spec.emotion_cue_mode = parse_cue_mode(synth_cue_mode_);
    for (const auto& o : synth_overlaps_) {
      auto parts = detail::split_list(o, ':');
      if (parts.size() != 3) throw ConfigError("--overlap expects A:B:fraction, got " + o);
      double f = 0.0;
      try {
        f = std::stod(parts[2]);
      } catch (const std::exception&) {
        throw ConfigError("--overlap fraction is not a number: " + parts[2]);
      }
      spec.marker_overlap.push_back({parse_dialect(parts[0]), parse_dialect(parts[1]), f});
    }
    auto res = generate(spec);
    {
      detail::OutputFile out(output_, out_);
      write_corpus(*out, res.corpus, cfg_.format);
    }
    if (!seed_lexicon_out_.empty()) save_seed_lexicon(res.seed, seed_lexicon_out_);
    if (!voting_out_.empty()) save_voting_table(res.voting, voting_out_);
    if (!split_prefix_.empty()) write_split(res.corpus, split_prefix_);
    err_ << "documents: " << res.corpus.size() << '\n';
  }
};

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  Application app(out, err);
  return app.run(argc, argv);
}

} // namespace lahja::cli

#endif
