#ifndef LAHJA_EVAL_HPP
#define LAHJA_EVAL_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lahja/classify.hpp"
#include "lahja/corpus.hpp"
#include "lahja/error.hpp"
#include "lahja/labels.hpp"

namespace lahja {

/// Rows are gold labels, columns predictions.
struct ConfusionMatrix {
  std::vector<std::string> classes;
  std::vector<std::vector<std::uint64_t>> counts;

  std::size_t index_of(const std::string& label) const {
    auto it = std::find(classes.begin(), classes.end(), label);
    if (it == classes.end()) throw DataError("unknown label \"" + label + "\"");
    return static_cast<std::size_t>(it - classes.begin());
  }

  std::uint64_t total() const {
    std::uint64_t n = 0;
    for (const auto& row : counts)
      for (auto x : row) n += x;
    return n;
  }

  std::uint64_t trace() const {
    std::uint64_t n = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) n += counts[i][i];
    return n;
  }

  bool operator==(const ConfusionMatrix&) const = default;
};

inline ConfusionMatrix confusion_matrix(std::span<const std::string> gold, std::span<const std::string> pred,
                                        std::vector<std::string> classes) {
  if (gold.size() != pred.size())
    throw DataError("gold and predicted label lists differ in length (" + std::to_string(gold.size()) + " vs " +
                    std::to_string(pred.size()) + ")");
  ConfusionMatrix cm;
  cm.classes = std::move(classes);
  cm.counts.assign(cm.classes.size(), std::vector<std::uint64_t>(cm.classes.size(), 0));
  for (std::size_t k = 0; k < gold.size(); ++k) ++cm.counts[cm.index_of(gold[k])][cm.index_of(pred[k])];
  return cm;
}

template <class Label>
ConfusionMatrix confusion_matrix(std::span<const Label> gold, std::span<const Label> pred,
                                 std::span<const Label> classes) {
  auto names = [](auto labels) {
    std::vector<std::string> out;
    for (auto l : labels) out.emplace_back(to_string(l));
    return out;
  };
  auto g = names(gold), p = names(pred);
  return confusion_matrix(g, p, names(classes));
}

/// trace / total.
inline double accuracy(const ConfusionMatrix& cm) {
  auto n = cm.total();
  if (n == 0) throw DataError("accuracy of an empty confusion matrix is undefined");
  return static_cast<double>(cm.trace()) / static_cast<double>(n);
}

namespace detail {
inline double ratio_or_zero(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}
} // namespace detail

inline double precision(const ConfusionMatrix& cm, std::size_t c) {
  std::uint64_t col = 0;
  for (const auto& row : cm.counts) col += row[c];
  return detail::ratio_or_zero(cm.counts[c][c], col);
}

inline double recall(const ConfusionMatrix& cm, std::size_t c) {
  std::uint64_t row = 0;
  for (auto x : cm.counts[c]) row += x;
  return detail::ratio_or_zero(cm.counts[c][c], row);
}

inline double f1_from(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

inline double f1(const ConfusionMatrix& cm, std::size_t c) { return f1_from(precision(cm, c), recall(cm, c)); }

inline double precision(const ConfusionMatrix& cm, const std::string& c) { return precision(cm, cm.index_of(c)); }
inline double recall(const ConfusionMatrix& cm, const std::string& c) { return recall(cm, cm.index_of(c)); }
inline double f1(const ConfusionMatrix& cm, const std::string& c) { return f1(cm, cm.index_of(c)); }

struct ClassMetrics {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;
};

struct MetricsReport {
  double accuracy = 0.0;
  std::vector<ClassMetrics> per_class;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
};

inline MetricsReport metrics_report(const ConfusionMatrix& cm) {
  MetricsReport r;
  r.accuracy = accuracy(cm);
  for (std::size_t c = 0; c < cm.classes.size(); ++c) {
    ClassMetrics m{cm.classes[c], precision(cm, c), recall(cm, c), f1(cm, c), 0};
    for (auto x : cm.counts[c]) m.support += x;
    r.macro_precision += m.precision;
    r.macro_recall += m.recall;
    r.macro_f1 += m.f1;
    r.per_class.push_back(std::move(m));
  }
  if (!r.per_class.empty()) {
    const double k = static_cast<double>(r.per_class.size());
    r.macro_precision /= k;
    r.macro_recall /= k;
    r.macro_f1 /= k;
  }
  return r;
}

enum class EvalTarget { dialect, emotion };

inline EvalTarget parse_eval_target(std::string_view s) {
  if (s == "dialect") return EvalTarget::dialect;
  if (s == "emotion") return EvalTarget::emotion;
  throw ConfigError("unknown evaluation target: " + std::string(s));
}

inline std::string_view to_string(EvalTarget t) { return t == EvalTarget::dialect ? "dialect" : "emotion"; }

struct EvaluationResult {
  std::string target;
  MetricsReport report;
  ConfusionMatrix confusion;
};

/// Evaluates already-computed predictions; classes are the union of
/// `classes` and every gold/predicted label, in canonical order.
template <class Label>
EvaluationResult evaluate_predictions(std::span<const Label> gold, std::span<const Label> pred,
                                      std::span<const Label> classes, std::string target) {
  if (gold.empty()) throw DataError("cannot evaluate an empty test set");
  std::set<Label> all(classes.begin(), classes.end());
  all.insert(gold.begin(), gold.end());
  all.insert(pred.begin(), pred.end());
  std::vector<Label> cls(all.begin(), all.end());
  EvaluationResult res;
  res.target = std::move(target);
  res.confusion = confusion_matrix<Label>(gold, pred, cls);
  res.report = metrics_report(res.confusion);
  return res;
}

inline EvaluationResult evaluate_run(const DialectAwarePipeline& pipeline, const Corpus& test, EvalTarget target) {
  if (test.empty()) throw DataError("cannot evaluate an empty test set");
  const auto pre = pipeline.preprocessor();
  std::vector<DialectLabel> gold_d, pred_d;
  std::vector<EmotionLabel> gold_e, pred_e;
  for (const auto& doc : test.documents) {
    auto p = predict_pipeline(pipeline, pre(doc.text));
    if (target == EvalTarget::dialect) {
      if (!doc.dialect) throw DataError("test document " + doc.id + " has no gold dialect");
      gold_d.push_back(*doc.dialect);
      pred_d.push_back(p.dialect);
    } else {
      if (!doc.emotion) throw DataError("test document " + doc.id + " has no gold emotion");
      gold_e.push_back(*doc.emotion);
      pred_e.push_back(p.emotion);
    }
  }
  if (target == EvalTarget::dialect)
    return evaluate_predictions<DialectLabel>(gold_d, pred_d, pipeline.dialect_model.classes, "dialect");
  return evaluate_predictions<EmotionLabel>(gold_e, pred_e, pipeline.general_emotion_model.classes, "emotion");
}

// ---------------------------------------------------------------------------
// Dialect-aware vs general emotion classifier.

struct AwareComparisonRow {
  DialectLabel dialect;
  std::size_t documents = 0;
  double aware_accuracy = 0.0;
  double general_accuracy = 0.0;
  double difference() const { return aware_accuracy - general_accuracy; }
};

struct AwareComparison {
  std::vector<AwareComparisonRow> rows;
};

/// Per gold dialect: emotion accuracy of the routed pipeline (dialect
/// predicted, then its emotion model) against the general model alone.
inline AwareComparison compare_dialect_aware(const DialectAwarePipeline& pipeline, const Corpus& test,
                                             Warnings* warnings = nullptr) {
  const auto pre = pipeline.preprocessor();
  std::map<DialectLabel, std::array<std::size_t, 3>> tally; // n, aware hits, general hits
  for (const auto& doc : test.documents) {
    if (!doc.dialect || !doc.emotion)
      throw DataError("test document " + doc.id + " needs gold dialect and emotion");
    auto tokens = pre(doc.text);
    auto aware = predict_pipeline(pipeline, tokens);
    auto general = nb_predict(pipeline.general_emotion_model, tokens);
    auto& t = tally[*doc.dialect];
    ++t[0];
    t[1] += aware.emotion == *doc.emotion;
    t[2] += general.label == *doc.emotion;
  }
  AwareComparison out;
  for (auto d : kAllDialects) {
    auto it = tally.find(d);
    if (it == tally.end()) {
      if (pipeline.dialect_model.classes.end() !=
          std::find(pipeline.dialect_model.classes.begin(), pipeline.dialect_model.classes.end(), d))
        warn(warnings, "no test documents for dialect " + std::string(to_string(d)) + "; skipped");
      continue;
    }
    const auto& [n, a, g] = it->second;
    out.rows.push_back({d, n, static_cast<double>(a) / static_cast<double>(n),
                        static_cast<double>(g) / static_cast<double>(n)});
  }
  if (out.rows.empty()) throw DataError("cannot compare on an empty test set");
  return out;
}

// ---------------------------------------------------------------------------
// Report serialization.

inline nlohmann::ordered_json to_json(const EvaluationResult& r) {
  nlohmann::ordered_json j;
  j["target"] = r.target;
  j["accuracy"] = r.report.accuracy;
  j["macro_precision"] = r.report.macro_precision;
  j["macro_recall"] = r.report.macro_recall;
  j["macro_f1"] = r.report.macro_f1;
  auto& pc = j["per_class"] = nlohmann::ordered_json::array();
  for (const auto& m : r.report.per_class)
    pc.push_back({{"label", m.label}, {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1},
                  {"support", m.support}});
  j["confusion"] = {{"classes", r.confusion.classes}, {"counts", r.confusion.counts}};
  return j;
}

inline nlohmann::ordered_json to_json(const AwareComparison& c) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& r : c.rows) {
    const std::string d(to_string(r.dialect));
    rows.push_back({{"model", "aware_" + d}, {"dialect", d}, {"accuracy", r.aware_accuracy}, {"documents", r.documents}});
    rows.push_back({{"model", "general"}, {"dialect", d}, {"accuracy", r.general_accuracy}, {"documents", r.documents}});
  }
  nlohmann::ordered_json diffs = nlohmann::ordered_json::object();
  for (const auto& r : c.rows) diffs[std::string(to_string(r.dialect))] = r.difference();
  return {{"rows", rows}, {"difference", diffs}};
}

namespace detail {
inline std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}
} // namespace detail

/// Aligned plain-text summary followed by a per-class precision table.
inline void write_text_report(std::ostream& out, const EvaluationResult& r) {
  char line[160];
  out << "target: " << r.target << '\n';
  out << "accuracy: " << detail::fmt("%.4f", r.report.accuracy) << '\n';
  std::snprintf(line, sizeof line, "%-10s %9s %9s %9s %8s\n", "class", "precision", "recall", "f1", "support");
  out << line;
  for (const auto& m : r.report.per_class) {
    std::snprintf(line, sizeof line, "%-10s %9.4f %9.4f %9.4f %8llu\n", m.label.c_str(), m.precision, m.recall, m.f1,
                  static_cast<unsigned long long>(m.support));
    out << line;
  }
  std::snprintf(line, sizeof line, "%-10s %9.4f %9.4f %9.4f\n", "macro", r.report.macro_precision,
                r.report.macro_recall, r.report.macro_f1);
  out << line << '\n';
  std::snprintf(line, sizeof line, "%-10s %9s\n", r.target == "emotion" ? "Emotion" : "Dialect", "Precision");
  out << line;
  for (const auto& m : r.report.per_class) {
    std::snprintf(line, sizeof line, "%-10s %8.1f%%\n", m.label.c_str(), 100.0 * m.precision);
    out << line;
  }
}

inline void write_text_report(std::ostream& out, const AwareComparison& c) {
  char line[160];
  std::snprintf(line, sizeof line, "%-12s %-8s %9s\n", "Model", "Dialect", "Accuracy");
  out << line;
  for (const auto& r : c.rows) {
    const std::string d(to_string(r.dialect));
    std::snprintf(line, sizeof line, "%-12s %-8s %8.1f%%\n", ("aware_" + d).c_str(), d.c_str(),
                  100.0 * r.aware_accuracy);
    out << line;
    std::snprintf(line, sizeof line, "%-12s %-8s %8.1f%%\n", "general", d.c_str(), 100.0 * r.general_accuracy);
    out << line;
  }
  for (const auto& r : c.rows) {
    std::snprintf(line, sizeof line, "difference %-8s %+8.1f pp\n", std::string(to_string(r.dialect)).c_str(),
                  100.0 * r.difference());
    out << line;
  }
}

inline void write_confusion_csv(std::ostream& out, const ConfusionMatrix& cm) {
  out << "gold\\predicted";
  for (const auto& c : cm.classes) out << ',' << c;
  out << '\n';
  for (std::size_t i = 0; i < cm.classes.size(); ++i) {
    out << cm.classes[i];
    for (auto x : cm.counts[i]) out << ',' << x;
    out << '\n';
  }
}

} // namespace lahja

#endif
