#ifndef LAHJA_TESTS_ORACLES_HPP
#define LAHJA_TESTS_ORACLES_HPP

// Independent reference implementations used to check the library. They are
// deliberately naive and share no code paths with include/lahja.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

namespace oracle {

using Point = std::vector<double>;

inline double l1(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i] - b[i]);
  return s;
}

// Textbook DBSCAN by graph components. Core points are those with at least
// min_samples points (self included) strictly closer than eps. Clusters are
// the connected components of the core-core graph, numbered by their
// smallest core index. A border point joins the adjacent component whose
// smallest core index is lowest: with points visited in input order, that
// cluster is expanded first and claims it. Everything else is noise (-1).
inline std::vector<int> dbscan(const std::vector<Point>& pts, double eps, std::size_t min_samples) {
  const std::size_t n = pts.size();
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  std::vector<bool> core(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t deg = 0;
    for (std::size_t j = 0; j < n; ++j) {
      adj[i][j] = i == j || l1(pts[i], pts[j]) < eps;
      deg += adj[i][j];
    }
    core[i] = deg >= min_samples;
  }

  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (core[i] && core[j] && adj[i][j]) parent[find(i)] = find(j);

  std::map<std::size_t, std::size_t> min_core; // root -> smallest core index
  for (std::size_t i = 0; i < n; ++i)
    if (core[i]) {
      auto r = find(i);
      if (!min_core.contains(r)) min_core[r] = i;
    }
  std::vector<std::size_t> order;
  for (auto [r, m] : min_core) order.push_back(m);
  std::sort(order.begin(), order.end());
  std::map<std::size_t, int> id_of_root;
  for (std::size_t k = 0; k < order.size(); ++k) id_of_root[find(order[k])] = static_cast<int>(k);

  std::vector<int> label(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) {
      label[i] = id_of_root[find(i)];
      continue;
    }
    int best = -1;
    for (std::size_t j = 0; j < n; ++j)
      if (core[j] && adj[i][j]) {
        int id = id_of_root[find(j)];
        if (best < 0 || id < best) best = id;
      }
    label[i] = best;
  }
  return label;
}

// Partition of point indices into clusters plus the noise set; comparing two
// of these ignores cluster numbering.
struct Partition {
  std::set<std::set<std::size_t>> clusters;
  std::set<std::size_t> noise;
  bool operator==(const Partition&) const = default;
};

inline Partition partition(const std::vector<int>& labels) {
  std::map<int, std::set<std::size_t>> by;
  Partition p;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0)
      p.noise.insert(i);
    else
      by[labels[i]].insert(i);
  }
  for (auto& [id, s] : by) p.clusters.insert(s);
  return p;
}

// Multinomial NB by direct summation over raw token strings.
// Returns log P(c) + sum over query tokens of log P(t | c) for each class in
// `classes`; query tokens outside the training vocabulary are ignored.
inline std::vector<double> nb_log_scores(const std::vector<std::vector<std::string>>& docs,
                                         const std::vector<std::string>& labels,
                                         const std::vector<std::string>& classes,
                                         const std::vector<std::string>& query, double alpha) {
  std::set<std::string> vocab;
  for (const auto& d : docs) vocab.insert(d.begin(), d.end());
  std::vector<double> out;
  for (const auto& c : classes) {
    double n_docs = 0, n_class = 0;
    double tokens_in_class = 0;
    std::map<std::string, double> count;
    for (std::size_t i = 0; i < docs.size(); ++i) {
      n_docs += 1;
      if (labels[i] != c) continue;
      n_class += 1;
      for (const auto& t : docs[i]) {
        count[t] += 1;
        tokens_in_class += 1;
      }
    }
    double s = std::log(n_class / n_docs);
    for (const auto& t : query) {
      if (!vocab.contains(t)) continue;
      s += std::log((count[t] + alpha) / (tokens_in_class + alpha * static_cast<double>(vocab.size())));
    }
    out.push_back(s);
  }
  return out;
}

// Negative-sampling loss written straight from its definition:
// -log sigma(u_0 . h) - sum_{j>0} log sigma(-u_j . h).
inline double sgns_loss(const std::vector<double>& h, const std::vector<std::vector<double>>& outputs) {
  double loss = 0.0;
  for (std::size_t j = 0; j < outputs.size(); ++j) {
    double dot = 0.0;
    for (std::size_t k = 0; k < h.size(); ++k) dot += h[k] * outputs[j][k];
    double z = j == 0 ? dot : -dot;
    loss -= std::log(1.0 / (1.0 + std::exp(-z)));
  }
  return loss;
}

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

// Exhaustive ranking: every word scored, full sort, first n kept.
inline std::vector<std::string> brute_top_n(const std::vector<std::string>& words,
                                            const std::vector<std::vector<double>>& vecs,
                                            const std::vector<double>& query, std::size_t n,
                                            const std::set<std::string>& exclude) {
  std::vector<std::pair<double, std::string>> all;
  for (std::size_t i = 0; i < words.size(); ++i)
    if (!exclude.contains(words[i])) all.push_back({-cosine(query, vecs[i]), words[i]});
  std::sort(all.begin(), all.end());
  std::vector<std::string> out;
  for (std::size_t i = 0; i < std::min(n, all.size()); ++i) out.push_back(all[i].second);
  return out;
}

// Binary accuracy straight from outcome counts: (TP + TN) / all.
inline double binary_accuracy(double tp, double tn, double fp, double fn) { return (tp + tn) / (tp + tn + fp + fn); }

} // namespace oracle

#endif
