#ifndef LAHJA_CLUSTER_HPP
#define LAHJA_CLUSTER_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "lahja/error.hpp"

namespace lahja {

inline constexpr int kNoise = -1;

struct DbscanConfig {
  double eps = 0.5;
  std::size_t min_samples = 9;

  void validate() const {
    if (!(eps > 0.0)) throw ConfigError("dbscan eps must be > 0");
    if (min_samples < 1) throw ConfigError("dbscan min_samples must be >= 1");
  }
};

struct ClusterAssignment {
  std::vector<int> labels; // cluster id >= 0, or kNoise
  int cluster_count = 0;
};

template <class T>
double manhattan_distance(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size())
    throw std::invalid_argument("manhattan_distance: dimension mismatch (" + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(static_cast<double>(a[i]) - static_cast<double>(b[i]));
  return s;
}

inline double manhattan_distance(const std::vector<double>& a, const std::vector<double>& b) {
  return manhattan_distance<double>(a, b);
}

/// Indices j with distance(p_k, p_j) < eps, ascending. Always contains k.
template <class Point>
std::vector<std::size_t> region_query(std::span<const Point> points, std::size_t k, double eps) {
  std::vector<std::size_t> out;
  const auto& pk = points[k];
  for (std::size_t j = 0; j < points.size(); ++j)
    if (j == k || manhattan_distance<double>(pk, points[j]) < eps) out.push_back(j);
  return out;
}

/// Density clustering with the Manhattan metric and a strict `< eps`
/// neighbourhood. Points are visited in input order; a cluster is grown from
/// each unvisited core point, and a point first marked noise can still be
/// adopted as a border point of a later cluster.
template <class Point>
ClusterAssignment dbscan(std::span<const Point> points, const DbscanConfig& cfg) {
  cfg.validate();
  if (points.empty()) throw DataError("dbscan requires at least one point");
  const std::size_t n = points.size();
  ClusterAssignment out;
  out.labels.assign(n, kNoise);
  std::vector<char> visited(n, 0);
  std::vector<char> queued(n, 0);

  for (std::size_t k = 0; k < n; ++k) {
    if (visited[k]) continue;
    visited[k] = 1;
    auto neighbors = region_query(points, k, cfg.eps);
    if (neighbors.size() < cfg.min_samples) continue; // noise unless adopted later

    const int cluster = out.cluster_count++;
    out.labels[k] = cluster;
    std::fill(queued.begin(), queued.end(), 0);
    for (auto j : neighbors) queued[j] = 1;
    for (std::size_t i = 0; i < neighbors.size(); ++i) {
      const std::size_t p = neighbors[i];
      if (!visited[p]) {
        visited[p] = 1;
        auto more = region_query(points, p, cfg.eps);
        if (more.size() >= cfg.min_samples) {
          for (auto j : more) {
            if (!queued[j]) {
              queued[j] = 1;
              neighbors.push_back(j);
            }
          }
        }
      }
      if (out.labels[p] == kNoise) out.labels[p] = cluster;
    }
  }
  return out;
}

template <class Point>
ClusterAssignment dbscan(const std::vector<Point>& points, const DbscanConfig& cfg) {
  return dbscan(std::span<const Point>(points), cfg);
}

} // namespace lahja

#endif
