#pragma once

// Independent reference implementations used to check the production code.
// Kept deliberately naive: exhaustive enumeration and full-matrix tables.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

namespace oracle {

// DTW by exhaustive enumeration of every monotone boundary-matching
// alignment path with steps (1,0), (0,1), (1,1).
inline double dtw_paths(std::span<const double> a, std::span<const double> b,
                        std::size_t i, std::size_t j, double acc) {
  acc += std::abs(a[i] - b[j]);
  if (i + 1 == a.size() && j + 1 == b.size()) return acc;
  double best = std::numeric_limits<double>::infinity();
  if (i + 1 < a.size()) best = std::min(best, dtw_paths(a, b, i + 1, j, acc));
  if (j + 1 < b.size()) best = std::min(best, dtw_paths(a, b, i, j + 1, acc));
  if (i + 1 < a.size() && j + 1 < b.size()) {
    best = std::min(best, dtw_paths(a, b, i + 1, j + 1, acc));
  }
  return best;
}

inline double dtw_bruteforce(std::span<const double> a,
                             std::span<const double> b) {
  return dtw_paths(a, b, 0, 0, 0.0);
}

// Full-matrix DTW, an implementation route independent of the production
// rolling-table version.
inline double dtw_full_matrix(std::span<const double> a,
                              std::span<const double> b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  std::vector<std::vector<double>> d(n, std::vector<double>(m, 0.0));
  d[0][0] = std::abs(a[0] - b[0]);
  for (std::size_t i = 1; i < n; ++i) d[i][0] = d[i - 1][0] + std::abs(a[i] - b[0]);
  for (std::size_t j = 1; j < m; ++j) d[0][j] = d[0][j - 1] + std::abs(a[0] - b[j]);
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = 1; j < m; ++j) {
      d[i][j] = std::abs(a[i] - b[j]) +
                std::min({d[i - 1][j], d[i][j - 1], d[i - 1][j - 1]});
    }
  }
  return d[n - 1][m - 1];
}

struct LabeledSeries {
  std::vector<double> xs;
  std::vector<double> ys;
  double label;
};

// Brute-force k-NN mean label over a pool, full-matrix DTW per axis, ties by
// pool position.
inline double knn_mean_label(const std::vector<LabeledSeries>& pool,
                             const std::vector<double>& qx,
                             const std::vector<double>& qy, std::size_t k) {
  std::vector<std::pair<double, std::size_t>> scored;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    scored.push_back({dtw_full_matrix(pool[i].xs, qx) +
                          dtw_full_matrix(pool[i].ys, qy),
                      i});
  }
  std::sort(scored.begin(), scored.end());
  const std::size_t take = std::min(k, scored.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < take; ++i) sum += pool[scored[i].second].label;
  return sum / static_cast<double>(take);
}

// Spearman rank correlation; average ranks for ties.
inline double spearman(const std::vector<double>& a,
                       const std::vector<double>& b) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0u);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
    std::vector<double> r(v.size());
    std::size_t i = 0;
    while (i < idx.size()) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
      for (std::size_t q = i; q <= j; ++q) r[idx[q]] = shared;
      i = j + 1;
    }
    return r;
  };
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= n;
  mb /= n;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cov += (ra[i] - ma) * (rb[i] - mb);
    va += (ra[i] - ma) * (ra[i] - ma);
    vb += (rb[i] - mb) * (rb[i] - mb);
  }
  return cov / std::sqrt(va * vb);
}

}  // namespace oracle
