#include "passval/knn_index.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "passval/csv.hpp"
#include "passval/parallel.hpp"

namespace passval {

int GridSpec::cols() const {
  return static_cast<int>(std::ceil(kPitchLength / cell_length));
}

int GridSpec::rows() const {
  return static_cast<int>(std::ceil(kPitchWidth / cell_width));
}

GridCell cell_of(const GridSpec& grid, PitchPoint p) {
  if (!(p.x >= 0.0 && p.x <= kPitchLength && p.y >= 0.0 && p.y <= kPitchWidth)) {
    throw ValidationError("cell_of: point outside the pitch: (" +
                          csv::fmt(p.x) + ", " + csv::fmt(p.y) + ")");
  }
  // Far boundary points clamp into the last band.
  const int col = std::min(static_cast<int>(p.x / grid.cell_length),
                           grid.cols() - 1);
  const int row = std::min(static_cast<int>(p.y / grid.cell_width),
                           grid.rows() - 1);
  return GridCell{col, row};
}

int cell_index(const GridSpec& grid, GridCell c) {
  return c.col * grid.rows() + c.row;
}

std::uint32_t cluster_key(const GridSpec& grid, PitchPoint origin,
                          PitchPoint destination) {
  const auto o = static_cast<std::uint32_t>(cell_index(grid, cell_of(grid, origin)));
  const auto d =
      static_cast<std::uint32_t>(cell_index(grid, cell_of(grid, destination)));
  return o * static_cast<std::uint32_t>(grid.num_cells()) + d;
}

std::uint32_t cluster_key(const GridSpec& grid, const Subsequence& sub) {
  if (sub.events.empty()) {
    throw ValidationError("cluster_key: empty subsequence");
  }
  return cluster_key(grid, sub.events.front().start, sub.events.back().end);
}

void ClusterIndex::insert(std::uint32_t key, IndexEntry entry) {
  clusters_[key].push_back(std::move(entry));
  ++size_;
}

void ClusterIndex::finalize() {
  double sum = 0.0;
  for (const auto& [key, entries] : clusters_) {
    for (const auto& e : entries) sum += e.label;
  }
  global_mean_label_ = size_ > 0 ? sum / static_cast<double>(size_) : 0.0;
}

ClusterIndex build_index(std::span<const Subsequence> subs, GridSpec grid,
                         unsigned threads) {
  ClusterIndex index(grid);
  std::vector<std::pair<std::uint32_t, IndexEntry>> staged(subs.size());
  parallel_for(subs.size(), threads, [&](std::size_t i) {
    const Subsequence& sub = subs[i];
    if (!(sub.label >= 0.0 && sub.label <= 1.0)) {
      throw ValidationError("build_index: label outside [0,1]");
    }
    staged[i] = {cluster_key(grid, sub),
                 IndexEntry{sub.sequence_id, sub.label, interpolate(sub)}};
  });
  for (auto& [key, entry] : staged) index.insert(key, std::move(entry));
  index.finalize();
  return index;
}

namespace {

// Pool of candidate entries for one query, in deterministic order.
std::vector<const IndexEntry*> gather_pool(const ClusterIndex& index,
                                           std::uint32_t key,
                                           std::int64_t exclude_sequence_id,
                                           QueryStats* stats) {
  const auto& clusters = index.clusters();
  std::vector<const IndexEntry*> pool;
  auto collect = [&](std::uint32_t k) {
    auto it = clusters.find(k);
    if (it == clusters.end()) return;
    for (const IndexEntry& e : it->second) {
      if (e.sequence_id == exclude_sequence_id && exclude_sequence_id >= 0)
        continue;
      pool.push_back(&e);
    }
  };

  collect(key);
  if (!pool.empty()) return pool;

  // Widen to the 8-neighborhood of the destination cell, same origin.
  const GridSpec& grid = index.grid();
  const auto cells = static_cast<std::uint32_t>(grid.num_cells());
  const std::uint32_t origin = key / cells;
  const int dest = static_cast<int>(key % cells);
  const int dcol = dest / grid.rows();
  const int drow = dest % grid.rows();
  for (int dc = -1; dc <= 1; ++dc) {
    for (int dr = -1; dr <= 1; ++dr) {
      if (dc == 0 && dr == 0) continue;
      const int col = dcol + dc;
      const int row = drow + dr;
      if (col < 0 || col >= grid.cols() || row < 0 || row >= grid.rows())
        continue;
      collect(origin * cells +
              static_cast<std::uint32_t>(cell_index(grid, GridCell{col, row})));
    }
  }
  if (!pool.empty() && stats) ++stats->widened;
  return pool;
}

struct RankedNeighbors {
  // Indices into the pool sorted by (distance, insertion position).
  std::vector<std::uint32_t> order;
  std::vector<double> labels;  // labels in ranked order
};

RankedNeighbors rank_pool(const std::vector<const IndexEntry*>& pool,
                          const Trajectory& query, QueryStats* stats) {
  RankedNeighbors ranked;
  std::vector<double> dist(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    dist[i] = subseq_distance(pool[i]->traj, query);
  }
  if (stats) stats->distance_evals += pool.size();
  ranked.order.resize(pool.size());
  std::iota(ranked.order.begin(), ranked.order.end(), 0u);
  std::sort(ranked.order.begin(), ranked.order.end(),
            [&](std::uint32_t a, std::uint32_t b) {
              if (dist[a] != dist[b]) return dist[a] < dist[b];
              return a < b;
            });
  ranked.labels.resize(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    ranked.labels[i] = pool[ranked.order[i]]->label;
  }
  return ranked;
}

double mean_first(const std::vector<double>& labels, std::size_t k) {
  const std::size_t take = std::min(k, labels.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < take; ++i) sum += labels[i];
  return sum / static_cast<double>(take);
}

}  // namespace

double expected_reward(const ClusterIndex& index, const Trajectory& query,
                       std::uint32_t key, const QueryOptions& opts) {
  if (opts.k < 1) throw ValidationError("expected_reward: k must be >= 1");
  auto pool = gather_pool(index, key, opts.exclude_sequence_id, opts.stats);
  if (pool.empty()) {
    if (opts.stats) ++opts.stats->global_fallbacks;
    return index.global_mean_label();
  }
  auto ranked = rank_pool(pool, query, opts.stats);
  return mean_first(ranked.labels, static_cast<std::size_t>(opts.k));
}

double expected_reward(const ClusterIndex& index, const Subsequence& query,
                       const QueryOptions& opts) {
  return expected_reward(index, interpolate(query),
                         cluster_key(index.grid(), query), opts);
}

double expected_reward(const ClusterIndex& index, const Subsequence& query,
                       int k) {
  QueryOptions opts;
  opts.k = k;
  return expected_reward(index, query, opts);
}

std::vector<double> expected_reward_multi(const ClusterIndex& index,
                                          const Trajectory& query,
                                          std::uint32_t key,
                                          std::span<const int> ks,
                                          const QueryOptions& opts) {
  for (int k : ks) {
    if (k < 1) throw ValidationError("expected_reward_multi: k must be >= 1");
  }
  std::vector<double> out(ks.size());
  auto pool = gather_pool(index, key, opts.exclude_sequence_id, opts.stats);
  if (pool.empty()) {
    if (opts.stats) ++opts.stats->global_fallbacks;
    std::fill(out.begin(), out.end(), index.global_mean_label());
    return out;
  }
  auto ranked = rank_pool(pool, query, opts.stats);
  for (std::size_t i = 0; i < ks.size(); ++i) {
    out[i] = mean_first(ranked.labels, static_cast<std::size_t>(ks[i]));
  }
  return out;
}

namespace {

constexpr std::uint32_t kIndexMagic = 0x50564b49;  // "PVKI"
constexpr std::uint32_t kIndexVersion = 1;

template <typename T>
void write_raw(std::ofstream& out, const T& v) {
  static_assert(std::is_trivially_copyable_v<T>);
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::ifstream& in, const char* what) {
  static_assert(std::is_trivially_copyable_v<T>);
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    throw IoError(std::string("index cache: truncated reading ") + what);
  }
  return v;
}

void write_doubles(std::ofstream& out, const std::vector<double>& v) {
  write_raw(out, static_cast<std::uint32_t>(v.size()));
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
}

std::vector<double> read_doubles(std::ifstream& in) {
  const auto n = read_raw<std::uint32_t>(in, "vector length");
  std::vector<double> v(n);
  if (!in.read(reinterpret_cast<char*>(v.data()),
               static_cast<std::streamsize>(n * sizeof(double)))) {
    throw IoError("index cache: truncated vector");
  }
  return v;
}

}  // namespace

void save_index(const std::string& path, const ClusterIndex& index) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write: " + path);
  write_raw(out, kIndexMagic);
  write_raw(out, kIndexVersion);
  write_raw(out, index.grid().cell_length);
  write_raw(out, index.grid().cell_width);
  write_raw(out, static_cast<std::uint32_t>(index.grid().cols()));
  write_raw(out, static_cast<std::uint32_t>(index.grid().rows()));
  write_raw(out, static_cast<std::uint64_t>(index.size()));
  write_raw(out, index.global_mean_label());
  write_raw(out, static_cast<std::uint64_t>(index.clusters().size()));
  for (const auto& [key, entries] : index.clusters()) {
    write_raw(out, key);
    write_raw(out, static_cast<std::uint64_t>(entries.size()));
    for (const auto& e : entries) {
      write_raw(out, e.sequence_id);
      write_raw(out, e.label);
      write_doubles(out, e.traj.xs);
      write_doubles(out, e.traj.ys);
    }
  }
  if (!out) throw IoError("write failed: " + path);
}

ClusterIndex load_index(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  if (read_raw<std::uint32_t>(in, "magic") != kIndexMagic) {
    throw ValidationError("index cache: not an index file: " + path);
  }
  const auto version = read_raw<std::uint32_t>(in, "version");
  if (version != kIndexVersion) {
    throw ValidationError("index cache: unsupported version " +
                          std::to_string(version));
  }
  GridSpec grid;
  grid.cell_length = read_raw<double>(in, "cell length");
  grid.cell_width = read_raw<double>(in, "cell width");
  const auto cols = read_raw<std::uint32_t>(in, "cols");
  const auto rows = read_raw<std::uint32_t>(in, "rows");
  if (cols != static_cast<std::uint32_t>(grid.cols()) ||
      rows != static_cast<std::uint32_t>(grid.rows())) {
    throw ValidationError("index cache: inconsistent grid dimensions");
  }
  ClusterIndex index(grid);
  const auto total = read_raw<std::uint64_t>(in, "entry count");
  const auto mean = read_raw<double>(in, "global mean");
  const auto n_clusters = read_raw<std::uint64_t>(in, "cluster count");
  for (std::uint64_t c = 0; c < n_clusters; ++c) {
    const auto key = read_raw<std::uint32_t>(in, "cluster key");
    const auto n_entries = read_raw<std::uint64_t>(in, "cluster size");
    for (std::uint64_t i = 0; i < n_entries; ++i) {
      IndexEntry e;
      e.sequence_id = read_raw<std::int64_t>(in, "sequence id");
      e.label = read_raw<double>(in, "label");
      e.traj.xs = read_doubles(in);
      e.traj.ys = read_doubles(in);
      index.insert(key, std::move(e));
    }
  }
  if (index.size() != total) {
    throw ValidationError("index cache: entry count mismatch");
  }
  index.finalize();
  if (std::abs(index.global_mean_label() - mean) > 1e-9) {
    throw ValidationError("index cache: label checksum mismatch");
  }
  return index;
}

}  // namespace passval
