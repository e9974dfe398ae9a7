#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "passval/traj.hpp"

namespace passval {

// Origin-destination grid over the pitch. The default 15 x 17 m cells tile
// 105 x 68 into a 7-by-4 grid: 28 cells, 784 origin-destination clusters.
struct GridSpec {
  double cell_length = 15.0;
  double cell_width = 17.0;

  int cols() const;
  int rows() const;
  int num_cells() const { return cols() * rows(); }
  std::uint32_t num_keys() const {
    return static_cast<std::uint32_t>(num_cells()) *
           static_cast<std::uint32_t>(num_cells());
  }

  // Single cell covering the whole pitch: exhaustive search.
  static GridSpec no_clustering() { return GridSpec{kPitchLength, kPitchWidth}; }

  bool operator==(const GridSpec&) const = default;
};

struct GridCell {
  int col = 0;
  int row = 0;
  bool operator==(const GridCell&) const = default;
};

GridCell cell_of(const GridSpec& grid, PitchPoint p);  // throws out of bounds
int cell_index(const GridSpec& grid, GridCell c);

std::uint32_t cluster_key(const GridSpec& grid, PitchPoint origin,
                          PitchPoint destination);
std::uint32_t cluster_key(const GridSpec& grid, const Subsequence& sub);

struct IndexEntry {
  std::int64_t sequence_id = 0;
  double label = 0.0;
  Trajectory traj;
};

struct QueryStats {
  std::uint64_t distance_evals = 0;
  std::uint64_t widened = 0;           // queries served by the 8-neighborhood
  std::uint64_t global_fallbacks = 0;  // queries served by the global mean
};

struct QueryOptions {
  int k = 10;
  // Leave-one-out guard for diagnostics: entries from this possession
  // sequence are skipped.
  std::int64_t exclude_sequence_id = -1;
  QueryStats* stats = nullptr;
};

class ClusterIndex {
 public:
  ClusterIndex() = default;
  explicit ClusterIndex(GridSpec grid) : grid_(grid) {}

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return size_; }
  double global_mean_label() const { return global_mean_label_; }
  std::size_t occupied_clusters() const { return clusters_.size(); }
  // Mean over all keys, empty ones included.
  double mean_cluster_size() const {
    return static_cast<double>(size_) / static_cast<double>(grid_.num_keys());
  }
  const std::map<std::uint32_t, std::vector<IndexEntry>>& clusters() const {
    return clusters_;
  }

  void insert(std::uint32_t key, IndexEntry entry);
  void finalize();  // recomputes the global mean

 private:
  GridSpec grid_;
  std::map<std::uint32_t, std::vector<IndexEntry>> clusters_;
  std::size_t size_ = 0;
  double global_mean_label_ = 0.0;
};

// Interpolates every subsequence once and buckets it by origin/destination
// cells. Labels must lie in [0, 1].
ClusterIndex build_index(std::span<const Subsequence> subs, GridSpec grid = {},
                         unsigned threads = 1);

// Mean label of the k nearest stored trajectories in the query's cluster,
// ties broken by insertion order. Sparse clusters degrade gracefully: fewer
// than k entries means all of them; an empty cluster widens to the
// destination cell's 8-neighborhood under the same origin; failing that the
// global mean label is returned.
double expected_reward(const ClusterIndex& index, const Trajectory& query,
                       std::uint32_t key, const QueryOptions& opts);
double expected_reward(const ClusterIndex& index, const Subsequence& query,
                       const QueryOptions& opts);
double expected_reward(const ClusterIndex& index, const Subsequence& query,
                       int k);

// One reward per requested k, sharing a single distance pass. ks must be
// positive; the neighbor pool is identical for every k.
std::vector<double> expected_reward_multi(const ClusterIndex& index,
                                          const Trajectory& query,
                                          std::uint32_t key,
                                          std::span<const int> ks,
                                          const QueryOptions& opts);

void save_index(const std::string& path, const ClusterIndex& index);
ClusterIndex load_index(const std::string& path);  // rejects version mismatch

}  // namespace passval
