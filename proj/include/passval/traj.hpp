#pragma once

#include <span>
#include <vector>

#include "passval/possession.hpp"

namespace passval {

// Ball path resampled at one-second intervals; xs and ys run in lockstep.
struct Trajectory {
  std::vector<double> xs;
  std::vector<double> ys;
  std::size_t size() const { return xs.size(); }
};

// Piecewise-linear ball path through each event's (t, start) and
// (arrival, end) anchors, sampled at t0, t0+1, ... plus the final anchor.
// Always yields at least two samples. Throws on non-monotone timestamps.
Trajectory interpolate(const Subsequence& sub);

// Unconstrained DTW with per-step cost |a_i - b_j| and steps
// (1,0), (0,1), (1,1). Throws on empty input.
double dtw_distance(std::span<const double> a, std::span<const double> b);

// DTW per axis, then summed.
double subseq_distance(const Trajectory& p, const Trajectory& q);

}  // namespace passval
