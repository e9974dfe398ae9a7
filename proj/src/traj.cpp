#include "passval/traj.hpp"

#include <algorithm>
#include <cmath>

namespace passval {

namespace {

struct Anchor {
  double t;
  PitchPoint p;
};

PitchPoint position_at(const std::vector<Anchor>& anchors, double t) {
  // Last anchor with time <= t starts the active segment; duplicate times
  // (instantaneous jumps) resolve to the later anchor.
  std::size_t i = anchors.size() - 1;
  while (i > 0 && anchors[i].t > t) --i;
  if (i + 1 == anchors.size() || anchors[i].t >= t) return anchors[i].p;
  const Anchor& a = anchors[i];
  const Anchor& b = anchors[i + 1];
  const double u = (t - a.t) / (b.t - a.t);
  return PitchPoint{a.p.x + u * (b.p.x - a.p.x), a.p.y + u * (b.p.y - a.p.y)};
}

}  // namespace

Trajectory interpolate(const Subsequence& sub) {
  if (sub.events.empty()) {
    throw ValidationError("interpolate: empty subsequence");
  }
  std::vector<Anchor> anchors;
  anchors.reserve(sub.events.size() * 2);
  for (std::size_t i = 0; i < sub.events.size(); ++i) {
    const Event& e = sub.events[i];
    const double arrival = i + 1 < sub.events.size()
                               ? sub.events[i + 1].timestamp
                               : sub.final_arrival;
    if (!anchors.empty() && e.timestamp < anchors.back().t) {
      throw ValidationError("interpolate: non-monotone timestamps");
    }
    if (arrival < e.timestamp) {
      throw ValidationError("interpolate: non-monotone timestamps");
    }
    anchors.push_back(Anchor{e.timestamp, e.start});
    anchors.push_back(Anchor{arrival, e.end});
  }

  const double t0 = anchors.front().t;
  const double t_end = anchors.back().t;
  Trajectory traj;
  double last_sampled = t0 - 1.0;
  for (double t = t0; t <= t_end; t += 1.0) {
    const PitchPoint p = position_at(anchors, t);
    traj.xs.push_back(p.x);
    traj.ys.push_back(p.y);
    last_sampled = t;
  }
  if (last_sampled < t_end) {
    traj.xs.push_back(anchors.back().p.x);
    traj.ys.push_back(anchors.back().p.y);
  }
  if (traj.size() == 1) {
    // Sub-second subsequence: pad with the start and end anchors so DTW sees
    // a two-point series.
    traj.xs = {anchors.front().p.x, anchors.back().p.x};
    traj.ys = {anchors.front().p.y, anchors.back().p.y};
  }
  return traj;
}

double dtw_distance(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw ValidationError("dtw_distance: empty series");
  }
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  // Two-row rolling table; row = fixed i, varying j.
  std::vector<double> prev(m), cur(m);
  prev[0] = std::abs(a[0] - b[0]);
  for (std::size_t j = 1; j < m; ++j) prev[j] = prev[j - 1] + std::abs(a[0] - b[j]);
  for (std::size_t i = 1; i < n; ++i) {
    cur[0] = prev[0] + std::abs(a[i] - b[0]);
    for (std::size_t j = 1; j < m; ++j) {
      const double best = std::min(prev[j], std::min(prev[j - 1], cur[j - 1]));
      cur[j] = best + std::abs(a[i] - b[j]);
    }
    std::swap(prev, cur);
  }
  return prev[m - 1];
}

double subseq_distance(const Trajectory& p, const Trajectory& q) {
  return dtw_distance(p.xs, q.xs) + dtw_distance(p.ys, q.ys);
}

}  // namespace passval
