#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "passval/events.hpp"

namespace passval {

inline constexpr double kGoalHalfWidth = 3.66;  // posts at (105, 34 +- 3.66)
inline constexpr PitchPoint kGoalCenter{kPitchLength, kPitchWidth / 2.0};

struct ShotFeatures {
  double x = 0.0;
  double y = 0.0;
  double dist = 0.0;   // meters to the goal-mouth center
  double angle = 0.0;  // radians subtended by the posts at the shot location

  std::array<double, 4> as_array() const { return {x, y, dist, angle}; }
};

ShotFeatures shot_features_at(PitchPoint p);
ShotFeatures shot_features(const Event& shot);  // throws unless shot.is_shot()

struct GbtParams {
  int rounds = 500;
  double shrinkage = 0.01;
  int max_depth = 5;
  // Children below this hessian mass are not split off; keeps Newton leaf
  // weights -G/H well conditioned without an L2 term (which would break
  // invariance under uniform sample duplication).
  double min_child_hessian = 1.0;
};

struct TreeNode {
  int feature = -1;        // -1 marks a leaf
  double threshold = 0.0;  // goes left when x[feature] <= threshold
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf weight
};

struct Tree {
  std::vector<TreeNode> nodes;
  double eval(const std::array<double, 4>& x) const;
};

struct GbtModel {
  double base_score = 0.0;  // log-odds of the training base rate
  double shrinkage = 0.01;
  std::vector<Tree> trees;

  double predict_margin(const std::array<double, 4>& x) const;
  double predict(const std::array<double, 4>& x) const;  // sigmoid(margin)
};

struct LabeledShot {
  ShotFeatures features;
  bool goal = false;
};

// Exact greedy boosting with logistic loss. Deterministic: split ties go to
// the lowest feature index, then the lowest threshold. Throws on single-class
// input.
GbtModel train_gbt(std::span<const LabeledShot> shots, const GbtParams& params = {});

inline constexpr double kPenaltyFallbackRate = 0.76;

struct XgModel {
  GbtModel gbt;
  // Penalties bypass the location model: every penalty is taken from the
  // same spot, so the features carry no signal.
  double penalty_rate = kPenaltyFallbackRate;
  double base_rate = 0.0;

  double predict(const ShotFeatures& f) const { return gbt.predict(f.as_array()); }
  double predict_event(const Event& shot) const;
};

// Trains from shot events: kind Goal is a positive, kind Shot a negative;
// penalty shots are held out of the tree model and set penalty_rate.
XgModel train_xg(std::span<const Event> shots, const GbtParams& params = {});

std::string xg_to_text(const XgModel& model);
XgModel xg_from_text(std::string_view text);
void save_xg(const std::string& path, const XgModel& model);
XgModel load_xg(const std::string& path);

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace passval
