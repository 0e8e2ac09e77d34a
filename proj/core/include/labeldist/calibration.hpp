#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "labeldist/labels.hpp"

namespace labeldist {

// How redistributed probability mass is applied when smoothing a
// prediction:
//  - Literal: take alpha off the argmax entry, then give every entry
//    (argmax included) alpha/3. Rejects (dist, alpha) pairs that would
//    drive the argmax entry negative; no silent clamping.
//  - Standard: (1 - alpha) * dist + alpha * uniform. Always valid.
enum class SmoothingMode { Literal, Standard };

enum class CalibrationKind { None, TempScale, PredSmooth, TrainSmooth };

// Post-hoc or training-time calibration, with its scalar hyperparameter:
// a logit multiplier s for temperature scaling (s = 1/T against the
// conventional dividing form), or a smoothing mass alpha in [0, 1).
struct CalibrationMethod {
  CalibrationKind kind = CalibrationKind::None;
  double scalar = 1.0;  // s for TempScale; alpha otherwise
  SmoothingMode mode = SmoothingMode::Literal;

  static CalibrationMethod none() { return {}; }
  static CalibrationMethod temp_scale(double s);
  static CalibrationMethod pred_smooth(double alpha,
                                       SmoothingMode mode = SmoothingMode::Literal);
  static CalibrationMethod train_smooth(double alpha);
};

// Candidate scalars for entropy matching, strictly increasing, plus the
// entropy the calibrated predictions should average to.
struct HyperparamGrid {
  std::vector<double> values;
  double target_entropy = 0.0;
};

// Default grids: logit multipliers 1/T for T in {1.5, 1.75, ..., 5},
// and smoothing masses {0.1, 0.125, ..., 0.6}.
std::vector<double> default_temp_scale_grid();
std::vector<double> default_alpha_grid();

// Numerically stable softmax (max subtraction). Logits must be finite.
LabelDistribution softmax(const std::array<double, kNumLabels>& logits);

// softmax(s * logits). s = 1 is the identity; s < 1 raises entropy.
LabelDistribution temp_scale(const std::array<double, kNumLabels>& logits, double s);

LabelDistribution pred_smooth(const LabelDistribution& dist, double alpha,
                              SmoothingMode mode);

// Feasibility of the Literal formula for this pair: the argmax entry
// must stay non-negative after losing alpha and regaining alpha/3.
bool pred_smooth_feasible(const LabelDistribution& dist, double alpha);

// Soft training target: gold entry 1 - alpha + alpha/3, others alpha/3.
LabelDistribution smooth_target(Label gold, double alpha);

// Applies a post-hoc method to raw logits. TrainSmooth is not post-hoc
// and is rejected.
LabelDistribution apply_post_hoc(const CalibrationMethod& method,
                                 const std::array<double, kNumLabels>& logits);

struct GridPointEval {
  double value = 0.0;
  double mean_entropy = 0.0;
  bool feasible = true;  // Literal smoothing can be infeasible at large alpha
};

struct EntropyMatchResult {
  double scalar = 0.0;          // chosen grid value
  double achieved_entropy = 0.0;
  std::size_t grid_index = 0;
  std::vector<GridPointEval> grid;  // every candidate, in grid order
};

// Grid search for the scalar whose calibrated mean prediction entropy
// is closest to grid.target_entropy. Ties break toward the smaller grid
// value; infeasible candidates are recorded but never chosen.
EntropyMatchResult fit_entropy_match_temp(
    const std::vector<std::array<double, kNumLabels>>& logits,
    const HyperparamGrid& grid);
EntropyMatchResult fit_entropy_match_pred(
    const std::vector<LabelDistribution>& dists, const HyperparamGrid& grid,
    SmoothingMode mode);

}  // namespace labeldist
