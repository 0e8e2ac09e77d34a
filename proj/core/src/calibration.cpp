#include "labeldist/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "labeldist/errors.hpp"
#include "labeldist/metrics.hpp"

namespace labeldist {

CalibrationMethod CalibrationMethod::temp_scale(double s) {
  if (!(s > 0.0)) throw InputError("temperature scale s must be positive");
  return {CalibrationKind::TempScale, s, SmoothingMode::Literal};
}

CalibrationMethod CalibrationMethod::pred_smooth(double alpha, SmoothingMode mode) {
  if (!(alpha >= 0.0 && alpha < 1.0))
    throw InputError("smoothing alpha must be in [0, 1)");
  return {CalibrationKind::PredSmooth, alpha, mode};
}

CalibrationMethod CalibrationMethod::train_smooth(double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0))
    throw InputError("smoothing alpha must be in [0, 1)");
  return {CalibrationKind::TrainSmooth, alpha, SmoothingMode::Literal};
}

std::vector<double> default_temp_scale_grid() {
  // Reciprocals of temperatures 1.5, 1.75, ..., 5, ascending in s.
  std::vector<double> s;
  for (int i = 14; i >= 0; --i) {
    s.push_back(1.0 / (1.5 + 0.25 * i));
  }
  return s;
}

std::vector<double> default_alpha_grid() {
  std::vector<double> a;
  for (int i = 0; i <= 20; ++i) {
    a.push_back(0.1 + 0.025 * i);
  }
  return a;
}

LabelDistribution softmax(const std::array<double, kNumLabels>& logits) {
  for (double v : logits) {
    if (!std::isfinite(v)) throw InputError("softmax: logits must be finite");
  }
  const double m = std::max({logits[0], logits[1], logits[2]});
  LabelDistribution d;
  double sum = 0.0;
  for (int i = 0; i < kNumLabels; ++i) {
    d[i] = std::exp(logits[i] - m);
    sum += d[i];
  }
  for (int i = 0; i < kNumLabels; ++i) d[i] /= sum;
  return d;
}

LabelDistribution temp_scale(const std::array<double, kNumLabels>& logits, double s) {
  if (!(s > 0.0)) throw InputError("temp_scale: s must be positive");
  return softmax({s * logits[0], s * logits[1], s * logits[2]});
}

bool pred_smooth_feasible(const LabelDistribution& dist, double alpha) {
  const int top = argmax_index(dist);
  return dist[top] - alpha + alpha / 3.0 >= 0.0;
}

LabelDistribution pred_smooth(const LabelDistribution& dist, double alpha,
                              SmoothingMode mode) {
  if (!(alpha >= 0.0 && alpha < 1.0))
    throw InputError("pred_smooth: alpha must be in [0, 1)");
  validate_distribution(dist, "pred_smooth");

  LabelDistribution out;
  if (mode == SmoothingMode::Standard) {
    for (int i = 0; i < kNumLabels; ++i) {
      out[i] = (1.0 - alpha) * dist[i] + alpha / 3.0;
    }
    return out;
  }

  const int top = argmax_index(dist);
  if (!pred_smooth_feasible(dist, alpha)) {
    throw InputError("pred_smooth: alpha " + std::to_string(alpha) +
                     " drives the max entry " + std::to_string(dist[top]) +
                     " below zero (max - alpha + alpha/3 < 0)");
  }
  for (int i = 0; i < kNumLabels; ++i) {
    out[i] = dist[i] + alpha / 3.0;
  }
  out[top] -= alpha;
  return out;
}

LabelDistribution smooth_target(Label gold, double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0))
    throw InputError("smooth_target: alpha must be in [0, 1)");
  LabelDistribution d;
  for (int i = 0; i < kNumLabels; ++i) d[i] = alpha / 3.0;
  d[gold] += 1.0 - alpha;
  return d;
}

LabelDistribution apply_post_hoc(const CalibrationMethod& method,
                                 const std::array<double, kNumLabels>& logits) {
  switch (method.kind) {
    case CalibrationKind::None:
      return softmax(logits);
    case CalibrationKind::TempScale:
      return temp_scale(logits, method.scalar);
    case CalibrationKind::PredSmooth:
      return pred_smooth(softmax(logits), method.scalar, method.mode);
    case CalibrationKind::TrainSmooth:
      throw InputError("train smoothing is a training-time method and cannot be "
                       "applied post-hoc");
  }
  throw std::logic_error("apply_post_hoc: bad calibration kind");
}

namespace {

void check_grid(const HyperparamGrid& grid) {
  if (grid.values.empty()) throw InputError("entropy matching: empty grid");
  for (std::size_t i = 1; i < grid.values.size(); ++i) {
    if (!(grid.values[i] > grid.values[i - 1]))
      throw InputError("entropy matching: grid must be strictly increasing");
  }
  if (!(grid.target_entropy >= 0.0))
    throw InputError("entropy matching: target entropy must be non-negative");
}

// Shared selection loop: evaluates mean calibrated entropy at every grid
// value and keeps the feasible candidate with the smallest gap. Iterating
// in ascending order with strict improvement implements the smaller-value
// tie-break.
template <typename EvalPoint>
EntropyMatchResult select_best(const HyperparamGrid& grid, EvalPoint&& eval_point) {
  EntropyMatchResult result;
  result.grid.reserve(grid.values.size());
  bool found = false;
  double best_gap = 0.0;
  for (std::size_t gi = 0; gi < grid.values.size(); ++gi) {
    GridPointEval pt = eval_point(grid.values[gi]);
    result.grid.push_back(pt);
    if (!pt.feasible) continue;
    const double gap = std::fabs(pt.mean_entropy - grid.target_entropy);
    if (!found || gap < best_gap) {
      found = true;
      best_gap = gap;
      result.scalar = pt.value;
      result.achieved_entropy = pt.mean_entropy;
      result.grid_index = gi;
    }
  }
  if (!found)
    throw InputError("entropy matching: no feasible grid value for this "
                     "prediction set");
  return result;
}

}  // namespace

EntropyMatchResult fit_entropy_match_temp(
    const std::vector<std::array<double, kNumLabels>>& logits,
    const HyperparamGrid& grid) {
  check_grid(grid);
  if (logits.empty()) throw InputError("entropy matching: no predictions");
  return select_best(grid, [&](double s) {
    GridPointEval pt;
    pt.value = s;
    double sum = 0.0;
    for (const auto& l : logits) sum += entropy(temp_scale(l, s));
    pt.mean_entropy = sum / static_cast<double>(logits.size());
    return pt;
  });
}

EntropyMatchResult fit_entropy_match_pred(const std::vector<LabelDistribution>& dists,
                                          const HyperparamGrid& grid,
                                          SmoothingMode mode) {
  check_grid(grid);
  if (dists.empty()) throw InputError("entropy matching: no predictions");
  return select_best(grid, [&](double alpha) {
    GridPointEval pt;
    pt.value = alpha;
    if (mode == SmoothingMode::Literal) {
      for (const auto& d : dists) {
        if (!pred_smooth_feasible(d, alpha)) {
          pt.feasible = false;
          return pt;
        }
      }
    }
    double sum = 0.0;
    for (const auto& d : dists) sum += entropy(pred_smooth(d, alpha, mode));
    pt.mean_entropy = sum / static_cast<double>(dists.size());
    return pt;
  });
}

}  // namespace labeldist
