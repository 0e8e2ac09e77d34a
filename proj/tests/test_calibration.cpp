#include <doctest.h>

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "labeldist/calibration.hpp"
#include "labeldist/errors.hpp"
#include "reference_metrics.hpp"

using namespace labeldist;

namespace {

bool close(double a, double b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

bool dist_close(const LabelDistribution& d, double e, double n, double c,
                double tol = 1e-12) {
  return close(d[0], e, tol) && close(d[1], n, tol) && close(d[2], c, tol);
}

}  // namespace

TEST_CASE("softmax fixtures and stability") {
  const auto p = softmax({2.0, 1.0, 0.0});
  CHECK(close(p[0], 0.66524095577482178));
  CHECK(close(p[1], 0.24472847105479764));
  CHECK(close(p[2], 0.090030573170380462));
  CHECK(close(p[0] + p[1] + p[2], 1.0));

  const auto u = softmax({0.0, 0.0, 0.0});
  CHECK(dist_close(u, 1.0 / 3, 1.0 / 3, 1.0 / 3));

  // Shift invariance keeps huge logits finite.
  const auto shifted = softmax({1000.0, 999.0, 998.0});
  for (int i = 0; i < kNumLabels; ++i) {
    CHECK(close(shifted[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(i)]));
  }

  CHECK_THROWS_AS(softmax({1.0, std::numeric_limits<double>::infinity(), 0.0}),
                  InputError);
}

TEST_CASE("temp_scale: identity at s = 1, fixture at s = 0.5, entropy monotone") {
  const std::array<double, kNumLabels> logits{2.0, 1.0, 0.0};

  const auto same = temp_scale(logits, 1.0);
  const auto plain = softmax(logits);
  for (int i = 0; i < kNumLabels; ++i) {
    CHECK(same[static_cast<std::size_t>(i)] == plain[static_cast<std::size_t>(i)]);
  }

  const auto half = temp_scale(logits, 0.5);
  CHECK(close(half[0], 0.50648039105565401));
  CHECK(close(half[1], 0.30719588571849837));
  CHECK(close(half[2], 0.18632372322584759));

  // Shrinking s flattens the distribution: entropy rises as s falls.
  double prev = -1.0;
  for (double s : {2.0, 1.0, 0.5, 0.25, 0.1}) {
    const double h = reference::entropy_nat(temp_scale(logits, s));
    CHECK(h > prev);
    prev = h;
  }

  CHECK_THROWS_AS(temp_scale(logits, 0.0), InputError);
  CHECK_THROWS_AS(temp_scale(logits, -1.0), InputError);
}

TEST_CASE("pred_smooth literal: argmax pays alpha, everyone gains alpha/3") {
  LabelDistribution d{0.7, 0.2, 0.1};
  const auto out = pred_smooth(d, 0.3, SmoothingMode::Literal);
  CHECK(dist_close(out, 0.5, 0.3, 0.2));

  const auto noop = pred_smooth(d, 0.0, SmoothingMode::Literal);
  CHECK(dist_close(noop, 0.7, 0.2, 0.1, 0.0));

  // Near-uniform input cannot give up 0.6 of its argmax mass.
  LabelDistribution flat{0.34, 0.33, 0.33};
  CHECK_FALSE(pred_smooth_feasible(flat, 0.6));
  CHECK_THROWS_AS(pred_smooth(flat, 0.6, SmoothingMode::Literal), InputError);
  CHECK(pred_smooth_feasible(d, 0.3));
  CHECK(pred_smooth_feasible(flat, 0.1));

  CHECK_THROWS_AS(pred_smooth(d, 1.0, SmoothingMode::Literal), InputError);
  CHECK_THROWS_AS(pred_smooth(d, -0.1, SmoothingMode::Literal), InputError);
}

TEST_CASE("pred_smooth standard: mix with uniform, always feasible") {
  LabelDistribution d{0.7, 0.2, 0.1};
  const auto out = pred_smooth(d, 0.3, SmoothingMode::Standard);
  CHECK(dist_close(out, 0.59, 0.24, 0.17));

  // Feasible even where the literal formula is not.
  LabelDistribution flat{0.34, 0.33, 0.33};
  const auto heavy = pred_smooth(flat, 0.9, SmoothingMode::Standard);
  CHECK(close(heavy[0] + heavy[1] + heavy[2], 1.0));
  for (int i = 0; i < kNumLabels; ++i) {
    CHECK(heavy[static_cast<std::size_t>(i)] > 0.0);
  }
}

TEST_CASE("smooth_target spreads alpha over all classes") {
  const auto t = smooth_target(Label::Entailment, 0.3);
  CHECK(dist_close(t, 0.8, 0.1, 0.1));
  const auto tn = smooth_target(Label::Neutral, 0.3);
  CHECK(dist_close(tn, 0.1, 0.8, 0.1));
  const auto tc = smooth_target(Label::Contradiction, 0.3);
  CHECK(dist_close(tc, 0.1, 0.1, 0.8));
  const auto hard = smooth_target(Label::Neutral, 0.0);
  CHECK(dist_close(hard, 0.0, 1.0, 0.0, 0.0));
  CHECK_THROWS_AS(smooth_target(Label::Entailment, 1.0), InputError);
}

TEST_CASE("default grids are frozen") {
  const auto temp = default_temp_scale_grid();
  REQUIRE(temp.size() == 15);
  CHECK(close(temp.front(), 0.2));            // 1/5
  CHECK(close(temp.back(), 1.0 / 1.5));       // 1/1.5
  for (std::size_t i = 1; i < temp.size(); ++i) CHECK(temp[i] > temp[i - 1]);

  const auto alpha = default_alpha_grid();
  REQUIRE(alpha.size() == 21);
  CHECK(close(alpha.front(), 0.1));
  CHECK(close(alpha.back(), 0.6));
  for (std::size_t i = 1; i < alpha.size(); ++i) CHECK(alpha[i] > alpha[i - 1]);
}

TEST_CASE("apply_post_hoc dispatches on the method kind") {
  const std::array<double, kNumLabels> logits{1.5, 0.0, -0.5};
  const auto plain = apply_post_hoc(CalibrationMethod::none(), logits);
  const auto direct = softmax(logits);
  for (int i = 0; i < kNumLabels; ++i) {
    CHECK(plain[static_cast<std::size_t>(i)] == direct[static_cast<std::size_t>(i)]);
  }

  const auto scaled = apply_post_hoc(CalibrationMethod::temp_scale(0.5), logits);
  const auto expect = temp_scale(logits, 0.5);
  for (int i = 0; i < kNumLabels; ++i) {
    CHECK(scaled[static_cast<std::size_t>(i)] == expect[static_cast<std::size_t>(i)]);
  }

  const auto smoothed = apply_post_hoc(
      CalibrationMethod::pred_smooth(0.2, SmoothingMode::Standard), logits);
  const auto expect2 = pred_smooth(direct, 0.2, SmoothingMode::Standard);
  for (int i = 0; i < kNumLabels; ++i) {
    CHECK(smoothed[static_cast<std::size_t>(i)] == expect2[static_cast<std::size_t>(i)]);
  }

  CHECK_THROWS_AS(apply_post_hoc(CalibrationMethod::train_smooth(0.2), logits),
                  InputError);
}

TEST_CASE("entropy matching agrees with a brute-force grid scan") {
  std::vector<std::array<double, kNumLabels>> logits = {
      {2.0, 1.0, 0.0},  {0.5, 0.4, -1.0}, {3.0, 0.0, 0.0},
      {-1.0, 2.0, 1.5}, {0.2, 0.1, 0.0},  {4.0, -2.0, 1.0},
  };
  HyperparamGrid grid;
  grid.values = default_temp_scale_grid();
  grid.target_entropy = 0.8;

  const auto fit = fit_entropy_match_temp(logits, grid);

  // Independent scan with the reference entropy.
  double best_gap = std::numeric_limits<double>::infinity();
  std::size_t best_idx = 0;
  for (std::size_t gi = 0; gi < grid.values.size(); ++gi) {
    long double sum = 0.0L;
    for (const auto& l : logits) sum += reference::entropy_nat(temp_scale(l, grid.values[gi]));
    const double mean = static_cast<double>(sum / static_cast<long double>(logits.size()));
    const double gap = std::abs(mean - grid.target_entropy);
    if (gap < best_gap) {  // strict: ties keep the earlier (smaller) value
      best_gap = gap;
      best_idx = gi;
    }
  }

  CHECK(fit.grid_index == best_idx);
  CHECK(fit.scalar == grid.values[best_idx]);
  CHECK(close(std::abs(fit.achieved_entropy - grid.target_entropy), best_gap, 1e-9));
  REQUIRE(fit.grid.size() == grid.values.size());
  for (const auto& pt : fit.grid) CHECK(pt.feasible);
}

TEST_CASE("entropy matching ties break toward the smaller grid value") {
  // Uniform logits score entropy ln 3 at every scale, so everything ties.
  std::vector<std::array<double, kNumLabels>> logits = {{0.0, 0.0, 0.0}};
  HyperparamGrid grid;
  grid.values = {0.25, 0.5, 1.0};
  grid.target_entropy = 0.3;
  const auto fit = fit_entropy_match_temp(logits, grid);
  CHECK(fit.grid_index == 0);
  CHECK(fit.scalar == 0.25);
}

TEST_CASE("literal smoothing grid points can be infeasible but are still recorded") {
  std::vector<LabelDistribution> dists = {{0.5, 0.3, 0.2}, {0.45, 0.35, 0.2}};
  HyperparamGrid grid;
  grid.values = {0.1, 0.8};  // 0.45 - 0.8 + 0.8/3 < 0: infeasible
  grid.target_entropy = std::log(3.0);  // maximal entropy: favors heavy smoothing
  const auto fit = fit_entropy_match_pred(dists, grid, SmoothingMode::Literal);
  REQUIRE(fit.grid.size() == 2);
  CHECK(fit.grid[0].feasible);
  CHECK_FALSE(fit.grid[1].feasible);
  // alpha = 0.8 would land nearer the maximal-entropy target, but it is
  // infeasible, so the search must settle for 0.1.
  CHECK(fit.scalar == 0.1);
  CHECK(fit.grid_index == 0);

  // Standard mode has no feasibility constraint: 0.8 wins.
  const auto fit2 = fit_entropy_match_pred(dists, grid, SmoothingMode::Standard);
  CHECK(fit2.scalar == 0.8);

  // With every grid point infeasible the search has no answer.
  HyperparamGrid bad;
  bad.values = {0.8, 0.9};
  bad.target_entropy = 1.0;
  CHECK_THROWS_AS(fit_entropy_match_pred(dists, bad, SmoothingMode::Literal), InputError);
}

TEST_CASE("entropy matching input validation") {
  std::vector<std::array<double, kNumLabels>> logits = {{1.0, 0.0, 0.0}};
  HyperparamGrid grid;
  grid.target_entropy = 0.5;
  grid.values = {};
  CHECK_THROWS_AS(fit_entropy_match_temp(logits, grid), InputError);
  grid.values = {0.5, 0.5};
  CHECK_THROWS_AS(fit_entropy_match_temp(logits, grid), InputError);
  grid.values = {0.5, 0.4};
  CHECK_THROWS_AS(fit_entropy_match_temp(logits, grid), InputError);
  grid.values = {0.4, 0.5};
  grid.target_entropy = -0.1;
  CHECK_THROWS_AS(fit_entropy_match_temp(logits, grid), InputError);
  grid.target_entropy = 0.5;
  CHECK_THROWS_AS(fit_entropy_match_temp({}, grid), InputError);
}
