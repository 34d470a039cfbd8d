#pragma once

#include "staircase/curve.hpp"

namespace staircase {

enum class WindowKind { gaussian, boxcar };

/// Discrete, unit-sum window on a uniform grid of spacing `spacing`.
/// Gaussian: standard deviation width/sqrt(2), cut at 8 sigma.
/// Boxcar: total width `width`.
struct SmoothingWindow {
  double width = 0.0;
  WindowKind kind = WindowKind::gaussian;
  Eigen::Index grid_support = 0;
  double spacing = 0.0;
  Eigen::VectorXd taps;  // 2 * grid_support + 1 entries, centre in the middle
};

[[nodiscard]] SmoothingWindow make_window(WindowKind kind, double width, double spacing);

/// Convolves one channel. Output points whose window hangs off the grid use
/// the truncated window renormalized to unit sum and are flagged in `edge`.
[[nodiscard]] Eigen::VectorXd convolve_values(const Eigen::VectorXd& values, const SmoothingWindow& window,
                                              ArrayXb* edge = nullptr);

/// Smooths N and Z separately and re-forms H = N/Z.
[[nodiscard]] StaircaseCurve convolve(const StaircaseCurve& curve, const SmoothingWindow& window);

/// Same, but smoothing H directly. Diagnostic only.
[[nodiscard]] StaircaseCurve convolve_ratio(const StaircaseCurve& curve, const SmoothingWindow& window);

/// tau / (1 + tau dl^2).
[[nodiscard]] double tau_effective(double tau, double delta_lambda);

struct CoarseGrain {
  double tau_eff_target = 0.0;
  double delta_lambda = 0.0;
  bool no_op = false;  // tau already at or below the target
};

/// Target tau_eff = ln K / Delta^2 and the window width that reaches it.
[[nodiscard]] CoarseGrain coarse_grain_to_gap(double tau, double delta_j, double K);

/// exp(-tau_eff Delta^2).
[[nodiscard]] double bias_bound(double tau_eff, double delta);

}  // namespace staircase
