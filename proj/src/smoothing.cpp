#include "staircase/smoothing.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace staircase {

SmoothingWindow make_window(WindowKind kind, double width, double spacing) {
  if (!(width >= 0.0) || !std::isfinite(width)) {
    throw std::invalid_argument("window width must be finite and non-negative");
  }
  if (!(spacing > 0.0)) {
    throw std::invalid_argument("grid spacing must be positive");
  }
  SmoothingWindow w;
  w.width = width;
  w.kind = kind;
  w.spacing = spacing;
  if (kind == WindowKind::gaussian) {
    const double sigma = width / std::sqrt(2.0);
    w.grid_support = static_cast<Eigen::Index>(std::ceil(8.0 * sigma / spacing));
    w.taps.resize(2 * w.grid_support + 1);
    for (Eigen::Index i = -w.grid_support; i <= w.grid_support; ++i) {
      const double x = i * spacing / sigma;
      w.taps[i + w.grid_support] = std::exp(-0.5 * x * x);
    }
    if (w.grid_support == 0) {
      w.taps[0] = 1.0;
    }
  } else {
    // tiny slack so a width that is an exact multiple of the spacing keeps its end taps
    w.grid_support = static_cast<Eigen::Index>(std::floor(0.5 * width / spacing * (1.0 + 1e-12)));
    w.taps.setOnes(2 * w.grid_support + 1);
  }
  w.taps /= w.taps.sum();
  return w;
}

Eigen::VectorXd convolve_values(const Eigen::VectorXd& values, const SmoothingWindow& window, ArrayXb* edge) {
  const Eigen::Index n = values.size();
  const Eigen::Index s = window.grid_support;
  if (2 * s + 1 > n) {
    throw std::invalid_argument("smoothing window is wider than the lambda grid");
  }
  Eigen::VectorXd out(n);
  if (edge != nullptr) {
    edge->setConstant(n, false);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index lo = std::max<Eigen::Index>(0, i - s);
    const Eigen::Index hi = std::min<Eigen::Index>(n - 1, i + s);
    double acc = 0.0;
    double mass = 0.0;
    for (Eigen::Index j = lo; j <= hi; ++j) {
      const double t = window.taps[j - i + s];
      acc += t * values[j];
      mass += t;
    }
    const bool truncated = lo != i - s || hi != i + s;
    out[i] = truncated ? acc / mass : acc;
    if (edge != nullptr) {
      (*edge)[i] = truncated;
    }
  }
  return out;
}

namespace {

void check_grid(const StaircaseCurve& curve, const SmoothingWindow& window) {
  if (!is_uniform_grid(curve.lambdas)) {
    throw std::invalid_argument("smoothing needs a uniform lambda grid");
  }
  if (curve.size() > 1) {
    const double h = (curve.lambdas[curve.size() - 1] - curve.lambdas[0]) / static_cast<double>(curve.size() - 1);
    if (std::abs(h - window.spacing) > 1e-9 * h) {
      throw std::invalid_argument("window spacing does not match the lambda grid");
    }
  }
}

}  // namespace

StaircaseCurve convolve(const StaircaseCurve& curve, const SmoothingWindow& window) {
  check_grid(curve, window);
  StaircaseCurve out = curve;
  ArrayXb edge;
  out.N = convolve_values(curve.N, window, &edge);
  out.Z = convolve_values(curve.Z, window);
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    out.log_Z[i] = out.Z[i] > 0.0 ? std::log(out.Z[i]) : std::numeric_limits<double>::quiet_NaN();
    out.H[i] = out.Z[i] != 0.0 ? out.N[i] / out.Z[i] : std::numeric_limits<double>::quiet_NaN();
  }
  out.flagged = curve.flagged || edge;
  out.provenance = Provenance::smoothed;
  out.delta_lambda = window.width;
  out.tau_eff = window.kind == WindowKind::gaussian ? tau_effective(curve.tau, window.width)
                                                    : std::numeric_limits<double>::quiet_NaN();
  return out;
}

StaircaseCurve convolve_ratio(const StaircaseCurve& curve, const SmoothingWindow& window) {
  check_grid(curve, window);
  StaircaseCurve out = convolve(curve, window);
  out.H = convolve_values(curve.H, window);
  return out;
}

double tau_effective(double tau, double delta_lambda) {
  if (!(tau > 0.0) || !(delta_lambda >= 0.0)) {
    throw std::invalid_argument("tau_effective needs tau > 0 and delta_lambda >= 0");
  }
  return tau / (1.0 + tau * delta_lambda * delta_lambda);
}

CoarseGrain coarse_grain_to_gap(double tau, double delta_j, double K) {
  if (!(delta_j > 0.0) || !(K >= 2.0) || !(tau > 0.0)) {
    throw std::invalid_argument("coarse_grain_to_gap needs tau > 0, delta_j > 0 and K >= 2");
  }
  CoarseGrain c;
  c.tau_eff_target = std::log(K) / (delta_j * delta_j);
  if (tau <= c.tau_eff_target) {
    c.no_op = true;
    return c;
  }
  c.delta_lambda = std::sqrt(1.0 / c.tau_eff_target - 1.0 / tau);
  return c;
}

double bias_bound(double tau_eff, double delta) {
  if (!(tau_eff > 0.0) || !(delta > 0.0)) {
    throw std::invalid_argument("bias_bound needs tau_eff > 0 and delta > 0");
  }
  return std::exp(-tau_eff * delta * delta);
}

}  // namespace staircase
