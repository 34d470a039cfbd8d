#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <string>
#include <string_view>

namespace staircase {

using ArrayXb = Eigen::Array<bool, Eigen::Dynamic, 1>;

enum class Provenance { exact, quadrature, binomial, sampled, smoothed };

[[nodiscard]] std::string_view to_string(Provenance p);

/// H(lambda) = N/Z on a grid. `flagged` marks points that should not be
/// trusted (Z below a floor, window hanging off the grid, ...).
struct StaircaseCurve {
  Eigen::VectorXd lambdas;
  Eigen::VectorXd N;
  Eigen::VectorXd Z;
  Eigen::VectorXd log_Z;
  Eigen::VectorXd H;
  ArrayXb flagged;
  Provenance provenance = Provenance::exact;
  double tau = 0.0;
  // only meaningful for smoothed curves
  double tau_eff = std::numeric_limits<double>::quiet_NaN();
  double delta_lambda = std::numeric_limits<double>::quiet_NaN();

  [[nodiscard]] Eigen::Index size() const { return lambdas.size(); }

  void resize(Eigen::Index n) {
    N.setZero(n);
    Z.setZero(n);
    log_Z.setZero(n);
    H.setZero(n);
    flagged.setConstant(n, false);
  }
};

/// Uniform grid of `points` values on [lo, hi].
[[nodiscard]] inline Eigen::VectorXd uniform_grid(double lo, double hi, Eigen::Index points) {
  if (points == 1) {
    return Eigen::VectorXd::Constant(1, 0.5 * (lo + hi));
  }
  return Eigen::VectorXd::LinSpaced(points, lo, hi);
}

/// True if consecutive spacings agree to a relative tolerance.
template <typename Derived>
[[nodiscard]] bool is_uniform_grid(const Eigen::MatrixBase<Derived>& x, double rel_tol = 1e-9) {
  const Eigen::Index n = x.size();
  if (n < 3) {
    return n >= 1;
  }
  const double h = (x(n - 1) - x(0)) / static_cast<double>(n - 1);
  if (!(h > 0.0)) {
    return false;
  }
  for (Eigen::Index i = 1; i < n; ++i) {
    if (std::abs((x(i) - x(i - 1)) - h) > rel_tol * std::max(1.0, std::abs(x(i))) + 1e-9 * h) {
      return false;
    }
  }
  return true;
}

/// Stable log(sum exp(a)); -inf entries are ignored.
template <typename Derived>
[[nodiscard]] typename Derived::Scalar log_sum_exp(const Eigen::DenseBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  const Scalar mx = a.maxCoeff();
  if (!std::isfinite(mx)) {
    return mx;
  }
  return mx + std::log((a.derived().array() - mx).exp().sum());
}

}  // namespace staircase
