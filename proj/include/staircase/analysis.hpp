#pragma once

#include "staircase/curve.hpp"
#include "staircase/itqde.hpp"
#include "staircase/model.hpp"

#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace staircase {

struct IntegratedError {
  double value = 0.0;
  double excluded_measure = 0.0;  // lambda length dropped because of flags or non-finite values
};

/// Trapezoid integral of |H_a - H_b| over grid segments inside [lo, hi].
/// Segments touching a non-finite value are always dropped; with
/// `exclude_flagged` segments touching a flagged point are dropped too.
[[nodiscard]] IntegratedError integrated_error(const StaircaseCurve& a, const StaircaseCurve& b,
                                               double lo = -std::numeric_limits<double>::infinity(),
                                               double hi = std::numeric_limits<double>::infinity(),
                                               bool exclude_flagged = true);

/// Maximal runs of true values in `mask`, as (first, last) grid indices.
[[nodiscard]] std::vector<std::pair<Index, Index>> true_runs(const ArrayXb& mask);

struct LambdaInterval {
  double lo = 0.0;
  double hi = 0.0;
  Index first = 0;
  Index last = 0;
};

inline constexpr double kDefaultTailRatio = 0.1;

struct StabilityReport {
  double z_epsilon = 0.0;         // full discarded weight
  double z_epsilon_leading = 0.0;  // largest discarded weight
  double tau_epsilon = 0.0;
  double d_epsilon = std::numeric_limits<double>::infinity();
  double delta_epsilon = std::numeric_limits<double>::infinity();
  double delta_epsilon_linear = std::numeric_limits<double>::infinity();
  double r0 = kDefaultTailRatio;
  bool radius_defined = true;  // false when r0 Z_eps >= 1
  Eigen::VectorXd lambdas;
  Eigen::VectorXd tail_ratio;  // Z_eps / Z_exact
  ArrayXb unstable;
  std::vector<LambdaInterval> unstable_intervals;
};

/// Thresholds for a truncated rule and the lambda ranges where the tail
/// ratio Z_eps / Z_exact exceeds r0. The spectrum is used in trace mode.
[[nodiscard]] StabilityReport stability_report(const SpectrumModel& spec, const QuadratureRule& rule,
                                               const Eigen::VectorXd& lambdas, double r0 = kDefaultTailRatio);

[[nodiscard]] std::vector<LambdaInterval> intervals_from_mask(const Eigen::VectorXd& lambdas, const ArrayXb& mask);

struct OscillationDiagnostic {
  Eigen::VectorXd score;
  double threshold = 0.0;
  ArrayXb over_resolved;
  std::vector<LambdaInterval> intervals;
};

/// Local excess total variation sum|dH| - |sum dH| over +-window_pts points,
/// divided by the 5-95% range of H. Zero wherever H is monotone. Points
/// scoring above max(factor x median, 1e-10) are marked over-resolved.
[[nodiscard]] OscillationDiagnostic oscillation_diagnostic(const StaircaseCurve& curve, Index window_pts,
                                                           double threshold_factor = 10.0);

struct Plateau {
  double E_estimate = 0.0;
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  double width = 0.0;
};

/// Maximal runs with |dH/dlambda| < slope_tol and at least min_points grid
/// points; the estimate is the median of H over the run. Default slope_tol is
/// 0.02 (max H - min H) / lambda span.
[[nodiscard]] std::vector<Plateau> extract_plateaux(const StaircaseCurve& curve,
                                                    std::optional<double> slope_tol = std::nullopt,
                                                    Index min_points = 5);

/// One s value of a collapse sweep.
struct CollapseCase {
  SpectrumModel spectrum;
  double tau = 0.0;
  double kappa = 4.0;  // degree m = ceil(kappa s)
};

struct CollapseRow {
  double s = 0.0;
  Index mbar = 0;
  double eps = 0.0;
  double eps_root = 0.0;  // eps^{1/s}
  double mbar_over_s = 0.0;
  Index degree = 0;
};

/// Integrated error (no flag exclusion) of the quadrature staircase against
/// the exact one on `grid_points` points over [E_min, E_max], for every
/// pair-respecting mbar up to the degree. s = tau ||H||^2.
[[nodiscard]] std::vector<CollapseRow> scaling_collapse(const std::vector<CollapseCase>& cases,
                                                        Index grid_points = 801);

struct CollapseMetrics {
  double spread = 0.0;  // max vertical gap of log10(eps^{1/s}) over the common range
  double common_lo = 0.0;
  double common_hi = 0.0;
  std::vector<double> s_values;
  std::vector<double> slopes;  // d log10(eps^{1/s}) / d(mbar/s) over the common range
  bool valid = false;
};

/// Rows with eps < 1 and eps > floor_factor x (eps at full degree) are kept;
/// curves are compared on `samples` points of their common mbar/s range.
[[nodiscard]] CollapseMetrics collapse_metrics(const std::vector<CollapseRow>& rows, double floor_factor = 1e3,
                                               Index samples = 20);

/// Least-squares slope of y on x.
[[nodiscard]] double fit_slope(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

}  // namespace staircase
