#include "staircase/analysis.hpp"

#include "staircase/exact_filter.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace staircase {

IntegratedError integrated_error(const StaircaseCurve& a, const StaircaseCurve& b, double lo, double hi,
                                 bool exclude_flagged) {
  if (a.size() != b.size() || a.lambdas != b.lambdas) {
    throw std::invalid_argument("integrated_error needs identical lambda grids");
  }
  IntegratedError out;
  for (Index i = 0; i + 1 < a.size(); ++i) {
    const double x0 = a.lambdas[i];
    const double x1 = a.lambdas[i + 1];
    if (x0 < lo || x1 > hi) {
      continue;
    }
    const double d0 = std::abs(a.H[i] - b.H[i]);
    const double d1 = std::abs(a.H[i + 1] - b.H[i + 1]);
    bool drop = !std::isfinite(d0) || !std::isfinite(d1);
    if (exclude_flagged) {
      drop = drop || a.flagged[i] || a.flagged[i + 1] || b.flagged[i] || b.flagged[i + 1];
    }
    if (drop) {
      out.excluded_measure += x1 - x0;
    } else {
      out.value += 0.5 * (x1 - x0) * (d0 + d1);
    }
  }
  return out;
}

std::vector<std::pair<Index, Index>> true_runs(const ArrayXb& mask) {
  std::vector<std::pair<Index, Index>> runs;
  Index i = 0;
  while (i < mask.size()) {
    if (!mask[i]) {
      ++i;
      continue;
    }
    Index j = i;
    while (j + 1 < mask.size() && mask[j + 1]) {
      ++j;
    }
    runs.emplace_back(i, j);
    i = j + 1;
  }
  return runs;
}

std::vector<LambdaInterval> intervals_from_mask(const Eigen::VectorXd& lambdas, const ArrayXb& mask) {
  std::vector<LambdaInterval> out;
  for (const auto& [first, last] : true_runs(mask)) {
    out.push_back({lambdas[first], lambdas[last], first, last});
  }
  return out;
}

StabilityReport stability_report(const SpectrumModel& spec, const QuadratureRule& rule, const Eigen::VectorXd& lambdas,
                                 double r0) {
  if (!(r0 > 0.0)) {
    throw std::invalid_argument("tail-ratio tolerance r0 must be positive");
  }
  StabilityReport rep;
  rep.r0 = r0;
  rep.z_epsilon = rule.discarded_weight();
  rep.z_epsilon_leading = rule.leading_discarded_weight();
  rep.tau_epsilon = rule.leading_discarded_time();
  rep.lambdas = lambdas;

  const auto mbar = static_cast<double>(rule.mbar());
  if (rule.mbar() < rule.nodes.size()) {
    rep.delta_epsilon_linear = 2.0 * std::sqrt((2.0 * mbar - std::log(r0)) / rule.tau);
  }
  if (rep.z_epsilon > 0.0) {
    const double arg = std::log(1.0 / (r0 * rep.z_epsilon));
    if (arg > 0.0) {
      rep.d_epsilon = std::sqrt(arg / rule.tau);
      rep.delta_epsilon = 2.0 * rep.d_epsilon;
    } else {
      rep.radius_defined = false;
      rep.d_epsilon = std::numeric_limits<double>::quiet_NaN();
      rep.delta_epsilon = std::numeric_limits<double>::quiet_NaN();
    }
  }

  const PartitionValues z = partition_exact(spec.as_trace(), rule.tau, lambdas);
  rep.tail_ratio = (std::log(rep.z_epsilon) - z.log_Z.array()).exp();
  rep.unstable = rep.tail_ratio.array() > r0;
  if (!rep.radius_defined || rep.z_epsilon == 0.0) {
    rep.unstable.setConstant(lambdas.size(), false);
  }
  rep.unstable_intervals = intervals_from_mask(lambdas, rep.unstable);
  return rep;
}

namespace {

double quantile(std::vector<double> v, double q) {
  if (v.empty()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  const std::size_t j = std::min(i + 1, v.size() - 1);
  return v[i] + (pos - static_cast<double>(i)) * (v[j] - v[i]);
}

}  // namespace

OscillationDiagnostic oscillation_diagnostic(const StaircaseCurve& curve, Index window_pts, double threshold_factor) {
  const Index n = curve.size();
  if (window_pts < 1 || 2 * window_pts + 1 > n) {
    throw std::invalid_argument("oscillation window larger than the grid");
  }
  if (!is_uniform_grid(curve.lambdas)) {
    throw std::invalid_argument("oscillation diagnostic needs a uniform grid");
  }
  std::vector<double> finite;
  for (Index i = 0; i < n; ++i) {
    if (std::isfinite(curve.H[i])) {
      finite.push_back(curve.H[i]);
    }
  }
  double scale = quantile(finite, 0.95) - quantile(finite, 0.05);
  if (!(scale > 0.0)) {
    scale = 1.0;
  }

  // prefix sums of |dH| and dH, non-finite steps count as zero
  Eigen::VectorXd abs_sum = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd net_sum = Eigen::VectorXd::Zero(n);
  for (Index i = 1; i < n; ++i) {
    double d = curve.H[i] - curve.H[i - 1];
    if (!std::isfinite(d)) {
      d = 0.0;
    }
    abs_sum[i] = abs_sum[i - 1] + std::abs(d);
    net_sum[i] = net_sum[i - 1] + d;
  }

  OscillationDiagnostic out;
  out.score.resize(n);
  for (Index i = 0; i < n; ++i) {
    const Index lo = std::max<Index>(0, i - window_pts);
    const Index hi = std::min<Index>(n - 1, i + window_pts);
    const double tv = abs_sum[hi] - abs_sum[lo];
    const double net = std::abs(net_sum[hi] - net_sum[lo]);
    out.score[i] = std::max(0.0, tv - net) / scale;
  }
  std::vector<double> s(out.score.data(), out.score.data() + n);
  out.threshold = std::max(threshold_factor * quantile(s, 0.5), 1e-10);
  out.over_resolved = out.score.array() > out.threshold;
  out.intervals = intervals_from_mask(curve.lambdas, out.over_resolved);
  return out;
}

std::vector<Plateau> extract_plateaux(const StaircaseCurve& curve, std::optional<double> slope_tol, Index min_points) {
  const Index n = curve.size();
  std::vector<Plateau> out;
  if (n < 2) {
    return out;
  }
  double tol = 0.0;
  if (slope_tol) {
    tol = *slope_tol;
  } else {
    double hmin = std::numeric_limits<double>::infinity();
    double hmax = -hmin;
    for (Index i = 0; i < n; ++i) {
      if (std::isfinite(curve.H[i]) && !curve.flagged[i]) {
        hmin = std::min(hmin, curve.H[i]);
        hmax = std::max(hmax, curve.H[i]);
      }
    }
    const double span = curve.lambdas[n - 1] - curve.lambdas[0];
    tol = (hmax > hmin) ? 0.02 * (hmax - hmin) / span : 0.0;
    if (tol == 0.0) {
      tol = std::numeric_limits<double>::infinity();  // flat curve is one plateau
    }
  }

  ArrayXb flat(n);
  for (Index i = 0; i < n; ++i) {
    const Index a = std::max<Index>(0, i - 1);
    const Index b = std::min<Index>(n - 1, i + 1);
    const double slope = (curve.H[b] - curve.H[a]) / (curve.lambdas[b] - curve.lambdas[a]);
    flat[i] = std::isfinite(slope) && std::abs(slope) < tol && !curve.flagged[i];
  }
  for (const auto& [first, last] : true_runs(flat)) {
    if (last - first + 1 < min_points) {
      continue;
    }
    std::vector<double> h(curve.H.data() + first, curve.H.data() + last + 1);
    const double lo = curve.lambdas[first];
    const double hi = curve.lambdas[last];
    out.push_back({quantile(h, 0.5), lo, hi, hi - lo});
  }
  return out;
}

std::vector<CollapseRow> scaling_collapse(const std::vector<CollapseCase>& cases, Index grid_points) {
  std::vector<CollapseRow> rows;
  for (const CollapseCase& cs : cases) {
    const SpectrumModel spec = cs.spectrum.as_trace();
    const double norm = spec.spectral_norm();
    const double s = cs.tau * norm * norm;
    const int degree = static_cast<int>(std::ceil(cs.kappa * s));
    if (degree > kMaxHermiteDegree) {
      throw std::invalid_argument("collapse case needs a Gauss-Hermite degree above 500");
    }
    const Eigen::VectorXd lambdas = uniform_grid(spec.e_min(), spec.e_max(), grid_points);
    const StaircaseCurve exact = staircase_exact(spec, cs.tau, lambdas);
    const QuadratureRule rule = gauss_hermite_rule(degree, cs.tau);
    const auto order = weight_order(rule);

    const Eigen::ArrayXd w = spec.weights().array();
    const Eigen::ArrayXd we = w * spec.levels.array();
    Eigen::ArrayXd z = Eigen::ArrayXd::Zero(grid_points);
    Eigen::ArrayXd nn = Eigen::ArrayXd::Zero(grid_points);
    StaircaseCurve approx = exact;
    approx.provenance = Provenance::quadrature;
    approx.flagged.setConstant(grid_points, false);
    for (std::size_t k = 0; k < order.size(); ++k) {
      const double t = rule.node_time(order[k]);
      const double wk = rule.weights[order[k]];
      for (Index i = 0; i < grid_points; ++i) {
        const Eigen::ArrayXd c = (2.0 * t * (spec.levels.array() - lambdas[i])).cos();
        z[i] += wk * (w * c).sum();
        nn[i] += wk * (we * c).sum();
      }
      const auto mbar = static_cast<Index>(k + 1);
      if ((degree - mbar) % 2 != 0) {
        continue;  // only complete pairs
      }
      approx.H = (nn / z).matrix();
      const double eps = integrated_error(exact, approx, spec.e_min(), spec.e_max(), false).value;
      rows.push_back({s, mbar, eps, std::pow(eps, 1.0 / s), static_cast<double>(mbar) / s, degree});
    }
  }
  return rows;
}

double fit_slope(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("fit_slope needs two or more paired points");
  }
  const double mx = x.mean();
  const double my = y.mean();
  const Eigen::ArrayXd dx = x.array() - mx;
  return (dx * (y.array() - my)).sum() / dx.square().sum();
}

CollapseMetrics collapse_metrics(const std::vector<CollapseRow>& rows, double floor_factor, Index samples) {
  std::map<double, std::vector<CollapseRow>> by_s;
  for (const auto& r : rows) {
    by_s[r.s].push_back(r);
  }
  CollapseMetrics m;
  struct Curve {
    std::vector<double> x;
    std::vector<double> y;
  };
  std::vector<Curve> curves;
  m.common_lo = -std::numeric_limits<double>::infinity();
  m.common_hi = std::numeric_limits<double>::infinity();
  for (auto& [s, list] : by_s) {
    std::sort(list.begin(), list.end(), [](const auto& a, const auto& b) { return a.mbar < b.mbar; });
    const double floor = list.back().eps;
    Curve c;
    for (const auto& r : list) {
      if (r.eps < 1.0 && r.eps > floor_factor * floor && r.eps > 0.0) {
        c.x.push_back(r.mbar_over_s);
        c.y.push_back(std::log10(r.eps) / s);
      }
    }
    if (c.x.size() < 2) {
      return m;  // not enough asymptotic points
    }
    m.s_values.push_back(s);
    m.common_lo = std::max(m.common_lo, c.x.front());
    m.common_hi = std::min(m.common_hi, c.x.back());
    curves.push_back(std::move(c));
  }
  if (curves.empty() || !(m.common_hi > m.common_lo)) {
    return m;
  }
  auto interp = [](const Curve& c, double x) {
    const auto it = std::lower_bound(c.x.begin(), c.x.end(), x);
    if (it == c.x.begin()) {
      return c.y.front();
    }
    if (it == c.x.end()) {
      return c.y.back();
    }
    const auto j = static_cast<std::size_t>(it - c.x.begin());
    const double f = (x - c.x[j - 1]) / (c.x[j] - c.x[j - 1]);
    return c.y[j - 1] + f * (c.y[j] - c.y[j - 1]);
  };
  const Eigen::VectorXd grid = uniform_grid(m.common_lo, m.common_hi, samples);
  for (Index i = 0; i < grid.size(); ++i) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& c : curves) {
      const double v = interp(c, grid[i]);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    m.spread = std::max(m.spread, hi - lo);
  }
  for (const auto& c : curves) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = 0; i < c.x.size(); ++i) {
      if (c.x[i] >= m.common_lo && c.x[i] <= m.common_hi) {
        xs.push_back(c.x[i]);
        ys.push_back(c.y[i]);
      }
    }
    if (xs.size() < 2) {
      return m;
    }
    m.slopes.push_back(fit_slope(Eigen::Map<Eigen::VectorXd>(xs.data(), static_cast<Index>(xs.size())),
                                 Eigen::Map<Eigen::VectorXd>(ys.data(), static_cast<Index>(ys.size()))));
  }
  m.valid = true;
  return m;
}

}  // namespace staircase
