#include "staircase/itqde.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace staircase {

namespace {

using cd = std::complex<double>;

struct HermiteEval {
  double h_m = 0.0;       // scaled h_m(x)
  double h_m1 = 0.0;      // scaled h_{m-1}(x)
  double log_sum_sq = 0.0;  // log sum_{j<m} h_j(x)^2, unscaled
};

// Orthonormal Hermite polynomials (weight e^{-x^2}) by three-term recurrence,
// rescaled on the fly; h_m and h_{m-1} share one scale factor.
HermiteEval hermite_eval(int m, double x) {
  constexpr double kBig = 1e100;
  const double log_big = std::log(kBig);
  double prev = 0.0;
  double cur = std::pow(std::numbers::pi, -0.25);
  double sum_sq = cur * cur;
  double log_scale = 0.0;
  for (int j = 0; j < m; ++j) {
    const double next = std::sqrt(2.0 / (j + 1)) * x * cur - std::sqrt(static_cast<double>(j) / (j + 1)) * prev;
    prev = cur;
    cur = next;
    if (j + 1 < m) {
      sum_sq += cur * cur;
    }
    if (std::abs(cur) > kBig) {
      prev /= kBig;
      cur /= kBig;
      sum_sq /= kBig * kBig;
      log_scale += log_big;
    }
  }
  return {cur, prev, std::log(sum_sq) + 2.0 * log_scale};
}

}  // namespace

std::vector<Index> QuadratureRule::discarded() const {
  std::vector<char> kept(static_cast<std::size_t>(nodes.size()), 0);
  for (Index k : retained) {
    kept[static_cast<std::size_t>(k)] = 1;
  }
  std::vector<Index> out;
  for (Index k : weight_order(*this)) {
    if (kept[static_cast<std::size_t>(k)] == 0) {
      out.push_back(k);
    }
  }
  return out;
}

double QuadratureRule::discarded_weight() const {
  const auto d = discarded();
  double sum = 0.0;
  for (auto it = d.rbegin(); it != d.rend(); ++it) {
    sum += weights[*it];
  }
  return sum;
}

double QuadratureRule::leading_discarded_weight() const {
  const auto d = discarded();
  return d.empty() ? 0.0 : weights[d.front()];
}

double QuadratureRule::leading_discarded_time() const {
  const auto d = discarded();
  return d.empty() ? 0.0 : std::abs(node_time(d.front()));
}

QuadratureRule gauss_hermite_rule(int m, double tau) {
  if (m < 1 || m > kMaxHermiteDegree) {
    throw std::invalid_argument("Gauss-Hermite degree must lie in [1, 500]");
  }
  if (!(tau >= 0.0) || !std::isfinite(tau)) {
    throw std::invalid_argument("tau must be finite and non-negative");
  }
  QuadratureRule rule;
  rule.degree = m;
  rule.tau = tau;
  rule.nodes.resize(m);
  rule.log_weights.resize(m);

  if (m == 1) {
    rule.nodes[0] = 0.0;
    rule.log_weights[0] = 0.0;
  } else {
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd sub(m - 1);
    for (int k = 1; k < m; ++k) {
      sub[k - 1] = std::sqrt(0.5 * k);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
      throw NumericalError("Jacobi matrix eigensolve did not converge");
    }
    rule.nodes = solver.eigenvalues();

    // h_m' = sqrt(2m) h_{m-1}
    const double dscale = std::sqrt(2.0 * m);
    for (int k = 0; k < m; ++k) {
      double x = rule.nodes[k];
      for (int it = 0; it < 8; ++it) {
        const HermiteEval ev = hermite_eval(m, x);
        const double step = ev.h_m / (dscale * ev.h_m1);
        x -= step;
        if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) {
          break;
        }
      }
      rule.nodes[k] = x;
      // Christoffel numbers 1 / sum_{j<m} h_j(x)^2; normalized below
      rule.log_weights[k] = -hermite_eval(m, x).log_sum_sq;
    }

    // exact mirror symmetry
    for (int k = 0; k < m / 2; ++k) {
      const int p = m - 1 - k;
      const double x = 0.5 * (rule.nodes[p] - rule.nodes[k]);
      const double lw = 0.5 * (rule.log_weights[p] + rule.log_weights[k]);
      rule.nodes[k] = -x;
      rule.nodes[p] = x;
      rule.log_weights[k] = lw;
      rule.log_weights[p] = lw;
    }
    if (m % 2 == 1) {
      rule.nodes[m / 2] = 0.0;
    }
    rule.log_weights.array() -= log_sum_exp(rule.log_weights);
  }
  // scalar exp so mirrored nodes keep bit-identical weights
  rule.weights = rule.log_weights.unaryExpr([](double v) { return std::exp(v); });
  rule.retained = weight_order(rule);
  return rule;
}

std::vector<Index> weight_order(const QuadratureRule& rule) {
  // weights fall monotonically with |x|, so ordering by |x| (negative node
  // first within a pair) is the descending-weight order with pairs adjacent
  std::vector<Index> order(static_cast<std::size_t>(rule.nodes.size()));
  for (Index k = 0; k < rule.nodes.size(); ++k) {
    order[static_cast<std::size_t>(k)] = k;
  }
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    const double xa = std::abs(rule.nodes[a]);
    const double xb = std::abs(rule.nodes[b]);
    if (xa != xb) {
      return xa < xb;
    }
    return rule.nodes[a] < rule.nodes[b];
  });
  return order;
}

QuadratureRule truncate_rule(const QuadratureRule& rule, Index mbar) {
  const Index m = rule.nodes.size();
  if (mbar < 1 || mbar > m) {
    throw std::invalid_argument("mbar must lie in [1, m]");
  }
  if ((m - mbar) % 2 == 1) {
    ++mbar;  // keep the partner of the last node
  }
  QuadratureRule out = rule;
  auto order = weight_order(rule);
  order.resize(static_cast<std::size_t>(mbar));
  out.retained = std::move(order);
  return out;
}

QuadratureRule truncate_rule_eps(const QuadratureRule& rule, double eps) {
  if (!(eps > 0.0) || eps > 1.0) {
    throw std::invalid_argument("eps must lie in (0, 1]");
  }
  const Index m = rule.nodes.size();
  const auto order = weight_order(rule);
  // tail[i] = sum of weights of order[i..], smallest first
  std::vector<double> tail(static_cast<std::size_t>(m) + 1, 0.0);
  for (Index i = m - 1; i >= 0; --i) {
    tail[static_cast<std::size_t>(i)] = tail[static_cast<std::size_t>(i) + 1] + rule.weights[order[static_cast<std::size_t>(i)]];
  }
  for (Index mbar = (m % 2 == 1) ? 1 : 2; mbar <= m; mbar += 2) {
    if (tail[static_cast<std::size_t>(mbar)] < eps) {
      return truncate_rule(rule, mbar);
    }
  }
  return truncate_rule(rule, m);
}

MbarRecommendation mbar_for_precision(double s, double eps, double kappa) {
  if (!(s > 0.0) || !(eps > 0.0 && eps < 1.0) || !(kappa > 1.0)) {
    throw std::invalid_argument("mbar_for_precision needs s > 0, eps in (0,1), kappa > 1");
  }
  constexpr double d = 2.0;
  const double gamma = kappa * std::log(kappa);
  MbarRecommendation r;
  r.degree = static_cast<Index>(std::ceil(kappa * s));
  const auto from_s = static_cast<Index>(std::ceil(gamma / d * s));
  const auto from_eps = static_cast<Index>(std::ceil(std::log(1.0 / eps) / d));
  r.mbar = std::max<Index>({from_s, from_eps, 1});
  return r;
}

OverlapSet compute_overlaps(const SpectrumModel& spec, const QuadratureRule& rule) {
  const Eigen::ArrayXd w = spec.weights().array();
  const Eigen::ArrayXd e = spec.levels.array();
  OverlapSet out;
  out.mode = spec.mode;
  out.source = OverlapSource::exact_eigenbasis;
  out.total_weight = w.sum();
  out.node_index = rule.retained;
  const auto nk = static_cast<Index>(rule.retained.size());
  out.tau_k.resize(nk);
  out.z.resize(nk);
  out.n.resize(nk);
  for (Index i = 0; i < nk; ++i) {
    const double t = rule.node_time(rule.retained[static_cast<std::size_t>(i)]);
    out.tau_k[i] = t;
    const Eigen::ArrayXd phase = -2.0 * t * e;
    const double re = (w * phase.cos()).sum();
    const double im = (w * phase.sin()).sum();
    const double nre = (w * e * phase.cos()).sum();
    const double nim = (w * e * phase.sin()).sum();
    out.z[i] = {re, im};
    out.n[i] = {nre, nim};
  }
  return out;
}

double default_z_floor(const QuadratureRule& rule, double total_weight) {
  return 10.0 * rule.discarded_weight() * total_weight;
}

StaircaseCurve staircase_quadrature(const OverlapSet& overlaps, const QuadratureRule& rule,
                                    const Eigen::VectorXd& lambdas, std::optional<double> z_floor) {
  if (overlaps.node_index != rule.retained) {
    throw std::invalid_argument("overlaps were computed for a different set of retained nodes");
  }
  const double floor = z_floor.value_or(default_z_floor(rule, overlaps.total_weight));
  StaircaseCurve c;
  c.lambdas = lambdas;
  c.resize(lambdas.size());
  c.provenance = Provenance::quadrature;
  c.tau = rule.tau;
  for (Index i = 0; i < lambdas.size(); ++i) {
    double z = 0.0;
    double n = 0.0;
    for (Index k = 0; k < overlaps.size(); ++k) {
      const double w = rule.weights[overlaps.node_index[static_cast<std::size_t>(k)]];
      const cd ph = std::polar(1.0, 2.0 * lambdas[i] * overlaps.tau_k[k]);
      z += w * (ph * overlaps.z[k]).real();
      n += w * (ph * overlaps.n[k]).real();
    }
    c.Z[i] = z;
    c.N[i] = n;
    c.log_Z[i] = z > 0.0 ? std::log(z) : std::numeric_limits<double>::quiet_NaN();
    if (z == 0.0) {
      c.H[i] = std::numeric_limits<double>::quiet_NaN();
      c.flagged[i] = true;
    } else {
      c.H[i] = n / z;
      c.flagged[i] = std::abs(z) < floor;
    }
  }
  return c;
}

Eigen::MatrixXd quadrature_filter(const Eigen::VectorXd& levels, const QuadratureRule& rule,
                                  const Eigen::VectorXd& lambdas) {
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(levels.size(), lambdas.size());
  for (Index k : rule.retained) {
    const double t = rule.node_time(k);
    const double w = rule.weights[k];
    for (Index i = 0; i < lambdas.size(); ++i) {
      f.col(i).array() += w * (2.0 * t * (levels.array() - lambdas[i])).cos();
    }
  }
  return f;
}

int binomial_steps(double tau, double dtau) {
  if (!(tau > 0.0) || !(dtau > 0.0)) {
    throw std::invalid_argument("binomial estimator needs tau > 0 and dtau > 0");
  }
  const double ratio = tau / dtau;
  const double m = std::round(ratio);
  if (std::abs(ratio - m) > 1e-9 * std::max(1.0, ratio) || m < 1.0 || m > 1e8) {
    throw std::invalid_argument("tau/dtau must be a positive integer");
  }
  if (static_cast<long long>(m) % 2 != 0) {
    throw std::invalid_argument("tau/dtau must be even");
  }
  return static_cast<int>(m);
}

StaircaseCurve staircase_binomial(const SpectrumModel& spec, double tau, double dtau, const Eigen::VectorXd& lambdas) {
  const int m = binomial_steps(tau, dtau);
  const int half = m / 2;
  const double a = std::sqrt(0.5 * dtau);
  const Eigen::ArrayXd w = spec.weights().array();
  const Eigen::ArrayXd e = spec.levels.array();

  // c_j = 2^{-m} C(m, m/2 + j), doubled for j > 0 to account for the c.c. term
  const double log_norm = std::lgamma(m + 1.0) - m * std::numbers::ln2;
  std::vector<double> coeff(static_cast<std::size_t>(half) + 1);
  for (int j = 0; j <= half; ++j) {
    const double lc = log_norm - std::lgamma(half + j + 1.0) - std::lgamma(half - j + 1.0);
    coeff[static_cast<std::size_t>(j)] = (j == 0 ? 1.0 : 2.0) * std::exp(lc);
  }
  // overlaps <psi_{2j}|psi_{-2j}> = <e^{4ijaH}>, and with H inserted
  std::vector<cd> oz(static_cast<std::size_t>(half) + 1);
  std::vector<cd> on(static_cast<std::size_t>(half) + 1);
  for (int j = 0; j <= half; ++j) {
    const Eigen::ArrayXd phase = 4.0 * j * a * e;
    oz[static_cast<std::size_t>(j)] = {(w * phase.cos()).sum(), (w * phase.sin()).sum()};
    on[static_cast<std::size_t>(j)] = {(w * e * phase.cos()).sum(), (w * e * phase.sin()).sum()};
  }

  StaircaseCurve c;
  c.lambdas = lambdas;
  c.resize(lambdas.size());
  c.provenance = Provenance::binomial;
  c.tau = tau;
  for (Index i = 0; i < lambdas.size(); ++i) {
    double z = 0.0;
    double n = 0.0;
    for (int j = 0; j <= half; ++j) {
      if (coeff[static_cast<std::size_t>(j)] == 0.0) {
        continue;
      }
      const cd ph = std::polar(1.0, -4.0 * j * a * lambdas[i]);
      z += coeff[static_cast<std::size_t>(j)] * (ph * oz[static_cast<std::size_t>(j)]).real();
      n += coeff[static_cast<std::size_t>(j)] * (ph * on[static_cast<std::size_t>(j)]).real();
    }
    c.Z[i] = z;
    c.N[i] = n;
    c.log_Z[i] = z > 0.0 ? std::log(z) : std::numeric_limits<double>::quiet_NaN();
    if (z == 0.0) {
      c.H[i] = std::numeric_limits<double>::quiet_NaN();
      c.flagged[i] = true;
    } else {
      c.H[i] = n / z;
    }
  }
  return c;
}

QuadratureBound quadrature_error_bound(double tau, double norm, int m) {
  if (!(tau >= 0.0) || !(norm >= 0.0) || m < 1) {
    throw std::invalid_argument("quadrature_error_bound needs tau >= 0, norm >= 0, m >= 1");
  }
  QuadratureBound b;
  if (tau == 0.0 || norm == 0.0) {
    b.log_bound = -std::numeric_limits<double>::infinity();
    b.log_asymptotic = b.log_bound;
    return b;
  }
  const double md = m;
  b.log_bound = (md + 0.5) * std::log(md + 1.0) - (2.0 * md + 0.5) * std::log(2.0 * md + 1.0) +
                1.0 / (12.0 * md + 12.0) + md * std::log(2.0 * tau * std::numbers::e) + 2.0 * md * std::log(norm);
  b.log_asymptotic = md * std::log(tau * std::numbers::e / (2.0 * md)) + 2.0 * md * std::log(norm);
  b.bound = std::exp(b.log_bound);
  b.asymptotic = std::exp(b.log_asymptotic);
  return b;
}

}  // namespace staircase
