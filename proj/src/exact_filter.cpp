#include "staircase/exact_filter.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace staircase {

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::exact:
      return "exact";
    case Provenance::quadrature:
      return "quadrature";
    case Provenance::binomial:
      return "binomial";
    case Provenance::sampled:
      return "sampled";
    case Provenance::smoothed:
      return "smoothed";
  }
  return "unknown";
}

namespace {

void check_inputs(const SpectrumModel& spec, double tau, const Eigen::VectorXd& lambdas) {
  if (spec.size() == 0) {
    throw std::invalid_argument("spectrum has no levels");
  }
  if (!(tau >= 0.0) || !std::isfinite(tau)) {
    throw std::invalid_argument("tau must be finite and non-negative");
  }
  if (lambdas.size() == 0) {
    throw std::invalid_argument("lambda grid is empty");
  }
}

}  // namespace

StaircaseCurve staircase_exact(const SpectrumModel& spec, double tau, const Eigen::VectorXd& lambdas) {
  check_inputs(spec, tau, lambdas);
  const Eigen::ArrayXd log_w = spec.weights().array().log();
  const Eigen::ArrayXd e = spec.levels.array();

  StaircaseCurve c;
  c.lambdas = lambdas;
  c.resize(lambdas.size());
  c.provenance = Provenance::exact;
  c.tau = tau;
  for (Index i = 0; i < lambdas.size(); ++i) {
    const Eigen::ArrayXd a = log_w - tau * (e - lambdas[i]).square();
    const double mx = a.maxCoeff();
    const Eigen::ArrayXd s = (a - mx).exp();
    const double z = s.sum();
    const double n = (s * e).sum();
    c.log_Z[i] = mx + std::log(z);
    c.Z[i] = std::exp(c.log_Z[i]);
    c.N[i] = n * std::exp(mx);
    c.H[i] = n / z;
  }
  return c;
}

PartitionValues partition_exact(const SpectrumModel& spec, double tau, const Eigen::VectorXd& lambdas) {
  check_inputs(spec, tau, lambdas);
  const Eigen::ArrayXd log_w = spec.weights().array().log();
  PartitionValues out;
  out.log_Z.resize(lambdas.size());
  for (Index i = 0; i < lambdas.size(); ++i) {
    out.log_Z[i] = log_sum_exp(log_w - tau * (spec.levels.array() - lambdas[i]).square());
  }
  out.Z = out.log_Z.array().exp();
  return out;
}

Eigen::VectorXd logistic_two_level(double e_j, double e_j1, double r_j, double tau, const Eigen::VectorXd& lambdas) {
  if (!(e_j < e_j1)) {
    throw std::invalid_argument("logistic_two_level needs E_j < E_j1");
  }
  if (!(r_j > 0.0)) {
    throw std::invalid_argument("logistic_two_level needs R_j > 0");
  }
  const double delta = 0.5 * (e_j1 - e_j);
  const double mid = 0.5 * (e_j + e_j1);
  // 1/(1 + R e^{-x}) written through log1p/exp to stay finite for huge |x|
  const Eigen::ArrayXd x = 4.0 * tau * delta * (lambdas.array() - mid) - std::log(r_j);
  Eigen::VectorXd out(lambdas.size());
  for (Index i = 0; i < lambdas.size(); ++i) {
    const double sig = x[i] >= 0.0 ? 1.0 / (1.0 + std::exp(-x[i])) : std::exp(x[i]) / (1.0 + std::exp(x[i]));
    out[i] = e_j + 2.0 * delta * sig;
  }
  return out;
}

double accuracy_bound(double delta_j, double tau) {
  if (!(delta_j > 0.0) || !(tau >= 0.0)) {
    throw std::invalid_argument("accuracy_bound needs delta_j > 0 and tau >= 0");
  }
  return delta_j * std::exp(-tau * delta_j * delta_j);
}

TauForAccuracy tau_for_accuracy(double delta_j, double eps) {
  if (!(delta_j > 0.0) || !(eps > 0.0)) {
    throw std::invalid_argument("tau_for_accuracy needs delta_j > 0 and eps > 0");
  }
  if (eps >= delta_j) {
    return {0.0, true};
  }
  return {std::log(delta_j / eps) / (delta_j * delta_j), false};
}

Eigen::VectorXd default_lambda_grid(const SpectrumModel& spec, double tau, Index points) {
  if (points < 1) {
    throw std::invalid_argument("lambda grid needs at least one point");
  }
  double margin = 0.0;
  if (tau > 0.0) {
    margin = 3.0 / std::sqrt(tau);
  } else {
    margin = spec.e_max() - spec.e_min();
    if (margin == 0.0) {
      margin = 1.0;
    }
  }
  return uniform_grid(spec.e_min() - margin, spec.e_max() + margin, points);
}

}  // namespace staircase
