#include "staircase/sampling.hpp"

#include "staircase/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace staircase {

namespace {

using cd = std::complex<double>;

constexpr Index kChunk = 1024;

// K x levels population matrix times per-level per-node phases.
Eigen::MatrixXcd level_phases(const SpectrumModel& spec, const QuadratureRule& rule, bool with_energy) {
  const auto nk = static_cast<Index>(rule.retained.size());
  Eigen::MatrixXcd p(spec.size(), nk);
  for (Index k = 0; k < nk; ++k) {
    const double t = rule.node_time(rule.retained[static_cast<std::size_t>(k)]);
    for (Index j = 0; j < spec.size(); ++j) {
      const double e = spec.levels[j];
      p(j, k) = (with_energy ? e : 1.0) * std::polar(1.0, -2.0 * t * e);
    }
  }
  return p;
}

double trace_floor(Index dim, Index K) { return static_cast<double>(dim) / std::sqrt(static_cast<double>(K)); }

}  // namespace

Eigen::VectorXcd haar_state(Index dim, std::uint64_t seed, std::uint64_t stream) {
  if (dim < 1) {
    throw std::invalid_argument("state dimension must be positive");
  }
  auto engine = substream(seed, stream);
  Eigen::VectorXcd v(dim);
  for (Index i = 0; i < dim; ++i) {
    const double re = standard_normal(engine);
    const double im = standard_normal(engine);
    v[i] = {re, im};
  }
  v /= v.norm();
  return v;
}

Eigen::MatrixXcd haar_states(Index dim, Index count, std::uint64_t seed, std::uint64_t first_stream) {
  Eigen::MatrixXcd out(dim, count);
  for (Index i = 0; i < count; ++i) {
    out.col(i) = haar_state(dim, seed, first_stream + static_cast<std::uint64_t>(i));
  }
  return out;
}

Eigen::MatrixXcd SampleBatch::z_samples(const SpectrumModel& spec, const QuadratureRule& rule) const {
  return level_populations.cast<cd>() * level_phases(spec, rule, false);
}

Eigen::MatrixXcd SampleBatch::n_samples(const SpectrumModel& spec, const QuadratureRule& rule) const {
  return level_populations.cast<cd>() * level_phases(spec, rule, true);
}

SampleBatch draw_sample_batch(const EigenSystem& eig, Index K, std::uint64_t seed, std::uint64_t first_stream) {
  if (K < 2) {
    throw std::invalid_argument("sampling needs K >= 2 states");
  }
  const Index dim = eig.dim();
  const Index levels = eig.spectrum.size();
  SampleBatch batch;
  batch.K = K;
  batch.seed = seed;
  batch.dim = dim;
  batch.level_populations.setZero(K, levels);

  // aggregation matrix: eigenvector -> level
  Eigen::MatrixXd agg = Eigen::MatrixXd::Zero(dim, levels);
  for (Index i = 0; i < dim; ++i) {
    agg(i, eig.level_of[static_cast<std::size_t>(i)]) = 1.0;
  }
  const Eigen::MatrixXcd vt = eig.eigenvectors.adjoint();
  for (Index start = 0; start < K; start += kChunk) {
    const Index count = std::min(kChunk, K - start);
    const Eigen::MatrixXcd phi = haar_states(dim, count, seed, first_stream + static_cast<std::uint64_t>(start));
    const Eigen::MatrixXd pop = (vt * phi).cwiseAbs2();
    batch.level_populations.middleRows(start, count) = pop.transpose() * agg;
  }
  return batch;
}

OverlapSet sampled_overlaps(const EigenSystem& eig, const SampleBatch& batch, const QuadratureRule& rule) {
  const SpectrumModel& spec = eig.spectrum;
  const auto d = static_cast<double>(batch.dim);
  OverlapSet out;
  out.mode = SpectrumMode::trace;
  out.source = OverlapSource::sampled;
  out.node_index = rule.retained;
  const auto nk = static_cast<Index>(rule.retained.size());
  out.tau_k.resize(nk);
  for (Index k = 0; k < nk; ++k) {
    out.tau_k[k] = rule.node_time(rule.retained[static_cast<std::size_t>(k)]);
  }
  out.z = d * batch.z_samples(spec, rule).colwise().mean().transpose();
  out.n = d * batch.n_samples(spec, rule).colwise().mean().transpose();
  out.total_weight = d;
  return out;
}

SampledOverlaps sampled_overlaps(const EigenSystem& eig, const QuadratureRule& rule, Index K, std::uint64_t seed) {
  SampledOverlaps out;
  out.batch = draw_sample_batch(eig, K, seed);
  out.overlaps = sampled_overlaps(eig, out.batch, rule);
  return out;
}

HaarMoments haar_moments(const Eigen::MatrixXcd& op) {
  if (op.rows() != op.cols() || op.rows() == 0) {
    throw std::invalid_argument("haar_moments needs a non-empty square operator");
  }
  const auto d = static_cast<double>(op.rows());
  const cd tr = op.trace();
  const double tr_sq = op.cwiseAbs2().sum();  // Tr(O^+ O)
  return {tr / d, (tr_sq - std::norm(tr) / d) / (d * (d + 1.0))};
}

HaarMoments haar_moments_diagonal(const Eigen::VectorXcd& diag) {
  if (diag.size() == 0) {
    throw std::invalid_argument("haar_moments needs a non-empty operator");
  }
  const auto d = static_cast<double>(diag.size());
  const cd tr = diag.sum();
  const double tr_sq = diag.cwiseAbs2().sum();
  return {tr / d, (tr_sq - std::norm(tr) / d) / (d * (d + 1.0))};
}

std::complex<double> haar_covariance(const Eigen::MatrixXcd& n_op, const Eigen::MatrixXcd& z_op, Index K) {
  if (n_op.rows() != z_op.rows() || n_op.cols() != z_op.cols() || n_op.rows() != n_op.cols() || K < 1) {
    throw std::invalid_argument("haar_covariance needs equal square operators and K >= 1");
  }
  const auto d = static_cast<double>(n_op.rows());
  const cd tr_nz = (n_op.adjoint() * z_op).trace();
  const cd tr_n = n_op.trace();
  const cd tr_z = z_op.trace();
  return (tr_nz - std::conj(tr_n) * tr_z / d) / (static_cast<double>(K) * d * (d + 1.0));
}

EstimatorStats ratio_error_prediction(const SpectrumModel& spec, double tau, const Eigen::VectorXd& lambdas, Index K,
                                      std::optional<double> z_floor) {
  if (K < 2) {
    throw std::invalid_argument("predictions need K >= 2");
  }
  const SpectrumModel tr = spec.as_trace();
  const Index n = lambdas.size();
  const auto d = static_cast<double>(tr.dimension());
  const double floor = z_floor.value_or(trace_floor(tr.dimension(), K));
  const Eigen::ArrayXd g = tr.degeneracies.cast<double>().array();
  const Eigen::ArrayXd e = tr.levels.array();
  const double norm = tr.spectral_norm();

  EstimatorStats s;
  s.lambdas = lambdas;
  s.K = K;
  for (auto* v : {&s.mean_N, &s.mean_Z, &s.var_N, &s.var_Z, &s.cov_NZ, &s.c_lambda, &s.Q_lambda, &s.c_bound,
                  &s.rel_stderr_pred}) {
    v->setZero(n);
  }
  s.flagged.setConstant(n, false);
  for (Index i = 0; i < n; ++i) {
    const Eigen::ArrayXd a = -tau * (e - lambdas[i]).square();
    const double mx = a.maxCoeff();
    const Eigen::ArrayXd f = (a - mx).exp();  // shifted filter values
    const double scale = std::exp(mx);
    const double tz = (g * f).sum();
    const double tn = (g * e * f).sum();
    const double tz2 = (g * f * f).sum();
    const double tn2 = (g * e * e * f * f).sum();
    const double tnz = (g * e * f * f).sum();
    const double c2 = tn2 / (tn * tn) + tz2 / (tz * tz) - 2.0 * tnz / (tn * tz);
    s.c_lambda[i] = std::sqrt(std::max(0.0, c2));
    s.Q_lambda[i] = tz2 / (tz * tz);
    const double h = tn / tz;
    s.c_bound[i] = std::sqrt(s.Q_lambda[i]) * (norm / std::abs(h) + 1.0);
    s.rel_stderr_pred[i] = std::sqrt(d / (d + 1.0)) * s.c_lambda[i] / std::sqrt(static_cast<double>(K));
    // single-state D-rescaled moments
    s.mean_Z[i] = tz * scale;
    s.mean_N[i] = tn * scale;
    const double denom = d * (d + 1.0);
    s.var_Z[i] = d * d * (tz2 - tz * tz / d) / denom * scale * scale;
    s.var_N[i] = d * d * (tn2 - tn * tn / d) / denom * scale * scale;
    s.cov_NZ[i] = d * d * (tnz - tn * tz / d) / denom * scale * scale;
    s.flagged[i] = !(tz * scale >= floor);
  }
  return s;
}

SampledStaircase staircase_sampled(const SpectrumModel& spec, const SampleBatch& batch, const QuadratureRule& rule,
                                   const Eigen::VectorXd& lambdas) {
  if (batch.level_populations.cols() != spec.size()) {
    throw std::invalid_argument("sample batch was drawn for a different spectrum");
  }
  const auto d = static_cast<double>(batch.dim);
  const auto kd = static_cast<double>(batch.K);
  const Eigen::MatrixXd f = quadrature_filter(spec.levels, rule, lambdas);  // levels x lambdas
  const Eigen::MatrixXd zs = d * (batch.level_populations * f);             // K x lambdas
  const Eigen::MatrixXd ns = d * (batch.level_populations * spec.levels.asDiagonal() * f);

  SampledStaircase out;
  out.stats = ratio_error_prediction(spec, rule.tau, lambdas, batch.K);
  EstimatorStats& s = out.stats;
  s.mean_Z = zs.colwise().mean().transpose();
  s.mean_N = ns.colwise().mean().transpose();
  for (Index i = 0; i < lambdas.size(); ++i) {
    const Eigen::ArrayXd dz = zs.col(i).array() - s.mean_Z[i];
    const Eigen::ArrayXd dn = ns.col(i).array() - s.mean_N[i];
    s.var_Z[i] = dz.square().sum() / (kd - 1.0);
    s.var_N[i] = dn.square().sum() / (kd - 1.0);
    s.cov_NZ[i] = (dz * dn).sum() / (kd - 1.0);
  }

  StaircaseCurve& c = out.curve;
  c.lambdas = lambdas;
  c.resize(lambdas.size());
  c.provenance = Provenance::sampled;
  c.tau = rule.tau;
  c.Z = s.mean_Z;
  c.N = s.mean_N;
  for (Index i = 0; i < lambdas.size(); ++i) {
    c.log_Z[i] = c.Z[i] > 0.0 ? std::log(c.Z[i]) : std::numeric_limits<double>::quiet_NaN();
    c.H[i] = c.Z[i] != 0.0 ? c.N[i] / c.Z[i] : std::numeric_limits<double>::quiet_NaN();
    c.flagged[i] = s.flagged[i] || c.Z[i] == 0.0;
  }
  return out;
}

double resolvable_gap_from_K(double K, double tau) {
  if (!(K >= 2.0) || !(tau > 0.0)) {
    throw std::invalid_argument("resolvable_gap_from_K needs K >= 2 and tau > 0");
  }
  return std::sqrt(std::log(K) / (2.0 * tau));
}

double shot_budget_bound(double delta_min, double delta_max, double c_const) {
  if (!(delta_min > 0.0) || !(delta_max >= delta_min)) {
    throw std::invalid_argument("shot_budget_bound needs 0 < delta_min <= delta_max");
  }
  const double k = delta_max / delta_min;
  return std::exp(c_const * k * k);
}

}  // namespace staircase
