#pragma once

#include "staircase/curve.hpp"
#include "staircase/itqde.hpp"
#include "staircase/model.hpp"

#include <complex>
#include <cstdint>
#include <optional>

namespace staircase {

/// Standard complex Gaussian vector normalized to unit length, drawn from
/// substream `stream` of `seed`.
[[nodiscard]] Eigen::VectorXcd haar_state(Index dim, std::uint64_t seed, std::uint64_t stream);

/// K Haar states (columns), state i drawn from substream first_stream + i.
[[nodiscard]] Eigen::MatrixXcd haar_states(Index dim, Index count, std::uint64_t seed, std::uint64_t first_stream = 0);

/// A batch of K random states reduced to what the filters see: the population
/// of every distinct level in every state. Row i belongs to state i.
struct SampleBatch {
  Index K = 0;
  std::uint64_t seed = 0;
  Index dim = 0;
  Eigen::MatrixXd level_populations;  // K x levels

  /// Per-state <phi|e^{-2i tau_k H}|phi> for the retained nodes (K x mbar).
  [[nodiscard]] Eigen::MatrixXcd z_samples(const SpectrumModel& spec, const QuadratureRule& rule) const;
  /// Per-state <phi|H e^{-2i tau_k H}|phi>.
  [[nodiscard]] Eigen::MatrixXcd n_samples(const SpectrumModel& spec, const QuadratureRule& rule) const;
};

/// Draws K states (streams first_stream .. first_stream+K-1) and projects them
/// onto the eigenspaces of `eig`.
[[nodiscard]] SampleBatch draw_sample_batch(const EigenSystem& eig, Index K, std::uint64_t seed,
                                            std::uint64_t first_stream = 0);

/// z_k = D * batch mean, so sampled overlaps estimate traces.
[[nodiscard]] OverlapSet sampled_overlaps(const EigenSystem& eig, const SampleBatch& batch, const QuadratureRule& rule);

struct SampledOverlaps {
  OverlapSet overlaps;
  SampleBatch batch;
};

[[nodiscard]] SampledOverlaps sampled_overlaps(const EigenSystem& eig, const QuadratureRule& rule, Index K,
                                               std::uint64_t seed);

struct HaarMoments {
  std::complex<double> mean;
  double variance = 0.0;
};

/// Single-state moments of <phi|O|phi> under Haar states:
/// mean Tr O / D, variance [Tr O^+O - |Tr O|^2 / D] / (D(D+1)).
[[nodiscard]] HaarMoments haar_moments(const Eigen::MatrixXcd& op);
[[nodiscard]] HaarMoments haar_moments_diagonal(const Eigen::VectorXcd& diag);

/// Covariance of the K-state batch means of <N> and <Z>:
/// [Tr N^+Z - conj(Tr N) Tr Z / D] / (K D (D+1)).
[[nodiscard]] std::complex<double> haar_covariance(const Eigen::MatrixXcd& n_op, const Eigen::MatrixXcd& z_op, Index K);

/// Per-lambda sampled statistics and their analytic predictions. Means and
/// (co)variances are of the single-state D-rescaled estimates; divide by K for
/// the batch mean.
struct EstimatorStats {
  Eigen::VectorXd lambdas;
  Eigen::VectorXd mean_N;
  Eigen::VectorXd mean_Z;
  Eigen::VectorXd var_N;
  Eigen::VectorXd var_Z;
  Eigen::VectorXd cov_NZ;
  Eigen::VectorXd c_lambda;
  Eigen::VectorXd Q_lambda;
  Eigen::VectorXd c_bound;
  Eigen::VectorXd rel_stderr_pred;
  ArrayXb flagged;
  Index K = 0;
};

/// Predictions only: c(lambda) and Q(lambda) from exact traces of the
/// Gaussian filter at width tau. Points with Tr Z < z_floor are flagged; the
/// default floor D / sqrt(K) marks where the additive sampling noise
/// reaches the mean.
[[nodiscard]] EstimatorStats ratio_error_prediction(const SpectrumModel& spec, double tau,
                                                    const Eigen::VectorXd& lambdas, Index K,
                                                    std::optional<double> z_floor = std::nullopt);

struct SampledStaircase {
  StaircaseCurve curve;
  EstimatorStats stats;
};

/// Sampled quadrature staircase from one shared batch, plus its sample
/// statistics. Predictions are filled from ratio_error_prediction.
[[nodiscard]] SampledStaircase staircase_sampled(const SpectrumModel& spec, const SampleBatch& batch,
                                                 const QuadratureRule& rule, const Eigen::VectorXd& lambdas);

/// sqrt(ln K / (2 tau)).
[[nodiscard]] double resolvable_gap_from_K(double K, double tau);

/// exp(c (delta_max/delta_min)^2).
[[nodiscard]] double shot_budget_bound(double delta_min, double delta_max, double c_const = 1.0);

}  // namespace staircase
