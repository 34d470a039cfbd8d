#pragma once

#include "staircase/curve.hpp"
#include "staircase/model.hpp"

#include <optional>
#include <vector>

namespace staircase {

inline constexpr int kMaxHermiteDegree = 500;

/// Gauss-Hermite rule with weights normalized to sum to one. Nodes are
/// ascending; `retained` lists kept node indices by descending weight.
struct QuadratureRule {
  int degree = 0;
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
  Eigen::VectorXd log_weights;
  double tau = 0.0;
  std::vector<Index> retained;

  [[nodiscard]] Index mbar() const { return static_cast<Index>(retained.size()); }
  [[nodiscard]] double node_time(Index k) const { return std::sqrt(tau) * nodes[k]; }
  /// Indices not in `retained`, by descending weight.
  [[nodiscard]] std::vector<Index> discarded() const;
  /// Sum of discarded weights, accumulated smallest first.
  [[nodiscard]] double discarded_weight() const;
  /// Largest discarded weight (0 when nothing is discarded).
  [[nodiscard]] double leading_discarded_weight() const;
  /// sqrt(tau)|x| of the leading discarded node (0 when nothing is discarded).
  [[nodiscard]] double leading_discarded_time() const;
};

/// Nodes from the symmetric tridiagonal Jacobi matrix, polished by Newton
/// steps on the orthonormal Hermite recurrence. Weights are built in log space
/// so degrees up to 500 do not overflow. All nodes are retained.
[[nodiscard]] QuadratureRule gauss_hermite_rule(int m, double tau = 1.0);

/// Node indices ordered by descending weight, symmetric pairs adjacent.
[[nodiscard]] std::vector<Index> weight_order(const QuadratureRule& rule);

/// Keeps the mbar heaviest nodes. A count that would split a +-x pair is
/// rounded up by one.
[[nodiscard]] QuadratureRule truncate_rule(const QuadratureRule& rule, Index mbar);

/// Smallest pair-respecting truncation whose discarded weight is below eps.
[[nodiscard]] QuadratureRule truncate_rule_eps(const QuadratureRule& rule, double eps);

struct MbarRecommendation {
  Index mbar = 0;
  Index degree = 0;
};

/// mbar = max(ceil((kappa ln kappa / 2) s), ceil(ln(1/eps)/2)), degree = ceil(kappa s).
[[nodiscard]] MbarRecommendation mbar_for_precision(double s, double eps, double kappa = 2.0);

enum class OverlapSource { exact_eigenbasis, sampled };

/// z_k = <e^{-2i tau_k H}>, n_k = <H e^{-2i tau_k H}> for each retained node,
/// in the order of rule.retained. Trace mode means traces.
struct OverlapSet {
  std::vector<Index> node_index;
  Eigen::VectorXd tau_k;
  Eigen::VectorXcd z;
  Eigen::VectorXcd n;
  SpectrumMode mode = SpectrumMode::trace;
  OverlapSource source = OverlapSource::exact_eigenbasis;
  /// sum of p g, i.e. z at tau_k = 0
  double total_weight = 0.0;

  [[nodiscard]] Index size() const { return z.size(); }
};

[[nodiscard]] OverlapSet compute_overlaps(const SpectrumModel& spec, const QuadratureRule& rule);

/// Default floor below which quadrature Z is flagged: 10 * discarded * sum(p g).
[[nodiscard]] double default_z_floor(const QuadratureRule& rule, double total_weight);

/// Z(lambda) = sum_k w_k Re[e^{2i lambda tau_k} z_k], N likewise.
[[nodiscard]] StaircaseCurve staircase_quadrature(const OverlapSet& overlaps, const QuadratureRule& rule,
                                                  const Eigen::VectorXd& lambdas,
                                                  std::optional<double> z_floor = std::nullopt);

/// Per-level quadrature filter F(j, i) = sum_k w_k cos(2 tau_k (E_j - lambda_i)).
/// Z = weights^T F and N = (E weights)^T F reproduce staircase_quadrature.
[[nodiscard]] Eigen::MatrixXd quadrature_filter(const Eigen::VectorXd& levels, const QuadratureRule& rule,
                                                const Eigen::VectorXd& lambdas);

/// Binomial estimator: cos^m(sqrt(2 dtau)(H - lambda)) expanded into the
/// overlaps <e^{4ija H}>, a = sqrt(dtau/2), with m = tau/dtau even.
[[nodiscard]] StaircaseCurve staircase_binomial(const SpectrumModel& spec, double tau, double dtau,
                                                const Eigen::VectorXd& lambdas);

/// Number of binomial steps tau/dtau; throws unless it is a positive even integer.
[[nodiscard]] int binomial_steps(double tau, double dtau);

struct QuadratureBound {
  double bound = 0.0;
  double log_bound = 0.0;
  double asymptotic = 0.0;
  double log_asymptotic = 0.0;
};

/// Operator-norm bound on the degree-m Gauss-Hermite error of e^{-tau X^2}
/// with ||X|| <= norm.
[[nodiscard]] QuadratureBound quadrature_error_bound(double tau, double norm, int m);

}  // namespace staircase
