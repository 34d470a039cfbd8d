#pragma once

#include "staircase/curve.hpp"
#include "staircase/model.hpp"

namespace staircase {

inline constexpr Index kDefaultGridPoints = 2001;

/// Gaussian sums over the levels, evaluated with the largest exponent factored
/// out. Z is exp(log_Z) and may underflow to 0 while log_Z stays finite.
[[nodiscard]] StaircaseCurve staircase_exact(const SpectrumModel& spec, double tau, const Eigen::VectorXd& lambdas);

struct PartitionValues {
  Eigen::VectorXd Z;
  Eigen::VectorXd log_Z;
};

[[nodiscard]] PartitionValues partition_exact(const SpectrumModel& spec, double tau, const Eigen::VectorXd& lambdas);

/// Closed form of the two-level staircase between E_j and E_j1, with
/// R_j the weight ratio (p g)_j / (p g)_{j+1}.
[[nodiscard]] Eigen::VectorXd logistic_two_level(double e_j, double e_j1, double r_j, double tau,
                                                 const Eigen::VectorXd& lambdas);

/// Delta_j * exp(-tau Delta_j^2).
[[nodiscard]] double accuracy_bound(double delta_j, double tau);

struct TauForAccuracy {
  double tau = 0.0;
  bool vacuous = false;  // eps >= Delta_j, any tau works
};

/// Smallest tau with accuracy_bound(delta_j, tau) <= eps.
[[nodiscard]] TauForAccuracy tau_for_accuracy(double delta_j, double eps);

/// Uniform grid over [E_min - 3/sqrt(tau), E_max + 3/sqrt(tau)]. For tau = 0
/// the margin falls back to one bandwidth (or 1 for a single level).
[[nodiscard]] Eigen::VectorXd default_lambda_grid(const SpectrumModel& spec, double tau,
                                                  Index points = kDefaultGridPoints);

}  // namespace staircase
