#include "fixtures/fh_reference.hpp"
#include "staircase/exact_filter.hpp"
#include "staircase/sampling.hpp"

#include <doctest.h>

using namespace staircase;

namespace {

SpectrumModel small_spectrum() { return build_synthetic_spectrum({{-1.0, 1}, {0.0, 2}, {0.7, 1}, {2.0, 3}}); }

}  // namespace

TEST_CASE("haar states are normalized and reproducible") {
  const auto a = haar_state(7, 42, 3);
  const auto b = haar_state(7, 42, 3);
  const auto c = haar_state(7, 42, 4);
  CHECK(a.norm() == doctest::Approx(1.0));
  CHECK(a == b);
  CHECK((a - c).norm() > 1e-3);
  const auto m = haar_states(7, 5, 42, 1);
  CHECK(m.col(2) == haar_state(7, 42, 3));
  CHECK_THROWS((void)haar_state(0, 1, 0));
}

TEST_CASE("batches do not depend on chunking") {
  const auto spec = small_spectrum();
  const auto eig = eigen_system_from_spectrum(spec);
  const auto big = draw_sample_batch(eig, 1500, 9);
  const auto tail = draw_sample_batch(eig, 10, 9, 1490);
  CHECK((big.level_populations.bottomRows(10) - tail.level_populations).cwiseAbs().maxCoeff() == 0.0);
  CHECK((big.level_populations.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
  CHECK_THROWS((void)draw_sample_batch(eig, 1, 9));
}

TEST_CASE("level populations follow the Haar moments") {
  const auto spec = small_spectrum();
  const auto eig = eigen_system_from_spectrum(spec);
  const Index K = 20000;
  const auto batch = draw_sample_batch(eig, K, 2024);
  const double d = 7.0;
  for (Index j = 0; j < spec.size(); ++j) {
    const double g = spec.degeneracies[j];
    const double mean = g / d;
    const double var = g * (d - g) / (d * d * (d + 1.0));
    const Eigen::ArrayXd col = batch.level_populations.col(j).array();
    const double m = col.mean();
    const double v = (col - m).square().sum() / (K - 1.0);
    CAPTURE(j);
    CHECK(std::abs(m - mean) < 5.0 * std::sqrt(var / K));
    CHECK(v == doctest::Approx(var).epsilon(0.05));
  }
}

TEST_CASE("analytic Haar moments against Monte Carlo") {
  using cd = std::complex<double>;
  Eigen::MatrixXcd op(3, 3);
  op << 1.0, cd(0.5, 0.2), 0.0, cd(0.5, -0.2), -0.3, cd(0.1, 0.4), 0.0, cd(0.7, -0.1), 2.0;
  const auto pred = haar_moments(op);
  CHECK(std::abs(pred.mean - op.trace() / 3.0) < 1e-15);
  const Index K = 40000;
  const auto phi = haar_states(3, K, 5);
  Eigen::VectorXcd x(K);
  for (Index i = 0; i < K; ++i) {
    x[i] = phi.col(i).dot(op * phi.col(i));
  }
  const cd m = x.mean();
  const double v = (x.array() - m).abs2().sum() / (K - 1.0);
  CHECK(std::abs(m - pred.mean) < 5.0 * std::sqrt(pred.variance / K));
  CHECK(v == doctest::Approx(pred.variance).epsilon(0.05));

  const Eigen::VectorXcd dg = op.diagonal();
  const auto pd = haar_moments_diagonal(dg);
  const auto pm = haar_moments(Eigen::MatrixXcd(dg.asDiagonal()));
  CHECK(std::abs(pd.mean - pm.mean) < 1e-15);
  CHECK(pd.variance == doctest::Approx(pm.variance));
  CHECK_THROWS((void)haar_moments(Eigen::MatrixXcd(2, 3)));
}

TEST_CASE("covariance formula against Monte Carlo") {
  const Eigen::VectorXd e = (Eigen::VectorXd(4) << -1.0, 0.0, 0.5, 2.0).finished();
  const Eigen::VectorXd f = (-0.7 * e.array().square()).exp();
  const Eigen::MatrixXcd n_op = Eigen::VectorXcd((e.array() * f.array()).cast<std::complex<double>>()).asDiagonal();
  const Eigen::MatrixXcd z_op = Eigen::VectorXcd(f.cast<std::complex<double>>()).asDiagonal();
  const Index K = 40000;
  const auto phi = haar_states(4, K, 77);
  Eigen::ArrayXd xn(K);
  Eigen::ArrayXd xz(K);
  for (Index i = 0; i < K; ++i) {
    xn[i] = phi.col(i).dot(n_op * phi.col(i)).real();
    xz[i] = phi.col(i).dot(z_op * phi.col(i)).real();
  }
  const double cov = ((xn - xn.mean()) * (xz - xz.mean())).sum() / (K - 1.0);
  CHECK(haar_covariance(n_op, z_op, 1).real() == doctest::Approx(cov).epsilon(0.05));
  CHECK(haar_covariance(n_op, z_op, 10).real() == doctest::Approx(haar_covariance(n_op, z_op, 1).real() / 10.0));
}

TEST_CASE("sampled staircase is an unbiased trace estimate") {
  LatticeSpec spec;
  spec.lx = 2;
  spec.ly = 2;
  spec.u = 2.0;
  spec.n_up = 2;
  spec.n_down = 2;
  const auto eig = diagonalize(build_fermi_hubbard(spec));
  const auto& sp = eig.spectrum;
  const double tau = 0.1;
  const auto rule = gauss_hermite_rule(40, tau);
  const auto lam = uniform_grid(sp.e_min(), sp.e_max(), 41);
  const Index K = 4000;
  const auto batch = draw_sample_batch(eig, K, 11);
  const auto res = staircase_sampled(sp, batch, rule, lam);
  const auto ex = staircase_exact(sp, tau, lam);
  const auto pred = ratio_error_prediction(sp, tau, lam, K);
  int within = 0;
  double ratio_sum = 0.0;
  int used = 0;
  for (Index i = 0; i < lam.size(); ++i) {
    const double se = std::sqrt(res.stats.var_Z[i] / K);
    within += std::abs(res.stats.mean_Z[i] - ex.Z[i]) < 4.0 * se ? 1 : 0;
    CHECK(res.stats.var_Z[i] == doctest::Approx(pred.var_Z[i]).epsilon(0.15));
    CHECK(res.stats.var_N[i] == doctest::Approx(pred.var_N[i]).epsilon(0.15));
    if (!res.curve.flagged[i]) {
      ratio_sum += std::abs(res.curve.H[i] - ex.H[i]) / std::abs(ex.H[i]) / res.stats.rel_stderr_pred[i];
      ++used;
    }
  }
  CHECK(within >= 39);
  REQUIRE(used > 10);
  // mean |error| / stderr of a normal variable is sqrt(2/pi)
  CHECK(ratio_sum / used > 0.4);
  CHECK(ratio_sum / used < 1.6);

  const auto again = staircase_sampled(sp, draw_sample_batch(eig, K, 11), rule, lam);
  CHECK(again.curve.H == res.curve.H);
  const auto other = staircase_sampled(sp, draw_sample_batch(eig, K, 12), rule, lam);
  CHECK(other.curve.H != res.curve.H);

  const auto so = sampled_overlaps(eig, batch, rule);
  const auto from_overlaps = staircase_quadrature(so, rule, lam, 0.0);
  CHECK((from_overlaps.Z - res.curve.Z).cwiseAbs().maxCoeff() < 1e-9 * ex.Z.maxCoeff());
}

TEST_CASE("prediction constants") {
  const auto one = build_synthetic_spectrum({{1.3, 5}});
  const auto p1 = ratio_error_prediction(one, 2.0, uniform_grid(-1, 3, 9), 100);
  CHECK(p1.c_lambda.cwiseAbs().maxCoeff() < 1e-7);
  CHECK((p1.Q_lambda.array() - 0.2).abs().maxCoeff() < 1e-14);

  const auto s = small_spectrum();
  const auto lam = uniform_grid(-3, 4, 71);
  const auto p = ratio_error_prediction(s, 1.5, lam, 256);
  for (Index i = 0; i < lam.size(); ++i) {
    CHECK(p.Q_lambda[i] >= 1.0 / 7.0 - 1e-14);
    CHECK(p.Q_lambda[i] <= 1.0 + 1e-14);
    CHECK(p.c_lambda[i] <= p.c_bound[i] + 1e-12);
  }
  // far below the spectrum the trace falls under D / sqrt(K)
  const auto far = ratio_error_prediction(s, 1.5, uniform_grid(-8, -7, 3), 256);
  CHECK(far.flagged.all());
  CHECK_FALSE(ratio_error_prediction(s, 1.5, uniform_grid(0, 0.5, 3), 256).flagged.any());
}

TEST_CASE("shot-noise scales") {
  CHECK(resolvable_gap_from_K(std::exp(8.0), 4.0) == doctest::Approx(1.0));
  CHECK(resolvable_gap_from_K(1024, 1.0) > resolvable_gap_from_K(1024, 4.0));
  CHECK_THROWS((void)resolvable_gap_from_K(1, 1.0));
  CHECK(shot_budget_bound(0.1, 0.3) == doctest::Approx(std::exp(9.0)));
  CHECK(shot_budget_bound(0.1, 0.1, 2.0) == doctest::Approx(std::exp(2.0)));
  CHECK_THROWS((void)shot_budget_bound(0.2, 0.1));
}
