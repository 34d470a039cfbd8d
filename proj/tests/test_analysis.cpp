#include "fixtures/derived_reference.hpp"
#include "staircase/analysis.hpp"
#include "staircase/exact_filter.hpp"

#include <doctest.h>

using namespace staircase;

namespace {

SpectrumModel spectrum() { return build_synthetic_spectrum({{0.0, 1}, {1.0, 3}, {1.4, 2}, {3.0, 1}, {3.5, 4}, {5.0, 2}}); }

StaircaseCurve constant_curve(const Eigen::VectorXd& lam, double h) {
  StaircaseCurve c;
  c.lambdas = lam;
  c.resize(lam.size());
  c.Z.setOnes();
  c.N.setConstant(h);
  c.H.setConstant(h);
  return c;
}

}  // namespace

TEST_CASE("integrated error") {
  const auto lam = uniform_grid(0.0, 2.0, 21);
  const auto a = constant_curve(lam, 1.0);
  auto b = constant_curve(lam, 1.25);
  CHECK(integrated_error(a, b).value == doctest::Approx(0.5));
  CHECK(integrated_error(b, a).value == doctest::Approx(0.5));
  CHECK(integrated_error(a, a).value == 0.0);
  CHECK(integrated_error(a, b, 0.5, 1.5).value == doctest::Approx(0.25));
  b.flagged[10] = true;
  const auto ex = integrated_error(a, b);
  CHECK(ex.value == doctest::Approx(0.45));
  CHECK(ex.excluded_measure == doctest::Approx(0.2));
  CHECK(integrated_error(a, b, -1, 3, false).value == doctest::Approx(0.5));
  b.H[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK(integrated_error(a, b, -1, 3, false).excluded_measure == doctest::Approx(0.2));
  CHECK_THROWS((void)integrated_error(a, constant_curve(uniform_grid(0, 1, 21), 1.0)));
}

TEST_CASE("runs and intervals") {
  ArrayXb m(8);
  m << true, true, false, false, true, false, true, true;
  const auto r = true_runs(m);
  REQUIRE(r.size() == 3);
  CHECK(r[0] == std::pair<Index, Index>{0, 1});
  CHECK(r[1] == std::pair<Index, Index>{4, 4});
  CHECK(r[2] == std::pair<Index, Index>{6, 7});
  const auto iv = intervals_from_mask(uniform_grid(0, 7, 8), m);
  CHECK(iv[2].lo == 6.0);
  CHECK(iv[2].hi == 7.0);
  CHECK(true_runs(ArrayXb::Constant(4, false)).empty());
}

TEST_CASE("stability regions match the independent oracle") {
  const auto s = spectrum();
  const double tau = 20.0;
  const auto rule = truncate_rule(gauss_hermite_rule(200, tau), 16);
  const auto lam = default_lambda_grid(s, tau, 2001);
  const auto rep = stability_report(s, rule, lam, 0.1);
  CHECK(rep.z_epsilon == doctest::Approx(fixtures::syn_stability_z_eps).epsilon(1e-9));
  CHECK(rep.radius_defined);
  REQUIRE(rep.unstable_intervals.size() * 2 == fixtures::syn_stability_runs.size());
  for (std::size_t i = 0; i < rep.unstable_intervals.size(); ++i) {
    CHECK(rep.unstable_intervals[i].first == fixtures::syn_stability_runs[2 * i]);
    CHECK(rep.unstable_intervals[i].last == fixtures::syn_stability_runs[2 * i + 1]);
  }
  CHECK(rep.d_epsilon == doctest::Approx(std::sqrt(std::log(1.0 / (0.1 * rep.z_epsilon)) / tau)));
  CHECK(rep.delta_epsilon == doctest::Approx(2.0 * rep.d_epsilon));
  CHECK(rep.z_epsilon_leading <= rep.z_epsilon);
  CHECK(rep.tau_epsilon > 0.0);
}

TEST_CASE("stability edge cases") {
  const auto s = spectrum();
  const auto lam = uniform_grid(-1, 6, 101);
  const auto full = stability_report(s, gauss_hermite_rule(40, 2.0), lam);
  CHECK(full.z_epsilon == 0.0);
  CHECK_FALSE(full.unstable.any());
  CHECK(std::isinf(full.d_epsilon));
  // keep one node: most of the weight is discarded and the radius is undefined
  const auto one = stability_report(s, truncate_rule(gauss_hermite_rule(41, 2.0), 1), lam, 5.0);
  CHECK_FALSE(one.radius_defined);
  CHECK_FALSE(one.unstable.any());
  CHECK_THROWS((void)stability_report(s, gauss_hermite_rule(4, 1.0), lam, 0.0));
}

TEST_CASE("oscillation score vanishes on monotone curves") {
  const auto s = spectrum();
  const auto lam = uniform_grid(-1, 6, 701);
  const auto c = staircase_exact(s, 5.0, lam);
  const auto d = oscillation_diagnostic(c, 25);
  CHECK(d.score.maxCoeff() < 1e-12);
  CHECK_FALSE(d.over_resolved.any());

  auto wiggly = c;
  for (Index i = 300; i < 340; ++i) {
    wiggly.H[i] += 0.2 * std::sin(0.8 * static_cast<double>(i));
  }
  const auto w = oscillation_diagnostic(wiggly, 25);
  REQUIRE(w.intervals.size() == 1);
  CHECK(w.intervals[0].lo <= lam[300]);
  CHECK(w.intervals[0].hi >= lam[339]);
  CHECK(w.intervals[0].lo >= lam[300 - 26]);
  CHECK(w.intervals[0].hi <= lam[339 + 26]);
  CHECK_THROWS((void)oscillation_diagnostic(c, 400));
}

TEST_CASE("plateaux recover isolated levels at large tau") {
  const auto s = build_synthetic_spectrum({{-2.0, 1}, {0.5, 2}, {3.0, 1}});
  const auto lam = uniform_grid(-3, 4, 1401);
  const auto c = staircase_exact(s, 30.0, lam);
  const auto p = extract_plateaux(c);
  REQUIRE(p.size() == 3);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(p[j].E_estimate == doctest::Approx(s.levels[static_cast<Index>(j)]).epsilon(1e-6));
    CHECK(p[j].width > 0.5);
  }
  CHECK(p[1].lambda_lo < 0.5);
  CHECK(p[1].lambda_hi > 0.5);

  const auto flat = constant_curve(lam, 1.0);
  CHECK(extract_plateaux(flat).size() == 1);
  // small tau: one smooth ramp, no plateaux resolved
  const auto smooth = staircase_exact(s, 0.1 / (1.25 * 1.25), lam);
  CHECK(extract_plateaux(smooth).size() <= 1);
}

TEST_CASE("collapse rows") {
  const auto s = spectrum();
  const auto rows = scaling_collapse({{s, 0.2, 4.0}}, 201);
  const double sval = 0.2 * 25.0;
  const auto degree = static_cast<Index>(std::ceil(4.0 * sval));
  REQUIRE(!rows.empty());
  CHECK(rows.back().mbar == degree);
  for (const auto& r : rows) {
    CHECK(r.s == doctest::Approx(sval));
    CHECK((degree - r.mbar) % 2 == 0);
    CHECK(r.mbar_over_s == doctest::Approx(static_cast<double>(r.mbar) / sval));
    CHECK(r.eps_root == doctest::Approx(std::pow(r.eps, 1.0 / sval)));
  }
  CHECK(rows.front().eps > rows.back().eps);
  CHECK(rows.back().eps < 1e-8);

  const auto m = collapse_metrics(rows);
  CHECK(m.valid);
  REQUIRE(m.slopes.size() == 1);
  CHECK(m.slopes[0] < 0.0);
  CHECK(m.spread == 0.0);
  CHECK_THROWS((void)scaling_collapse({{s, 100.0, 4.0}}));
}

TEST_CASE("slope fit") {
  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(5, 0, 4);
  CHECK(fit_slope(x, 3.0 * x.array() + 1.0) == doctest::Approx(3.0));
  CHECK_THROWS((void)fit_slope(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1)));
}
