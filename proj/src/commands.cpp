#include "staircase/commands.hpp"

#include "staircase/analysis.hpp"
#include "staircase/exact_filter.hpp"
#include "staircase/itqde.hpp"
#include "staircase/rng.hpp"
#include "staircase/sampling.hpp"
#include "staircase/smoothing.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

namespace staircase {

namespace fs = std::filesystem;

namespace {

class OutputDir {
 public:
  explicit OutputDir(fs::path dir) : dir_(std::move(dir)) {}

  std::ofstream open(const std::string& name) {
    const fs::path p = dir_ / name;
    std::ofstream os(p, std::ios::binary);
    if (!os) {
      throw NumericalError("cannot write " + p.string());
    }
    files_.push_back(p);
    return os;
  }

  [[nodiscard]] const std::vector<fs::path>& files() const { return files_; }

 private:
  fs::path dir_;
  std::vector<fs::path> files_;
};

std::vector<double> taus_from(const Config& cfg) {
  auto taus = cfg.get_doubles("tau");
  for (double t : taus) {
    if (!(t > 0.0) || !std::isfinite(t)) {
      throw ConfigError("every tau must be positive and finite");
    }
  }
  return taus;
}

Index grid_points(const Config& cfg, Index fallback) {
  const long long p = cfg.get_int("grid.points", fallback);
  if (p < 2) {
    throw ConfigError("grid.points must be at least 2");
  }
  return static_cast<Index>(p);
}

// Explicit grid.min/grid.max win; otherwise the default margins for `tau`.
Eigen::VectorXd lambda_grid(const Config& cfg, const SpectrumModel& spec, double tau, Index fallback_points) {
  const Index n = grid_points(cfg, fallback_points);
  Eigen::VectorXd g = default_lambda_grid(spec, tau, n);
  const double lo = cfg.get_double("grid.min", g[0]);
  const double hi = cfg.get_double("grid.max", g[n - 1]);
  if (!(hi > lo)) {
    throw ConfigError("grid.max must exceed grid.min");
  }
  return uniform_grid(lo, hi, n);
}

struct RuleChoice {
  QuadratureRule rule;
  bool clamped = false;
};

RuleChoice quadrature_rule(const Config& cfg, const SpectrumModel& spec, double tau) {
  const double norm = spec.spectral_norm();
  const double s = tau * norm * norm;
  const double kappa = cfg.get_double("quadrature.kappa", 4.0);
  RuleChoice out;
  long long m = 0;
  if (cfg.has("quadrature.m")) {
    m = cfg.get_int("quadrature.m");
  } else {
    m = static_cast<long long>(std::ceil(kappa * std::max(s, 0.25)));
    if (m > kMaxHermiteDegree) {
      m = kMaxHermiteDegree;
      out.clamped = true;
    }
  }
  if (m < 1 || m > kMaxHermiteDegree) {
    throw ConfigError("quadrature.m must lie in [1, 500]");
  }
  out.rule = gauss_hermite_rule(static_cast<int>(m), tau);
  if (cfg.has("quadrature.mbar")) {
    const long long mbar = cfg.get_int("quadrature.mbar");
    if (mbar < 1 || mbar > m) {
      throw ConfigError("quadrature.mbar must lie in [1, quadrature.m]");
    }
    out.rule = truncate_rule(out.rule, static_cast<Index>(mbar));
  } else if (cfg.has("quadrature.eps")) {
    const double eps = cfg.get_double("quadrature.eps");
    if (!(eps > 0.0 && eps <= 1.0)) {
      throw ConfigError("quadrature.eps must lie in (0, 1]");
    }
    out.rule = truncate_rule_eps(out.rule, eps);
  }
  return out;
}

void warn_clamped(const RuleChoice& rc, double tau) {
  if (rc.clamped) {
    std::cerr << "warning: tau=" << tau << " wants a Gauss-Hermite degree above 500; using 500\n";
  }
}

template <typename Writer>
void append_csv(std::ofstream& os, bool& header_done, Writer&& write) {
  std::ostringstream tmp;
  write(tmp);
  std::string text = tmp.str();
  if (header_done) {
    text.erase(0, text.find('\n') + 1);
  }
  header_done = true;
  os << text;
}

void write_manifest(OutputDir& out, const Config& cfg, const std::string& command) {
  Config m = cfg;
  m.set_json("run.command", command);
  m.set_json("run.version", kVersion);
  auto os = out.open("manifest.txt");
  os << m.dump();
}

// Integration domain used by every integrated-error figure.
Eigen::VectorXd spectral_window_grid(const SpectrumModel& spec, Index n) {
  return uniform_grid(spec.e_min(), spec.e_max(), n);
}

void cmd_staircase(const Config& cfg, const ModelBundle& mb, OutputDir& out) {
  const auto taus = taus_from(cfg);
  const double tau_min = *std::min_element(taus.begin(), taus.end());
  const double tau_max = *std::max_element(taus.begin(), taus.end());
  const Eigen::VectorXd lambdas = lambda_grid(cfg, mb.spectrum, tau_min, kDefaultGridPoints);
  const bool binomial = cfg.has("binomial.steps") || cfg.has("binomial.dtau");
  const bool quadrature = cfg.get_bool("quadrature.enabled", true);

  auto exact_os = out.open("staircase_exact.csv");
  std::ofstream quad_os;
  std::ofstream bin_os;
  if (quadrature) {
    quad_os = out.open("staircase_quadrature.csv");
  }
  if (binomial) {
    bin_os = out.open("staircase_binomial.csv");
  }
  bool h_exact = false;
  bool h_quad = false;
  bool h_bin = false;
  StaircaseCurve sharpest;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const double tau = taus[i];
    const StaircaseCurve exact = staircase_exact(mb.spectrum, tau, lambdas);
    append_csv(exact_os, h_exact, [&](std::ostream& os) { write_staircase_csv(os, exact); });
    if (tau == tau_max) {
      sharpest = exact;
    }
    if (quadrature) {
      const RuleChoice rc = quadrature_rule(cfg, mb.spectrum, tau);
      warn_clamped(rc, tau);
      const OverlapSet ov = compute_overlaps(mb.spectrum, rc.rule);
      const StaircaseCurve q = staircase_quadrature(ov, rc.rule, lambdas);
      append_csv(quad_os, h_quad, [&](std::ostream& os) { write_staircase_csv(os, q); });
      auto ov_os = out.open("overlaps_tau" + std::to_string(i) + ".csv");
      write_overlaps_csv(ov_os, ov, rc.rule);
    }
    if (binomial) {
      double dtau = 0.0;
      if (cfg.has("binomial.steps")) {
        const long long steps = cfg.get_int("binomial.steps");
        if (steps < 2 || steps % 2 != 0) {
          throw ConfigError("binomial.steps must be a positive even integer");
        }
        dtau = tau / static_cast<double>(steps);
      } else {
        dtau = cfg.get_double("binomial.dtau");
      }
      StaircaseCurve b;
      try {
        b = staircase_binomial(mb.spectrum, tau, dtau, lambdas);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
      append_csv(bin_os, h_bin, [&](std::ostream& os) { write_staircase_csv(os, b); });
    }
  }
  const auto plateaux = extract_plateaux(sharpest, std::nullopt, cfg.get_int("plateaux.min_points", 5));
  auto p_os = out.open("plateaux.csv");
  write_plateaux_csv(p_os, plateaux);
}

void cmd_collapse(const Config& cfg, const ModelBundle& mb, OutputDir& out) {
  const std::string mode = cfg.get_string("collapse.mode", "tau");
  const double tau0 = cfg.get_double("collapse.tau", 0.2);
  const double kappa = cfg.get_double("collapse.kappa", 4.0);
  const Index points = static_cast<Index>(cfg.get_int("collapse.points", 801));
  std::vector<CollapseCase> cases;
  if (mode == "tau") {
    for (double f : cfg.get_doubles("collapse.factors", {1.0, 1.5, 2.0})) {
      cases.push_back({mb.spectrum.as_trace(), tau0 * f, kappa});
    }
  } else if (mode == "hopping") {
    if (cfg.has("synthetic.levels")) {
      throw ConfigError("collapse.mode = hopping needs a lattice model");
    }
    const LatticeSpec base = lattice_from_config(cfg);
    for (double f : cfg.get_doubles("collapse.factors", {1.0, std::sqrt(2.0), 2.0})) {
      LatticeSpec spec = base;
      spec.t_hop = base.t_hop * f;
      const auto cap = static_cast<Index>(cfg.get_int("model.dimension_cap", kDefaultDimensionCap));
      cases.push_back({diagonalize_spectrum(build_fermi_hubbard(spec, cap)), tau0, kappa});
    }
  } else {
    throw ConfigError("collapse.mode must be 'tau' or 'hopping'");
  }
  std::vector<CollapseRow> rows;
  try {
    rows = scaling_collapse(cases, points);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  auto os = out.open("collapse.csv");
  write_collapse_csv(os, rows, mode);

  const CollapseMetrics m = collapse_metrics(rows, cfg.get_double("collapse.floor_factor", 1e3));
  auto ms = out.open("collapse_metrics.csv");
  ms << "mode,s,slope,spread,common_lo,common_hi\n";
  for (std::size_t i = 0; i < m.slopes.size(); ++i) {
    ms << mode << ',' << format_double(m.s_values[i]) << ',' << format_double(m.slopes[i]) << ','
       << format_double(m.spread) << ',' << format_double(m.common_lo) << ',' << format_double(m.common_hi) << '\n';
  }
  if (m.valid) {
    std::cout << "collapse spread " << m.spread << " (log10 units) over mbar/s in [" << m.common_lo << ", "
              << m.common_hi << "]\n";
  } else {
    std::cout << "collapse: too few points above the error floor to compare curves\n";
  }
}

std::vector<Index> k_list(const Config& cfg, std::vector<double> fallback) {
  std::vector<Index> ks;
  for (double k : cfg.get_doubles("sampling.K", fallback)) {
    if (k < 2 || std::floor(k) != k) {
      throw ConfigError("sampling.K values must be integers >= 2");
    }
    ks.push_back(static_cast<Index>(k));
  }
  return ks;
}

void cmd_sample_sweep(const Config& cfg, const ModelBundle& mb, OutputDir& out) {
  const auto taus = taus_from(cfg);
  const auto ks = k_list(cfg, {64, 256, 1024, 4096, 16384});
  const auto reps = cfg.get_int("sampling.repetitions", 8);
  const auto seed = static_cast<std::uint64_t>(cfg.get_int("sampling.seed", 1));
  if (reps < 1) {
    throw ConfigError("sampling.repetitions must be positive");
  }
  const SpectrumModel spec = mb.spectrum.as_trace();
  const Eigen::VectorXd lambdas = spectral_window_grid(spec, grid_points(cfg, 401));

  std::vector<RuleChoice> rules;
  std::vector<StaircaseCurve> exact;
  for (double tau : taus) {
    rules.push_back(quadrature_rule(cfg, spec, tau));
    warn_clamped(rules.back(), tau);
    exact.push_back(staircase_exact(spec, tau, lambdas));
  }
  // errs[t][k][r]
  std::vector<std::vector<std::vector<double>>> errs(
      taus.size(), std::vector<std::vector<double>>(ks.size(), std::vector<double>(static_cast<std::size_t>(reps))));
  std::uint64_t stream = 0;
  bool stats_done = false;
  for (long long r = 0; r < reps; ++r) {
    for (std::size_t k = 0; k < ks.size(); ++k) {
      // one batch serves every tau
      const SampleBatch batch = draw_sample_batch(mb.eig, ks[k], seed, stream);
      stream += static_cast<std::uint64_t>(ks[k]);
      for (std::size_t t = 0; t < taus.size(); ++t) {
        const SampledStaircase ss = staircase_sampled(spec, batch, rules[t].rule, lambdas);
        errs[t][k][static_cast<std::size_t>(r)] =
            integrated_error(ss.curve, exact[t], spec.e_min(), spec.e_max(), false).value;
        if (!stats_done && t == 0 && k + 1 == ks.size()) {
          auto st = out.open("stats.csv");
          write_stats_csv(st, ss.curve, exact[t], ss.stats);
          stats_done = true;
        }
      }
    }
  }
  auto os = out.open("sampling.csv");
  os << "tau,K,eps_mean,eps_std,repetitions\n";
  auto fit = out.open("sampling_fit.csv");
  fit << "tau,slope\n";
  for (std::size_t t = 0; t < taus.size(); ++t) {
    Eigen::VectorXd lx(static_cast<Index>(ks.size()));
    Eigen::VectorXd ly(static_cast<Index>(ks.size()));
    for (std::size_t k = 0; k < ks.size(); ++k) {
      const auto& e = errs[t][k];
      const Eigen::Map<const Eigen::VectorXd> v(e.data(), static_cast<Index>(e.size()));
      const double mean = v.mean();
      const double sd = e.size() > 1 ? std::sqrt((v.array() - mean).square().sum() / static_cast<double>(e.size() - 1))
                                     : 0.0;
      os << format_double(taus[t]) << ',' << ks[k] << ',' << format_double(mean) << ',' << format_double(sd) << ','
         << reps << '\n';
      lx[static_cast<Index>(k)] = std::log(static_cast<double>(ks[k]));
      ly[static_cast<Index>(k)] = std::log(mean);
    }
    fit << format_double(taus[t]) << ',' << format_double(ks.size() > 1 ? fit_slope(lx, ly) : 0.0) << '\n';
  }
}

void cmd_smooth(const Config& cfg, const ModelBundle& mb, OutputDir& out) {
  const auto taus = taus_from(cfg);
  const auto ks = k_list(cfg, {1024});
  if (ks.size() != 1) {
    throw ConfigError("smooth takes a single sampling.K");
  }
  const auto reps = cfg.get_int("sampling.repetitions", 8);
  if (reps < 2) {
    throw ConfigError("smooth needs sampling.repetitions >= 2 for variance envelopes");
  }
  const auto seed = static_cast<std::uint64_t>(cfg.get_int("sampling.seed", 1));
  const std::string kind_name = cfg.get_string("smoothing.window", "gaussian");
  WindowKind kind = WindowKind::gaussian;
  if (kind_name == "boxcar") {
    kind = WindowKind::boxcar;
  } else if (kind_name != "gaussian") {
    throw ConfigError("smoothing.window must be 'gaussian' or 'boxcar'");
  }
  const auto widths = cfg.get_doubles("smoothing.delta_lambda", {0.0});
  const SpectrumModel spec = mb.spectrum.as_trace();
  const double tau_min = *std::min_element(taus.begin(), taus.end());
  const Eigen::VectorXd lambdas = lambda_grid(cfg, spec, tau_min, kDefaultGridPoints);
  const double h = lambdas[1] - lambdas[0];

  auto env = out.open("smooth.csv");
  env << "tau,delta_lambda,tau_eff,lambda,H_exact,H_exact_eff,H_mean,H_std,flagged\n";
  auto sm = out.open("staircase_smoothed.csv");
  bool sm_header = false;
  std::uint64_t stream = 0;
  for (double tau : taus) {
    const RuleChoice rc = quadrature_rule(cfg, spec, tau);
    warn_clamped(rc, tau);
    const StaircaseCurve exact = staircase_exact(spec, tau, lambdas);
    std::vector<StaircaseCurve> sampled;
    for (long long r = 0; r < reps; ++r) {
      const SampleBatch batch = draw_sample_batch(mb.eig, ks[0], seed, stream);
      stream += static_cast<std::uint64_t>(ks[0]);
      sampled.push_back(staircase_sampled(spec, batch, rc.rule, lambdas).curve);
    }
    for (double dl : widths) {
      SmoothingWindow w;
      try {
        w = make_window(kind, dl, h);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
      const double tau_eff = tau_effective(tau, dl);
      const StaircaseCurve exact_eff = staircase_exact(spec, tau_eff, lambdas);
      Eigen::MatrixXd hs(lambdas.size(), reps);
      ArrayXb flags = ArrayXb::Constant(lambdas.size(), false);
      for (long long r = 0; r < reps; ++r) {
        StaircaseCurve c;
        try {
          c = convolve(sampled[static_cast<std::size_t>(r)], w);
        } catch (const std::invalid_argument& e) {
          throw ConfigError(e.what());
        }
        hs.col(r) = c.H;
        flags = flags || c.flagged;
        if (r == 0) {
          append_csv(sm, sm_header, [&](std::ostream& os) { write_smoothed_csv(os, c); });
        }
      }
      for (Index i = 0; i < lambdas.size(); ++i) {
        const double mean = hs.row(i).mean();
        const double sd = std::sqrt((hs.row(i).array() - mean).square().sum() / static_cast<double>(reps - 1));
        env << format_double(tau) << ',' << format_double(dl) << ',' << format_double(tau_eff) << ','
            << format_double(lambdas[i]) << ',' << format_double(exact.H[i]) << ',' << format_double(exact_eff.H[i])
            << ',' << format_double(mean) << ',' << format_double(sd) << ',' << (flags[i] ? 1 : 0) << '\n';
      }
    }
  }
}

void cmd_stability(const Config& cfg, const ModelBundle& mb, OutputDir& out) {
  const auto taus = taus_from(cfg);
  if (taus.size() != 1) {
    throw ConfigError("stability takes a single tau");
  }
  const double tau = taus[0];
  const double r0 = cfg.get_double("stability.r0", kDefaultTailRatio);
  if (!(r0 > 0.0)) {
    throw ConfigError("stability.r0 must be positive");
  }
  const SpectrumModel spec = mb.spectrum.as_trace();
  const Eigen::VectorXd lambdas = lambda_grid(cfg, spec, tau, kDefaultGridPoints);
  const RuleChoice rc = quadrature_rule(cfg, spec, tau);
  warn_clamped(rc, tau);
  const StabilityReport rep = stability_report(spec, rc.rule, lambdas, r0);
  const StaircaseCurve exact = staircase_exact(spec, tau, lambdas);
  const StaircaseCurve quad = staircase_quadrature(compute_overlaps(spec, rc.rule), rc.rule, lambdas);
  const auto window = static_cast<Index>(cfg.get_int("oscillation.window", 25));
  OscillationDiagnostic osc;
  try {
    osc = oscillation_diagnostic(quad, window, cfg.get_double("oscillation.threshold_factor", 10.0));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  auto ex = out.open("staircase_exact.csv");
  write_staircase_csv(ex, exact);
  auto qu = out.open("staircase_quadrature.csv");
  write_staircase_csv(qu, quad);

  auto os = out.open("stability.csv");
  os << "kind,lambda_lo,lambda_hi,Z_epsilon,Z_epsilon_leading,tau_epsilon,d_epsilon,delta_epsilon,"
        "delta_epsilon_linear,r0\n";
  auto row = [&](const char* kind, const LambdaInterval& iv) {
    os << kind << ',' << format_double(iv.lo) << ',' << format_double(iv.hi) << ',' << format_double(rep.z_epsilon)
       << ',' << format_double(rep.z_epsilon_leading) << ',' << format_double(rep.tau_epsilon) << ','
       << format_double(rep.d_epsilon) << ',' << format_double(rep.delta_epsilon) << ','
       << format_double(rep.delta_epsilon_linear) << ',' << format_double(r0) << '\n';
  };
  for (const auto& iv : rep.unstable_intervals) {
    row("unstable", iv);
  }
  for (const auto& iv : osc.intervals) {
    row("over_resolved", iv);
  }
  auto pts = out.open("oscillation.csv");
  pts << "lambda,H_exact,H_quadrature,Z_exact,Z_quadrature,tail_ratio,unstable,score,over_resolved\n";
  for (Index i = 0; i < lambdas.size(); ++i) {
    pts << format_double(lambdas[i]) << ',' << format_double(exact.H[i]) << ',' << format_double(quad.H[i]) << ','
        << format_double(exact.Z[i]) << ',' << format_double(quad.Z[i]) << ',' << format_double(rep.tail_ratio[i])
        << ',' << (rep.unstable[i] ? 1 : 0) << ',' << format_double(osc.score[i]) << ','
        << (osc.over_resolved[i] ? 1 : 0) << '\n';
  }
  std::cout << "Z_eps " << rep.z_epsilon << ", d_eps " << rep.d_epsilon << ", Delta_eps " << rep.delta_epsilon
            << ", " << rep.unstable_intervals.size() << " unstable interval(s)\n";
}

void cmd_model_info(const Config&, const ModelBundle& mb, OutputDir& out) {
  auto os = out.open("model.csv");
  os << "E,g,p\n";
  const SpectrumModel& s = mb.spectrum;
  for (Index j = 0; j < s.size(); ++j) {
    os << format_double(s.levels[j]) << ',' << s.degeneracies[j] << ',' << format_double(s.populations[j]) << '\n';
  }
  std::cout << mb.description << "\n"
            << "dimension " << mb.dimension << ", distinct levels " << s.size() << "\n"
            << "E in [" << s.e_min() << ", " << s.e_max() << "], norm bound " << mb.norm_bound
            << ", smallest half-gap " << s.min_half_gap() << "\n";
}

}  // namespace

LatticeSpec lattice_from_config(const Config& cfg) {
  LatticeSpec s;
  s.lx = static_cast<int>(cfg.get_int("lattice.lx", s.lx));
  s.ly = static_cast<int>(cfg.get_int("lattice.ly", s.ly));
  s.t_hop = cfg.get_double("lattice.t", s.t_hop);
  s.u = cfg.get_double("lattice.u", s.u);
  s.mu = cfg.get_double("lattice.mu", s.mu);
  const int sites = s.lx * s.ly;
  // half filling unless told otherwise
  s.n_up = static_cast<int>(cfg.get_int("lattice.n_up", sites / 2));
  s.n_down = static_cast<int>(cfg.get_int("lattice.n_down", sites / 2));
  s.periodic_x = cfg.get_bool("lattice.periodic_x", false);
  s.periodic_y = cfg.get_bool("lattice.periodic_y", false);
  return s;
}

ModelBundle load_model(const Config& cfg) {
  ModelBundle mb;
  if (cfg.has("synthetic.levels")) {
    const auto& lv = cfg.at("synthetic.levels");
    if (!lv.is_array() || lv.empty()) {
      throw ConfigError("synthetic.levels must be a list of [E, g] pairs");
    }
    std::vector<std::pair<double, int>> levels;
    for (const auto& p : lv) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number_integer()) {
        throw ConfigError("synthetic.levels entries must be [E, g] with integer g");
      }
      levels.emplace_back(p[0].get<double>(), p[1].get<int>());
    }
    const SpectrumModel s = build_synthetic_spectrum(levels, cfg.get_double("synthetic.tolerance", 1e-12));
    mb.eig = eigen_system_from_spectrum(s);
    mb.description = "synthetic spectrum";
    mb.norm_bound = s.spectral_norm();
  } else {
    const LatticeSpec spec = lattice_from_config(cfg);
    const auto cap = static_cast<Index>(cfg.get_int("model.dimension_cap", kDefaultDimensionCap));
    const HamiltonianMatrix h = build_fermi_hubbard(spec, cap);
    mb.eig = diagonalize(h);
    mb.norm_bound = h.norm_bound;
    std::ostringstream d;
    d << "Fermi-Hubbard " << spec.lx << "x" << spec.ly << " t=" << spec.t_hop << " U=" << spec.u << " mu=" << spec.mu
      << " (" << spec.n_up << " up, " << spec.n_down << " down)";
    mb.description = d.str();
  }
  mb.dimension = mb.eig.dim();
  const std::string kind = cfg.get_string("state.kind", "trace");
  if (kind == "trace") {
    mb.spectrum = mb.eig.spectrum;
  } else if (kind == "uniform") {
    mb.spectrum = project_state(mb.eig, make_initial_state(InitialStateKind::uniform, mb.dimension));
  } else if (kind == "random") {
    const auto seed = static_cast<std::uint64_t>(cfg.get_int("state.seed", 0));
    mb.spectrum = project_state(mb.eig, make_initial_state(InitialStateKind::seeded_random, mb.dimension, seed));
  } else {
    throw ConfigError("state.kind must be trace, uniform or random");
  }
  return mb;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"staircase", "collapse", "sample-sweep", "smooth", "stability",
                                              "model-info"};
  return names;
}

std::uint64_t config_hash(const Config& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : cfg.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

fs::path default_run_dir(const std::string& command, const Config& cfg) {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y%m%dT%H%M%SZ", &tm);
  char hash[16];
  std::snprintf(hash, sizeof hash, "%08llx", static_cast<unsigned long long>(config_hash(cfg) & 0xffffffffULL));
  return fs::path("runs") / (command + "-" + stamp + "-" + hash);
}

std::vector<fs::path> run_command(const std::string& command, const Config& cfg, const fs::path& out_dir) {
  const auto& names = command_names();
  if (std::find(names.begin(), names.end(), command) == names.end()) {
    throw ConfigError("unknown command '" + command + "'");
  }
  const bool existed = fs::exists(out_dir);
  if (existed && !fs::is_directory(out_dir)) {
    throw ConfigError("output path " + out_dir.string() + " is not a directory");
  }
  fs::create_directories(out_dir);
  OutputDir out(out_dir);
  try {
    const ModelBundle mb = load_model(cfg);
    if (command == "staircase") {
      cmd_staircase(cfg, mb, out);
    } else if (command == "collapse") {
      cmd_collapse(cfg, mb, out);
    } else if (command == "sample-sweep") {
      cmd_sample_sweep(cfg, mb, out);
    } else if (command == "smooth") {
      cmd_smooth(cfg, mb, out);
    } else if (command == "stability") {
      cmd_stability(cfg, mb, out);
    } else {
      cmd_model_info(cfg, mb, out);
    }
    write_manifest(out, cfg, command);
  } catch (...) {
    std::error_code ec;
    for (const auto& f : out.files()) {
      fs::remove(f, ec);
    }
    if (!existed) {
      fs::remove_all(out_dir, ec);
    }
    throw;
  }
  return out.files();
}

}  // namespace staircase
