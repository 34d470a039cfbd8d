#include "staircase/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace staircase {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

nlohmann::json parse_value(const std::string& raw) {
  const std::string v = trim(raw);
  if (v.empty()) {
    return std::string{};
  }
  try {
    return nlohmann::json::parse(v);
  } catch (const nlohmann::json::parse_error&) {
    return v;
  }
}

[[noreturn]] void type_error(const std::string& key, const char* want) {
  throw ConfigError("config key '" + key + "' must be " + want);
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config c;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    // a '#' inside a quoted string is rare enough in these files to ignore
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line.resize(hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + " has no '='");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(lineno) + " has an empty key");
    }
    c.set(key, line.substr(eq + 1));
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot read config file " + path.string());
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void Config::set(const std::string& key, const std::string& raw) { values_[key] = parse_value(raw); }

void Config::set_json(const std::string& key, nlohmann::json value) { values_[key] = std::move(value); }

const nlohmann::json& Config::at(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    throw ConfigError("missing config key '" + key + "'");
  }
  return it->second;
}

double Config::get_double(const std::string& key) const {
  const auto& v = at(key);
  if (!v.is_number()) {
    type_error(key, "a number");
  }
  return v.get<double>();
}

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long long Config::get_int(const std::string& key) const {
  const auto& v = at(key);
  if (v.is_number_integer()) {
    return v.get<long long>();
  }
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::floor(d) == d && std::abs(d) < 9e15) {
      return static_cast<long long>(d);
    }
  }
  type_error(key, "an integer");
}

long long Config::get_int(const std::string& key, long long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) {
    return fallback;
  }
  const auto& v = at(key);
  if (!v.is_boolean()) {
    type_error(key, "true or false");
  }
  return v.get<bool>();
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  if (!has(key)) {
    return fallback;
  }
  const auto& v = at(key);
  if (v.is_string()) {
    return v.get<std::string>();
  }
  return v.dump();
}

std::vector<double> Config::get_doubles(const std::string& key) const {
  const auto& v = at(key);
  if (v.is_number()) {
    return {v.get<double>()};
  }
  if (!v.is_array() || v.empty()) {
    type_error(key, "a number or a non-empty list of numbers");
  }
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) {
      type_error(key, "a list of numbers");
    }
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<double> Config::get_doubles(const std::string& key, const std::vector<double>& fallback) const {
  return has(key) ? get_doubles(key) : fallback;
}

std::string Config::dump() const {
  std::string out;
  for (const auto& [k, v] : values_) {
    out += k + " = " + (v.is_string() ? v.get<std::string>() : v.dump()) + "\n";
  }
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) {
    return "nan";
  }
  if (std::isinf(v)) {
    return v > 0 ? "inf" : "-inf";
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_staircase_csv(std::ostream& os, const StaircaseCurve& c) {
  os << "lambda,N,Z,logZ,H,provenance,tau\n";
  const std::string prov(to_string(c.provenance));
  for (Index i = 0; i < c.size(); ++i) {
    os << format_double(c.lambdas[i]) << ',' << format_double(c.N[i]) << ',' << format_double(c.Z[i]) << ','
       << format_double(c.log_Z[i]) << ',' << format_double(c.H[i]) << ',' << prov << ',' << format_double(c.tau)
       << '\n';
  }
}

void write_smoothed_csv(std::ostream& os, const StaircaseCurve& c) {
  os << "lambda,N,Z,logZ,H,provenance,tau,tau_eff,delta_lambda\n";
  const std::string prov(to_string(c.provenance));
  for (Index i = 0; i < c.size(); ++i) {
    os << format_double(c.lambdas[i]) << ',' << format_double(c.N[i]) << ',' << format_double(c.Z[i]) << ','
       << format_double(c.log_Z[i]) << ',' << format_double(c.H[i]) << ',' << prov << ',' << format_double(c.tau)
       << ',' << format_double(c.tau_eff) << ',' << format_double(c.delta_lambda) << '\n';
  }
}

void write_overlaps_csv(std::ostream& os, const OverlapSet& o, const QuadratureRule& rule) {
  os << "k,x_k,w_k,tau_k,Re_z,Im_z,Re_n,Im_n\n";
  for (Index i = 0; i < o.size(); ++i) {
    const Index k = o.node_index[static_cast<std::size_t>(i)];
    os << k << ',' << format_double(rule.nodes[k]) << ',' << format_double(rule.weights[k]) << ','
       << format_double(o.tau_k[i]) << ',' << format_double(o.z[i].real()) << ',' << format_double(o.z[i].imag())
       << ',' << format_double(o.n[i].real()) << ',' << format_double(o.n[i].imag()) << '\n';
  }
}

void write_stats_csv(std::ostream& os, const StaircaseCurve& sampled, const StaircaseCurve& exact,
                     const EstimatorStats& s) {
  os << "lambda,H_sampled,H_exact,rel_err,rel_stderr_pred,c_lambda,Q_lambda,flagged\n";
  for (Index i = 0; i < sampled.size(); ++i) {
    const double rel = std::abs(sampled.H[i] - exact.H[i]) / std::abs(exact.H[i]);
    os << format_double(sampled.lambdas[i]) << ',' << format_double(sampled.H[i]) << ',' << format_double(exact.H[i])
       << ',' << format_double(rel) << ',' << format_double(s.rel_stderr_pred[i]) << ','
       << format_double(s.c_lambda[i]) << ',' << format_double(s.Q_lambda[i]) << ','
       << (sampled.flagged[i] ? 1 : 0) << '\n';
  }
}

void write_plateaux_csv(std::ostream& os, const std::vector<Plateau>& plateaux) {
  os << "E_estimate,lambda_lo,lambda_hi,width\n";
  for (const auto& p : plateaux) {
    os << format_double(p.E_estimate) << ',' << format_double(p.lambda_lo) << ',' << format_double(p.lambda_hi)
       << ',' << format_double(p.width) << '\n';
  }
}

void write_collapse_csv(std::ostream& os, const std::vector<CollapseRow>& rows, const std::string& mode) {
  os << "mode,s,mbar,eps,eps_root,mbar_over_s,m\n";
  for (const auto& r : rows) {
    os << mode << ',' << format_double(r.s) << ',' << r.mbar << ',' << format_double(r.eps) << ','
       << format_double(r.eps_root) << ',' << format_double(r.mbar_over_s) << ',' << r.degree << '\n';
  }
}

}  // namespace staircase
