#pragma once

#include "staircase/analysis.hpp"
#include "staircase/curve.hpp"
#include "staircase/itqde.hpp"
#include "staircase/sampling.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace staircase {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Flat `key = value` configuration. Values are JSON literals (numbers,
/// booleans, lists like [[0,1],[1,2]]); anything that is not valid JSON is
/// kept as a bare string. `#` starts a comment.
class Config {
 public:
  static Config parse(const std::string& text);
  static Config load(const std::filesystem::path& path);

  /// Sets a value from its textual form (same rules as a config line).
  void set(const std::string& key, const std::string& raw);
  void set_json(const std::string& key, nlohmann::json value);

  [[nodiscard]] bool has(const std::string& key) const { return values_.count(key) != 0; }
  [[nodiscard]] const nlohmann::json& at(const std::string& key) const;

  [[nodiscard]] double get_double(const std::string& key) const;
  [[nodiscard]] double get_double(const std::string& key, double fallback) const;
  [[nodiscard]] long long get_int(const std::string& key) const;
  [[nodiscard]] long long get_int(const std::string& key, long long fallback) const;
  [[nodiscard]] bool get_bool(const std::string& key, bool fallback) const;
  [[nodiscard]] std::string get_string(const std::string& key, const std::string& fallback) const;
  /// A number or a list of numbers.
  [[nodiscard]] std::vector<double> get_doubles(const std::string& key) const;
  [[nodiscard]] std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;

  /// Serializes in the same format, keys sorted.
  [[nodiscard]] std::string dump() const;
  [[nodiscard]] const std::map<std::string, nlohmann::json>& values() const { return values_; }

 private:
  std::map<std::string, nlohmann::json> values_;
};

/// Shortest round-trip formatting (%.17g); nan and inf spelled out.
[[nodiscard]] std::string format_double(double v);

void write_staircase_csv(std::ostream& os, const StaircaseCurve& curve);
void write_smoothed_csv(std::ostream& os, const StaircaseCurve& curve);
void write_overlaps_csv(std::ostream& os, const OverlapSet& overlaps, const QuadratureRule& rule);
void write_stats_csv(std::ostream& os, const StaircaseCurve& sampled, const StaircaseCurve& exact,
                     const EstimatorStats& stats);
void write_plateaux_csv(std::ostream& os, const std::vector<Plateau>& plateaux);
void write_collapse_csv(std::ostream& os, const std::vector<CollapseRow>& rows, const std::string& mode);

}  // namespace staircase
