#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oqs/dephasing.hpp"

namespace oqs {

/// Flat `key = value` text with dotted keys. Blank lines and lines starting
/// with '#' are ignored; a key may appear once.
class KeyValues {
 public:
  static KeyValues parse(std::string_view text);
  static KeyValues load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  /// "key=value"
  void apply_override(const std::string& assignment);
  void erase(const std::string& key) { entries_.erase(key); }
  std::optional<std::string> get(const std::string& key) const;
  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

enum class ModelKind { dephasing, damped, generic };
std::string model_name(ModelKind m);

struct ScenarioConfig {
  ModelKind model = ModelKind::dephasing;
  std::vector<Method> methods;

  // <model>.c0, <model>.c1
  double c0 = 0.70710678118654752;
  double c1 = 0.70710678118654752;

  // dephasing
  double r = 0.0;
  double q = 0.0;
  std::string distribution = "gaussian";  // gaussian | double_gaussian
  double xi = 1.0;
  double sigma = 1.0;

  // damped
  double gamma = 0.05;
  double n_bosons = 0.0;
  double omega_c = 1.0;
  double varsigma = 0.0;
  double nu_scale = 1.0;

  // generic: either a JSON file or the built-in Jaynes-Cummings preset
  std::string generic_spec;
  std::string generic_preset;
  double jc_varsigma = 1.0;
  double jc_omega = 1.0;
  double jc_g = 0.1;
  std::size_t jc_n_max = 4;
  std::size_t jc_n = 3;

  // grid in the units of the time column
  double t_max = 10.0;
  std::size_t n_points = 1000;

  std::vector<double> sweep_r, sweep_q, sweep_gamma, sweep_n;

  std::string output_dir = ".";
  std::string output_name = "run";
  std::uint64_t seed = 0;

  /// Normalized key/value form, used for CSV metadata.
  KeyValues source;
};

/// Validates and converts; ConfigError messages name the offending key.
ScenarioConfig make_config(const KeyValues& kv);
ScenarioConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// Comma-separated list; entries are trimmed and must be non-empty.
std::vector<std::string> split_list(const std::string& key, const std::string& text);
std::vector<double> parse_list(const std::string& key, const std::string& text);

}  // namespace oqs
