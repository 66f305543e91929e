#include "oqs/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "oqs/errors.hpp"

namespace oqs {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  return std::all_of(k.begin(), k.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '.';
  });
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const char* b = v.data();
  const char* e = v.data() + v.size();
  auto [p, ec] = std::from_chars(b, e, out);
  if (ec != std::errc() || p != e || !std::isfinite(out))
    throw ConfigError("config: " + key + " is not a finite number: '" + v + "'");
  return out;
}

std::size_t to_size(const std::string& key, const std::string& v) {
  std::size_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("config: " + key + " is not a non-negative integer: '" + v + "'");
  return out;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "model.kind",        "model.methods",     "dephasing.c0",      "dephasing.c1",
      "dephasing.r",       "dephasing.q",       "dephasing.distribution",
      "dephasing.xi",      "dephasing.sigma",   "damped.gamma",      "damped.n",
      "damped.omega_c",    "damped.varsigma",   "damped.nu_scale",   "generic.spec",
      "generic.preset",    "generic.varsigma",  "generic.omega",     "generic.g",
      "generic.n_max",     "generic.n",         "grid.t_max",        "grid.n_points",
      "sweep.r",           "sweep.q",           "sweep.gamma",       "sweep.n",
      "output.dir",        "output.name",       "seed",              "damped.c0",
      "damped.c1",         "generic.c0",        "generic.c1"};
  return keys;
}

}  // namespace

KeyValues KeyValues::parse(std::string_view text) {
  KeyValues kv;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (!valid_key(key))
      throw ConfigError("config line " + std::to_string(line_no) + ": bad key '" + key + "'");
    if (kv.entries_.count(key))
      throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key " + key);
    kv.entries_[key] = value;
  }
  return kv;
}

KeyValues KeyValues::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void KeyValues::set(const std::string& key, const std::string& value) {
  if (!valid_key(key)) throw ConfigError("config: bad key '" + key + "'");
  entries_[key] = value;
}

void KeyValues::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override '" + assignment + "' is not of the form key=value");
  set(trim(std::string_view(assignment).substr(0, eq)),
      trim(std::string_view(assignment).substr(eq + 1)));
}

std::optional<std::string> KeyValues::get(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::string model_name(ModelKind m) {
  switch (m) {
    case ModelKind::dephasing: return "dephasing";
    case ModelKind::damped: return "damped";
    case ModelKind::generic: return "generic";
  }
  return "?";
}

std::vector<std::string> split_list(const std::string& key, const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto c = text.find(',', pos);
    std::string item =
        trim(std::string_view(text).substr(pos, c == std::string::npos ? std::string::npos : c - pos));
    if (item.empty()) throw ConfigError("config: " + key + " has an empty list entry");
    out.push_back(std::move(item));
    if (c == std::string::npos) break;
    pos = c + 1;
  }
  return out;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(key, text)) out.push_back(to_double(key, item));
  return out;
}

ScenarioConfig make_config(const KeyValues& kv) {
  for (const auto& [k, v] : kv.entries())
    if (!known_keys().count(k) && k.rfind("meta.", 0) != 0)
      throw ConfigError("config: unknown key " + k);

  ScenarioConfig c;
  auto num = [&](const char* key, double& field) {
    if (auto v = kv.get(key)) field = to_double(key, *v);
  };
  auto size = [&](const char* key, std::size_t& field) {
    if (auto v = kv.get(key)) field = to_size(key, *v);
  };
  auto list = [&](const char* key, std::vector<double>& field) {
    if (auto v = kv.get(key)) field = parse_list(key, *v);
  };

  const auto kind = kv.get("model.kind");
  if (!kind) throw ConfigError("config: model.kind is required");
  if (*kind == "dephasing")
    c.model = ModelKind::dephasing;
  else if (*kind == "damped")
    c.model = ModelKind::damped;
  else if (*kind == "generic")
    c.model = ModelKind::generic;
  else
    throw ConfigError("config: model.kind must be dephasing, damped or generic");

  const auto methods = kv.get("model.methods");
  if (!methods || trim(*methods).empty())
    throw ConfigError("config: model.methods must list at least one method");
  {
    std::stringstream ss(*methods);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) throw ConfigError("config: model.methods has an empty entry");
      const Method m = parse_method(item);
      if (std::find(c.methods.begin(), c.methods.end(), m) != c.methods.end())
        throw ConfigError("config: model.methods lists " + item + " twice");
      c.methods.push_back(m);
    }
  }
  for (Method m : c.methods) {
    if (c.model == ModelKind::damped && (m == Method::exact || m == Method::corrproj2))
      throw ConfigError("config: model.methods: " + method_name(m) +
                        " is not available for the damped multimode model");
    if (c.model == ModelKind::dephasing && m == Method::corrproj2)
      throw ConfigError("config: model.methods: corrproj2 needs model.kind = generic");
  }

  const std::string section = model_name(c.model) + ".";
  for (const auto& [k, v] : kv.entries()) {
    const auto dot = k.find('.');
    const std::string head = k.substr(0, dot + 1);
    if ((head == "dephasing." || head == "damped." || head == "generic.") && head != section)
      throw ConfigError("config: " + k + " does not apply to model.kind = " + model_name(c.model));
  }
  num((section + "c0").c_str(), c.c0);
  num((section + "c1").c_str(), c.c1);
  num("dephasing.r", c.r);
  num("dephasing.q", c.q);
  if (auto v = kv.get("dephasing.distribution")) c.distribution = *v;
  num("dephasing.xi", c.xi);
  num("dephasing.sigma", c.sigma);
  num("damped.gamma", c.gamma);
  num("damped.n", c.n_bosons);
  num("damped.omega_c", c.omega_c);
  num("damped.varsigma", c.varsigma);
  num("damped.nu_scale", c.nu_scale);
  if (auto v = kv.get("generic.spec")) c.generic_spec = *v;
  if (auto v = kv.get("generic.preset")) c.generic_preset = *v;
  num("generic.varsigma", c.jc_varsigma);
  num("generic.omega", c.jc_omega);
  num("generic.g", c.jc_g);
  size("generic.n_max", c.jc_n_max);
  size("generic.n", c.jc_n);
  num("grid.t_max", c.t_max);
  size("grid.n_points", c.n_points);
  list("sweep.r", c.sweep_r);
  list("sweep.q", c.sweep_q);
  list("sweep.gamma", c.sweep_gamma);
  list("sweep.n", c.sweep_n);
  if (auto v = kv.get("output.dir")) c.output_dir = *v;
  if (auto v = kv.get("output.name")) c.output_name = *v;
  if (auto v = kv.get("seed")) c.seed = to_size("seed", *v);

  if (!(c.t_max > 0.0)) throw ConfigError("config: grid.t_max must be positive");
  if (c.n_points < 2) throw ConfigError("config: grid.n_points must be at least 2");
  if (c.output_name.empty() || c.output_name.find('/') != std::string::npos)
    throw ConfigError("config: output.name must be a plain file stem");

  switch (c.model) {
    case ModelKind::dephasing:
      if (c.distribution != "gaussian" && c.distribution != "double_gaussian")
        throw ConfigError("config: dephasing.distribution must be gaussian or double_gaussian");
      if (std::abs(c.c0 * c.c0 + c.c1 * c.c1 - 1.0) > 1e-12)
        throw ConfigError("config: dephasing.c0^2 + dephasing.c1^2 must equal 1");
      if (!(c.xi > 0.0)) throw ConfigError("config: dephasing.xi must be positive");
      if (!(c.sigma > 0.0)) throw ConfigError("config: dephasing.sigma must be positive");
      if (!c.sweep_gamma.empty() || !c.sweep_n.empty())
        throw ConfigError("config: sweep.gamma and sweep.n apply to the damped model only");
      if (!c.sweep_q.empty() && c.distribution != "double_gaussian")
        throw ConfigError("config: sweep.q needs dephasing.distribution = double_gaussian");
      break;
    case ModelKind::damped:
      if (std::abs(c.c0 * c.c0 + c.c1 * c.c1 - 1.0) > 1e-12)
        throw ConfigError("config: damped.c0^2 + damped.c1^2 must equal 1");
      if (!(c.gamma > 0.0)) throw ConfigError("config: damped.gamma must be positive");
      if (!(c.n_bosons >= 0.0)) throw ConfigError("config: damped.n must be non-negative");
      if (!(c.omega_c > 0.0)) throw ConfigError("config: damped.omega_c must be positive");
      if (!(c.nu_scale > 0.0)) throw ConfigError("config: damped.nu_scale must be positive");
      if (!c.sweep_r.empty() || !c.sweep_q.empty())
        throw ConfigError("config: sweep.r and sweep.q apply to the dephasing model only");
      for (double g : c.sweep_gamma)
        if (!(g > 0.0)) throw ConfigError("config: sweep.gamma entries must be positive");
      for (double n : c.sweep_n)
        if (!(n >= 0.0)) throw ConfigError("config: sweep.n entries must be non-negative");
      break;
    case ModelKind::generic:
      if (std::abs(c.c0 * c.c0 + c.c1 * c.c1 - 1.0) > 1e-12)
        throw ConfigError("config: generic.c0^2 + generic.c1^2 must equal 1");
      if (c.generic_spec.empty() == c.generic_preset.empty())
        throw ConfigError("config: set exactly one of generic.spec and generic.preset");
      if (!c.generic_preset.empty() && c.generic_preset != "jaynes_cummings")
        throw ConfigError("config: generic.preset must be jaynes_cummings");
      if (!c.sweep_r.empty() || !c.sweep_q.empty() || !c.sweep_gamma.empty() ||
          !c.sweep_n.empty())
        throw ConfigError("config: the generic model has no sweep axes");
      break;
  }

  c.source = kv;
  return c;
}

ScenarioConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  KeyValues kv = KeyValues::load(path);
  for (const auto& o : overrides) kv.apply_override(o);
  return make_config(kv);
}

}  // namespace oqs
