#include "oqs/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <thread>

#include <json.hpp>

#include "oqs/damped.hpp"
#include "oqs/dephasing.hpp"
#include "oqs/errors.hpp"
#include "oqs/frame.hpp"

namespace oqs {

namespace {

struct Axis {
  const char* sweep_key;
  const char* param_key;
  const char* name;
};
constexpr Axis kAxes[] = {{"sweep.r", "dephasing.r", "r"},
                          {"sweep.q", "dephasing.q", "q"},
                          {"sweep.gamma", "damped.gamma", "gamma"},
                          {"sweep.n", "damped.n", "n"}};

std::string shortest(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

/// Comma list k / denom for k = from..to, in shortest round-trip form.
std::string range_list(int from, int to, int denom) {
  std::string out;
  for (int k = from; k <= to; ++k) {
    if (!out.empty()) out += ',';
    out += shortest(static_cast<double>(k) / denom);
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> point_metadata(const ScenarioConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> meta;
  for (const auto& [k, v] : cfg.source.entries()) {
    if (k.rfind("output.", 0) == 0 || k.rfind("sweep.", 0) == 0 || k.rfind("meta.", 0) == 0)
      continue;
    meta.emplace_back(k, v);
  }
  meta.emplace_back("meta.tool", kToolName);
  meta.emplace_back("meta.version", kToolVersion);
  meta.emplace_back("meta.grid", "uniform 0.." + format_double(cfg.t_max) + " n=" +
                                     std::to_string(cfg.n_points));
  return meta;
}

std::vector<std::pair<std::string, std::string>> figure_metadata(const ScenarioConfig& cfg,
                                                                 const std::string& quantity) {
  std::vector<std::pair<std::string, std::string>> meta;
  for (const auto& [k, v] : cfg.source.entries())
    if (k.rfind("output.", 0) != 0 && k.rfind("meta.", 0) != 0) meta.emplace_back(k, v);
  meta.emplace_back("meta.tool", kToolName);
  meta.emplace_back("meta.version", kToolVersion);
  meta.emplace_back("meta.quantity", quantity);
  return meta;
}

// ---- models ----

TrajectoryTable run_dephasing(const ScenarioConfig& c) {
  const DephasingState state = c.distribution == "double_gaussian"
                                   ? DephasingState::double_gaussian(c.c0, c.c1, c.r, c.q, c.sigma)
                                   : DephasingState::gaussian(c.c0, c.c1, c.r, c.sigma);
  const DephasingParams params{c.xi, c.sigma};
  params.validate();
  TrajectoryTable tab;
  tab.time_label = "xi_sigma_t";
  tab.time = uniform_grid(c.t_max, c.n_points);
  std::vector<double> t;
  t.reserve(tab.time.size());
  for (double x : tab.time) t.push_back(params.time(x));
  for (Method m : c.methods) {
    Series s{method_name(m), coherence_series(state, params, m, t),
             std::vector<double>(t.size(), state.rho11())};
    tab.add(std::move(s));
  }
  return tab;
}

std::vector<double> damped_times(const ScenarioConfig& c, const std::vector<double>& grid) {
  std::vector<double> t;
  t.reserve(grid.size());
  for (double x : grid) t.push_back(x * c.nu_scale / c.omega_c);
  return t;
}

BathSpec damped_bath(const ScenarioConfig& c, double gamma, double n) {
  BathSpec b;
  b.gamma = gamma;
  b.omega_c = c.omega_c;
  b.varsigma = c.varsigma;
  b.n_bosons = n;
  return b;
}

/// Integrals for gamma = 1 and N = 1; every point rescales them, so a sweep and
/// a standalone run follow the same arithmetic.
std::vector<BaseRates> unit_rates(const ScenarioConfig& c) {
  return base_rate_series(damped_bath(c, 1.0, 1.0), damped_times(c, uniform_grid(c.t_max, c.n_points)));
}

TrajectoryTable run_damped(const ScenarioConfig& c, const std::vector<BaseRates>& unit) {
  const BathSpec bath = damped_bath(c, c.gamma, c.n_bosons);
  DampedInitialState init;
  init.c0 = c.c0;
  init.c1 = c.c1;
  const DampedFrame frame = damped_frame(init);
  const std::vector<double> grid = uniform_grid(c.t_max, c.n_points);
  const std::vector<double> times = damped_times(c, grid);
  if (unit.size() != times.size()) throw DimensionError("damped: cached rate grid mismatch");
  std::vector<BaseRates> base(unit.size());
  for (std::size_t k = 0; k < unit.size(); ++k) {
    base[k].vac_s = c.gamma * unit[k].vac_s;
    base[k].vac_c = c.gamma * unit[k].vac_c;
    base[k].occ_s = c.gamma * c.n_bosons * unit[k].occ_s;
    base[k].occ_c = c.gamma * c.n_bosons * unit[k].occ_c;
  }
  TrajectoryTable tab;
  tab.time_label = c.nu_scale == 1.0 ? "omega_c_t" : "nu_t";
  tab.time = grid;
  for (Method m : c.methods) {
    TrajectoryTable one = m == Method::tcl2 ? solve_tcl(bath, frame, times, base)
                                            : solve_apo(bath, frame, times, base);
    tab.add(one.series.front());
  }
  return tab;
}

TrajectoryTable run_generic(const ScenarioConfig& c) {
  const GenericModel model = generic_model(c);
  const std::vector<double> times = uniform_grid(c.t_max, c.n_points);
  const DensityOperator rho(model.rho_se, 1e-9);
  const FrameDecomposition frame = decompose(rho, model.spec.shape());
  const ComplexMatrix ref = average_env_state(frame);
  TrajectoryTable tab;
  tab.time_label = "t";
  tab.time = times;
  for (Method m : c.methods) {
    std::vector<ComplexMatrix> states;
    switch (m) {
      case Method::exact: states = exact_oracle(model.rho_se, model.spec, times); break;
      case Method::tcl2: states = solve_tcl2(model.spec, frame, ref, times); break;
      case Method::apo2: states = solve_apo2(model.spec, frame, times); break;
      case Method::corrproj2: {
        const ProjectorFamily fam = model.projectors.empty()
                                        ? trivial_family(ref)
                                        : build_block_projector(model.projectors, ref);
        states = solve_corrproj2(model.spec, frame, fam, times);
        break;
      }
    }
    tab.add(to_table(method_name(m), times, states).series.front());
  }
  return tab;
}

TrajectoryTable run_point_impl(const ScenarioConfig& point, const std::vector<BaseRates>* unit) {
  TrajectoryTable tab;
  switch (point.model) {
    case ModelKind::dephasing: tab = run_dephasing(point); break;
    case ModelKind::damped: tab = run_damped(point, unit ? *unit : unit_rates(point)); break;
    case ModelKind::generic: tab = run_generic(point); break;
  }
  tab.metadata = point_metadata(point);
  tab.validate();
  return tab;
}

// ---- JSON ----

ComplexMatrix json_matrix(const nlohmann::json& j, const std::string& what) {
  auto real_part = [&](const nlohmann::json& m) {
    if (!m.is_array() || m.empty() || !m.front().is_array())
      throw ConfigError("generic spec: " + what + " must be a nested array");
    const auto rows = static_cast<Eigen::Index>(m.size());
    const auto cols = static_cast<Eigen::Index>(m.front().size());
    Eigen::MatrixXd out(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      const auto& row = m[static_cast<std::size_t>(i)];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
        throw ConfigError("generic spec: " + what + " has ragged rows");
      for (Eigen::Index k = 0; k < cols; ++k) {
        if (!row[static_cast<std::size_t>(k)].is_number())
          throw ConfigError("generic spec: " + what + " has a non-numeric entry");
        out(i, k) = row[static_cast<std::size_t>(k)].get<double>();
      }
    }
    return out;
  };
  if (j.is_object()) {
    if (!j.contains("re")) throw ConfigError("generic spec: " + what + " needs a \"re\" part");
    const Eigen::MatrixXd re = real_part(j.at("re"));
    ComplexMatrix out = re.cast<cplx>();
    if (j.contains("im")) {
      const Eigen::MatrixXd im = real_part(j.at("im"));
      if (im.rows() != re.rows() || im.cols() != re.cols())
        throw ConfigError("generic spec: " + what + " re/im shapes differ");
      out += kI * im.cast<cplx>();
    }
    return out;
  }
  return real_part(j).cast<cplx>();
}

Eigen::VectorXcd json_vector(const nlohmann::json& j, const std::string& what) {
  auto real_part = [&](const nlohmann::json& v) {
    if (!v.is_array() || v.empty()) throw ConfigError("generic spec: " + what + " must be an array");
    RealVector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ConfigError("generic spec: " + what + " has a non-numeric entry");
      out(static_cast<Eigen::Index>(i)) = v[i].get<double>();
    }
    return out;
  };
  if (j.is_object()) {
    if (!j.contains("re")) throw ConfigError("generic spec: " + what + " needs a \"re\" part");
    const RealVector re = real_part(j.at("re"));
    Eigen::VectorXcd out = re.cast<cplx>();
    if (j.contains("im")) {
      const RealVector im = real_part(j.at("im"));
      if (im.size() != re.size()) throw ConfigError("generic spec: " + what + " re/im sizes differ");
      out += kI * im.cast<cplx>();
    }
    return out;
  }
  return real_part(j).cast<cplx>();
}

void check_square(const ComplexMatrix& m, Eigen::Index n, const std::string& what) {
  if (m.rows() != n || m.cols() != n)
    throw ConfigError("generic spec: " + what + " must be " + std::to_string(n) + "x" +
                      std::to_string(n));
}

void check_model(GenericModel& m) {
  const auto de = static_cast<Eigen::Index>(m.spec.h_env.rows());
  check_square(m.spec.h_system, 2, "h_system");
  check_square(m.spec.h_env, de, "h_env");
  for (std::size_t j = 0; j < m.spec.couplings.size(); ++j) {
    check_square(m.spec.couplings[j].a, 2, "couplings[" + std::to_string(j) + "].a");
    check_square(m.spec.couplings[j].b, de, "couplings[" + std::to_string(j) + "].b");
  }
  check_square(m.rho_se, 2 * de, "initial state");
  for (std::size_t i = 0; i < m.projectors.size(); ++i)
    check_square(m.projectors[i], de, "projectors[" + std::to_string(i) + "]");
  try {
    m.spec.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("generic spec: ") + e.what());
  }
}

}  // namespace

std::string SweepPoint::stem() const {
  std::string s = config.output_name;
  for (std::size_t i = 0; i < values.size(); ++i) s += "_" + values[i].first + tokens[i];
  return s;
}

std::vector<SweepPoint> expand_sweep(const ScenarioConfig& cfg) {
  std::vector<std::pair<const Axis*, std::vector<std::string>>> axes;
  for (const Axis& a : kAxes)
    if (auto v = cfg.source.get(a.sweep_key)) axes.emplace_back(&a, split_list(a.sweep_key, *v));

  std::size_t total = 1;
  for (const auto& [a, tokens] : axes) total *= tokens.size();

  KeyValues base = cfg.source;
  for (const Axis& a : kAxes) base.erase(a.sweep_key);

  std::vector<SweepPoint> points;
  points.reserve(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    SweepPoint p;
    KeyValues kv = base;
    std::size_t rem = idx;
    std::vector<std::size_t> pick(axes.size());
    for (std::size_t i = axes.size(); i-- > 0;) {
      pick[i] = rem % axes[i].second.size();
      rem /= axes[i].second.size();
    }
    for (std::size_t i = 0; i < axes.size(); ++i) {
      const std::string& tok = axes[i].second[pick[i]];
      kv.set(axes[i].first->param_key, tok);
      p.tokens.push_back(tok);
    }
    p.config = make_config(kv);
    for (std::size_t i = 0; i < axes.size(); ++i) {
      const Axis& a = *axes[i].first;
      const std::string key = a.param_key;
      double v = 0.0;
      if (key == "dephasing.r") v = p.config.r;
      if (key == "dephasing.q") v = p.config.q;
      if (key == "damped.gamma") v = p.config.gamma;
      if (key == "damped.n") v = p.config.n_bosons;
      p.values.emplace_back(a.name, v);
    }
    points.push_back(std::move(p));
  }
  return points;
}

std::string time_label(const ScenarioConfig& cfg) {
  switch (cfg.model) {
    case ModelKind::dephasing: return "xi_sigma_t";
    case ModelKind::damped: return cfg.nu_scale == 1.0 ? "omega_c_t" : "nu_t";
    case ModelKind::generic: return "t";
  }
  return "t";
}

TrajectoryTable run_point(const ScenarioConfig& point) { return run_point_impl(point, nullptr); }

std::vector<double> summary_observable(const ScenarioConfig& cfg, const Series& s) {
  if (cfg.model == ModelKind::dephasing) {
    std::vector<double> out;
    out.reserve(s.rho10.size());
    for (const cplx& z : s.rho10) out.push_back(z.real());
    return out;
  }
  return s.rho11;
}

std::vector<SummaryRow> summarize(const SweepPoint& point, const TrajectoryTable& table) {
  std::vector<SummaryRow> rows;
  const Series* exact = table.has("exact") ? &table.get("exact") : nullptr;
  for (const Series& s : table.series) {
    SummaryRow row;
    row.sweep = point.values;
    row.method = s.method;
    const std::vector<double> obs = summary_observable(point.config, s);
    row.asymptote = obs.back();
    std::size_t best = 0;
    for (std::size_t k = 1; k < obs.size(); ++k)
      if (std::abs(obs[k]) > std::abs(obs[best])) best = k;
    row.peak_t = table.time[best];
    row.peak_value = obs[best];
    if (exact && &s != exact) {
      double dev = 0.0;
      for (std::size_t k = 0; k < obs.size(); ++k)
        dev = std::max({dev, std::abs(s.rho10[k] - exact->rho10[k]),
                        std::abs(s.rho11[k] - exact->rho11[k])});
      row.max_abs_dev_vs_exact = dev;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(n, 1)));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

namespace {

SweepResult run_sweep_impl(const ScenarioConfig& cfg, unsigned jobs,
                           const std::function<void(const SweepPoint&, const TrajectoryTable&)>& sink) {
  SweepResult res;
  res.points = expand_sweep(cfg);
  res.tables.resize(res.points.size());
  // Only gamma and n vary across a damped sweep, so the unit integrals are shared.
  std::vector<BaseRates> unit;
  if (cfg.model == ModelKind::damped) unit = unit_rates(res.points.front().config);
  parallel_for(res.points.size(), jobs, [&](std::size_t i) {
    res.tables[i] = run_point_impl(res.points[i].config,
                                   cfg.model == ModelKind::damped ? &unit : nullptr);
    if (sink) sink(res.points[i], res.tables[i]);
  });
  for (std::size_t i = 0; i < res.points.size(); ++i) {
    auto rows = summarize(res.points[i], res.tables[i]);
    res.summary.insert(res.summary.end(), rows.begin(), rows.end());
  }
  return res;
}

std::string join_path(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
}

void open_out(std::ofstream& os, const std::string& path) {
  os.open(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open '" + path + "' for writing");
}

/// Long format: axis, time, value.
void write_grid(const std::string& path,
                const std::vector<std::pair<std::string, std::string>>& meta,
                const std::string& axis, const std::string& time_col, const SweepResult& res,
                std::size_t axis_index, const std::vector<std::size_t>& which,
                std::size_t time_stride,
                const std::function<double(const TrajectoryTable&, std::size_t)>& value) {
  std::ofstream os;
  open_out(os, path);
  for (const auto& [k, v] : meta) os << "# " << k << "=" << v << '\n';
  os << axis << ',' << time_col << ",value\n";
  for (std::size_t i : which) {
    const TrajectoryTable& tab = res.tables[i];
    for (std::size_t k = 0; k < tab.time.size(); k += time_stride)
      os << format_double(res.points[i].values[axis_index].second) << ','
         << format_double(tab.time[k]) << ',' << format_double(value(tab, k)) << '\n';
  }
  if (!os) throw ConfigError("failed writing '" + path + "'");
}

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

}  // namespace

SweepResult run_sweep(const ScenarioConfig& cfg, unsigned jobs) {
  return run_sweep_impl(cfg, jobs, {});
}

void write_summary(const std::vector<SummaryRow>& rows, const std::string& path) {
  std::ofstream os;
  open_out(os, path);
  std::vector<std::string> axes;
  for (const auto& row : rows)
    for (const auto& [name, v] : row.sweep)
      if (std::find(axes.begin(), axes.end(), name) == axes.end()) axes.push_back(name);
  for (const auto& a : axes) os << a << ',';
  os << "method,asymptote,peak_t,peak_value,max_abs_dev_vs_exact\n";
  for (const auto& row : rows) {
    for (const auto& a : axes) {
      auto it = std::find_if(row.sweep.begin(), row.sweep.end(),
                             [&](const auto& p) { return p.first == a; });
      if (it != row.sweep.end()) os << format_double(it->second);
      os << ',';
    }
    os << row.method << ',' << format_double(row.asymptote) << ',' << format_double(row.peak_t)
       << ',' << format_double(row.peak_value) << ',';
    if (row.max_abs_dev_vs_exact) os << format_double(*row.max_abs_dev_vs_exact);
    os << '\n';
  }
  if (!os) throw ConfigError("failed writing '" + path + "'");
}

std::vector<std::string> run(const ScenarioConfig& cfg, const std::string& out_dir, unsigned jobs) {
  ensure_dir(out_dir);
  const SweepResult res = run_sweep_impl(cfg, jobs, [&](const SweepPoint& p, const TrajectoryTable& t) {
    write_csv(t, join_path(out_dir, p.stem() + ".csv"));
  });
  std::vector<std::string> files;
  for (const auto& p : res.points) files.push_back(join_path(out_dir, p.stem() + ".csv"));
  files.push_back(join_path(out_dir, "summary.csv"));
  write_summary(res.summary, files.back());
  return files;
}

// ---- figures ----

std::vector<std::string> figure_names() { return {"fig2", "fig3", "fig4", "fig5", "fig6", "fig7"}; }

KeyValues figure_config(const std::string& name) {
  const std::string r_wide = range_list(-40, 40, 10);
  std::string text;
  if (name == "fig2") {
    text =
        "model.kind = dephasing\n"
        "model.methods = exact, tcl2, apo2\n"
        "sweep.r = -2, -1, 1, 2\n"
        "grid.t_max = 10\n"
        "grid.n_points = 1000\n";
  } else if (name == "fig3") {
    text =
        "model.kind = dephasing\n"
        "model.methods = exact, tcl2, apo2\n"
        "sweep.r = " + r_wide + "\n"
        "grid.t_max = 10\n"
        "grid.n_points = 201\n";
  } else if (name == "fig4") {
    // two panels with paired (r, q); the sweep lists are replaced per panel
    text =
        "model.kind = dephasing\n"
        "model.methods = exact, tcl2, apo2\n"
        "dephasing.distribution = double_gaussian\n"
        "grid.t_max = 10\n"
        "grid.n_points = 2001\n";
  } else if (name == "fig5") {
    text =
        "model.kind = dephasing\n"
        "model.methods = exact, tcl2, apo2\n"
        "dephasing.distribution = double_gaussian\n"
        "sweep.q = 2, 15\n"
        "sweep.r = " + r_wide + "\n"
        "grid.t_max = 10\n"
        "grid.n_points = 401\n";
  } else if (name == "fig6") {
    text =
        "model.kind = damped\n"
        "model.methods = tcl2, apo2\n"
        "damped.nu_scale = 100\n"
        "sweep.gamma = 0.05, 0.5\n"
        "sweep.n = 3, 10\n"
        "grid.t_max = 4\n"
        "grid.n_points = 4001\n";
  } else if (name == "fig7") {
    text =
        "model.kind = damped\n"
        "model.methods = tcl2, apo2\n"
        "damped.nu_scale = 100\n"
        "damped.n = 3\n"
        "sweep.gamma = " + range_list(1, 100, 100) + "\n"
        "grid.t_max = 4\n"
        "grid.n_points = 4001\n";
  } else {
    throw ConfigError("unknown figure '" + name + "' (expected fig2..fig7)");
  }
  KeyValues kv = KeyValues::parse(text);
  kv.set("output.name", name);
  return kv;
}

std::vector<std::string> named_figure(const std::string& name, const std::string& out_dir,
                                      unsigned jobs, const std::vector<std::string>& overrides) {
  KeyValues kv = figure_config(name);
  for (const auto& o : overrides) kv.apply_override(o);
  ensure_dir(out_dir);
  std::vector<std::string> files;

  auto write_points = [&](const SweepResult& res) {
    for (std::size_t i = 0; i < res.points.size(); ++i) {
      files.push_back(join_path(out_dir, res.points[i].stem() + ".csv"));
      write_csv(res.tables[i], files.back());
    }
  };
  auto finish = [&](const std::vector<SummaryRow>& rows) {
    files.push_back(join_path(out_dir, "summary.csv"));
    write_summary(rows, files.back());
    return files;
  };
  auto re_diff = [](const char* m) {
    return [m](const TrajectoryTable& t, std::size_t k) {
      return t.get(m).rho10[k].real() - t.get("exact").rho10[k].real();
    };
  };

  if (name == "fig2") {
    const SweepResult res = run_sweep(make_config(kv), jobs);
    write_points(res);
    return finish(res.summary);
  }

  if (name == "fig3") {
    const ScenarioConfig cfg = make_config(kv);
    const SweepResult res = run_sweep(cfg, jobs);
    const auto idx = all_indices(res.points.size());
    const std::string tl = time_label(cfg);
    const struct {
      const char* file;
      const char* quantity;
      std::function<double(const TrajectoryTable&, std::size_t)> f;
    } grids[] = {
        {"tcl_minus_exact", "Re rho10 tcl2 - Re rho10 exact", re_diff("tcl2")},
        {"apo_minus_exact", "Re rho10 apo2 - Re rho10 exact", re_diff("apo2")},
        {"apo_imag", "Im rho10 apo2",
         [](const TrajectoryTable& t, std::size_t k) { return t.get("apo2").rho10[k].imag(); }},
    };
    for (const auto& g : grids) {
      files.push_back(join_path(out_dir, name + "_" + g.file + ".csv"));
      write_grid(files.back(), figure_metadata(cfg, g.quantity), "r", tl, res, 0, idx, 1, g.f);
    }
    return finish(res.summary);
  }

  if (name == "fig4") {
    const std::pair<std::string, std::string> panels[] = {
        {"0.1", shortest(std::numbers::pi / 0.2)}, {"2", "2"}};
    std::vector<SummaryRow> rows;
    for (const auto& [r, q] : panels) {
      KeyValues p = kv;
      if (!p.get("sweep.r")) p.set("sweep.r", r);
      if (!p.get("sweep.q")) p.set("sweep.q", q);
      const SweepResult res = run_sweep(make_config(p), jobs);
      write_points(res);
      rows.insert(rows.end(), res.summary.begin(), res.summary.end());
    }
    return finish(rows);
  }

  if (name == "fig5") {
    const ScenarioConfig cfg = make_config(kv);
    const SweepResult res = run_sweep(cfg, jobs);
    const std::string tl = time_label(cfg);
    // axes are ordered (r, q); group the points by q
    std::vector<std::string> q_tokens;
    for (const auto& p : res.points)
      if (std::find(q_tokens.begin(), q_tokens.end(), p.tokens[1]) == q_tokens.end())
        q_tokens.push_back(p.tokens[1]);
    for (const auto& qt : q_tokens) {
      std::vector<std::size_t> which;
      for (std::size_t i = 0; i < res.points.size(); ++i)
        if (res.points[i].tokens[1] == qt) which.push_back(i);
      KeyValues panel = cfg.source;
      panel.erase("sweep.q");
      panel.set("dephasing.q", qt);
      ScenarioConfig pcfg = cfg;
      pcfg.source = panel;
      for (const auto& [file, quantity, m] :
           {std::tuple{"tcl_minus_exact", "Re rho10 tcl2 - Re rho10 exact", "tcl2"},
            std::tuple{"apo_minus_exact", "Re rho10 apo2 - Re rho10 exact", "apo2"}}) {
        files.push_back(join_path(out_dir, name + "_q" + qt + "_" + file + ".csv"));
        write_grid(files.back(), figure_metadata(pcfg, quantity), "r", tl, res, 0, which, 1,
                   re_diff(m));
      }
    }
    return finish(res.summary);
  }

  if (name == "fig6") {
    const ScenarioConfig cfg = make_config(kv);
    const SweepResult res = run_sweep(cfg, jobs);
    write_points(res);
    // inset: rho11 apo2 - tcl2 for omega_c t <= 10
    files.push_back(join_path(out_dir, name + "_insets.csv"));
    std::ofstream os;
    open_out(os, files.back());
    for (const auto& [k, v] : figure_metadata(cfg, "rho11 apo2 - rho11 tcl2, omega_c t <= 10"))
      os << "# " << k << "=" << v << '\n';
    os << time_label(cfg);
    for (const auto& p : res.points) os << ',' << p.stem().substr(name.size() + 1) << "_apo_minus_tcl";
    os << '\n';
    const TrajectoryTable& first = res.tables.front();
    for (std::size_t k = 0; k < first.time.size(); ++k) {
      if (first.time[k] * cfg.nu_scale > 10.0 * (1.0 + 1e-12)) break;
      os << format_double(first.time[k]);
      for (const auto& t : res.tables)
        os << ',' << format_double(t.get("apo2").rho11[k] - t.get("tcl2").rho11[k]);
      os << '\n';
    }
    if (!os) throw ConfigError("failed writing '" + files.back() + "'");
    return finish(res.summary);
  }

  // fig7
  const ScenarioConfig cfg = make_config(kv);
  const SweepResult res = run_sweep(cfg, jobs);
  const std::size_t stride = std::max<std::size_t>(1, (cfg.n_points - 1) / 400);
  files.push_back(join_path(out_dir, name + "_apo_minus_tcl.csv"));
  write_grid(files.back(), figure_metadata(cfg, "rho11 apo2 - rho11 tcl2"), "gamma",
             time_label(cfg), res, 0, all_indices(res.points.size()), stride,
             [](const TrajectoryTable& t, std::size_t k) {
               return t.get("apo2").rho11[k] - t.get("tcl2").rho11[k];
             });
  return finish(res.summary);
}

// ---- generic model ----

GenericModel load_generic_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("generic.spec: cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("generic.spec: " + path + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("generic spec: top level must be an object");
  for (const char* key : {"h_system", "h_env", "couplings"})
    if (!j.contains(key)) throw ConfigError(std::string("generic spec: missing \"") + key + "\"");

  GenericModel m;
  m.spec.h_system = json_matrix(j.at("h_system"), "h_system");
  m.spec.h_env = json_matrix(j.at("h_env"), "h_env");
  if (j.contains("g")) {
    if (!j.at("g").is_number()) throw ConfigError("generic spec: g must be a number");
    m.spec.g = j.at("g").get<double>();
  }
  const auto& cs = j.at("couplings");
  if (!cs.is_array() || cs.empty()) throw ConfigError("generic spec: couplings must be a non-empty array");
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const std::string tag = "couplings[" + std::to_string(i) + "]";
    if (!cs[i].is_object() || !cs[i].contains("a") || !cs[i].contains("b"))
      throw ConfigError("generic spec: " + tag + " needs \"a\" and \"b\"");
    m.spec.couplings.push_back({json_matrix(cs[i].at("a"), tag + ".a"),
                                json_matrix(cs[i].at("b"), tag + ".b")});
  }
  if (j.contains("rho") == j.contains("psi"))
    throw ConfigError("generic spec: give exactly one of \"rho\" and \"psi\"");
  if (j.contains("rho")) {
    m.rho_se = json_matrix(j.at("rho"), "rho");
  } else {
    Eigen::VectorXcd psi = json_vector(j.at("psi"), "psi");
    const double n = psi.norm();
    if (!(n > 0.0)) throw ConfigError("generic spec: psi is zero");
    psi /= n;
    m.rho_se = psi * psi.adjoint();
  }
  if (j.contains("projectors")) {
    const auto& ps = j.at("projectors");
    if (!ps.is_array()) throw ConfigError("generic spec: projectors must be an array");
    for (std::size_t i = 0; i < ps.size(); ++i)
      m.projectors.push_back(json_matrix(ps[i], "projectors[" + std::to_string(i) + "]"));
  }
  check_model(m);
  return m;
}

GenericModel generic_model(const ScenarioConfig& cfg) {
  if (!cfg.generic_spec.empty()) return load_generic_model(cfg.generic_spec);
  if (cfg.jc_n > cfg.jc_n_max) throw ConfigError("config: generic.n must not exceed generic.n_max");
  GenericModel m;
  m.spec = jaynes_cummings(cfg.jc_varsigma, cfg.jc_omega, cfg.jc_g, cfg.jc_n_max);
  m.rho_se = jaynes_cummings_state(cfg.c0, cfg.c1, cfg.jc_n, cfg.jc_n_max);
  return m;
}

}  // namespace oqs
