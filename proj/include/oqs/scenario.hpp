#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "oqs/config.hpp"
#include "oqs/engine.hpp"
#include "oqs/trajectory.hpp"

namespace oqs {

inline constexpr const char* kToolName = "oqs_apo";
inline constexpr const char* kToolVersion = "0.1.0";

/// One point of the cartesian sweep product. `values` holds (axis, value) in
/// the fixed axis order r, q, gamma, n; `tokens` the original list text.
struct SweepPoint {
  std::vector<std::pair<std::string, double>> values;
  std::vector<std::string> tokens;
  ScenarioConfig config;

  /// "<name>_r1_q2" style file stem.
  std::string stem() const;
};

std::vector<SweepPoint> expand_sweep(const ScenarioConfig& cfg);

/// Time column label and grid of the configured model.
std::string time_label(const ScenarioConfig& cfg);

/// Runs one point in memory. Time column in the model's dimensionless unit.
TrajectoryTable run_point(const ScenarioConfig& point);

/// Observable reported in summary.csv: Re rho10 for dephasing, rho11 otherwise.
std::vector<double> summary_observable(const ScenarioConfig& cfg, const Series& s);

struct SummaryRow {
  std::vector<std::pair<std::string, double>> sweep;
  std::string method;
  double asymptote = 0.0;
  double peak_t = 0.0;
  double peak_value = 0.0;
  std::optional<double> max_abs_dev_vs_exact;
};
std::vector<SummaryRow> summarize(const SweepPoint& point, const TrajectoryTable& table);

struct SweepResult {
  std::vector<SweepPoint> points;
  std::vector<TrajectoryTable> tables;  // same order as points
  std::vector<SummaryRow> summary;
};

/// Executes all points on a pool of `jobs` workers (0 = hardware concurrency).
/// The first failure (lowest point index) is rethrown after all workers join.
SweepResult run_sweep(const ScenarioConfig& cfg, unsigned jobs);

/// Calls fn(i) for i in [0, n) on `jobs` workers; exceptions are collected per index.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn);

void write_summary(const std::vector<SummaryRow>& rows, const std::string& path);

/// run(): one CSV per sweep point plus summary.csv in `out_dir`. Returns written paths.
std::vector<std::string> run(const ScenarioConfig& cfg, const std::string& out_dir, unsigned jobs);

/// Built-in parameter sets behind the figures, as config text.
std::vector<std::string> figure_names();
KeyValues figure_config(const std::string& name);
std::vector<std::string> named_figure(const std::string& name, const std::string& out_dir,
                                      unsigned jobs, const std::vector<std::string>& overrides = {});

/// Generic model from a JSON file: h_system, h_env, couplings [{a, b}], g, and
/// the initial state as "rho" or "psi" (matrices as {"re": [[..]], "im": [[..]]}
/// or plain real nested arrays), optional "projectors" for corrproj2.
struct GenericModel {
  InteractionSpec spec;
  ComplexMatrix rho_se;
  std::vector<ComplexMatrix> projectors;
};
GenericModel load_generic_model(const std::string& path);
GenericModel generic_model(const ScenarioConfig& cfg);

}  // namespace oqs
