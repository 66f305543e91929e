// oqs_apo: scenario runner.
//   oqs_apo run <config> [--out DIR] [--jobs N] [--override key=value]...
//   oqs_apo figure <fig2..fig7> [--out DIR] [--jobs N] [--override key=value]...
//   oqs_apo selftest [--timings]
// Exit codes: 0 success, 1 invalid configuration, 2 numerical failure.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oqs/acceptance.hpp"
#include "oqs/config.hpp"
#include "oqs/errors.hpp"
#include "oqs/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Second-order APO, TCL and correlated-projection simulator"};
  app.set_version_flag("--version", std::string(oqs::kToolVersion));
  app.require_subcommand(1);

  std::string config_path, figure, out_dir;
  std::vector<std::string> overrides;
  unsigned jobs = 0;
  bool timings = false;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--jobs", jobs, "Worker threads (0 = available parallelism)");
    sub->add_option("--override", overrides, "key=value, applied after the config (repeatable)")
        ->allow_extra_args(false);
  };
  auto* run = app.add_subcommand("run", "Run a configuration file");
  run->add_option("config", config_path, "Config file")->required();
  common(run);
  auto* fig = app.add_subcommand("figure", "Emit the data behind a figure");
  fig->add_option("name", figure, "fig2 .. fig7")->required()->check(CLI::IsMember(oqs::figure_names()));
  common(fig);
  auto* self = app.add_subcommand("selftest", "Run the acceptance criteria");
  self->add_flag("--timings", timings, "Append per-criterion wall time");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run) {
      oqs::ScenarioConfig cfg = oqs::load_config(config_path, overrides);
      const std::string dir = out_dir.empty() ? cfg.output_dir : out_dir;
      for (const auto& f : oqs::run(cfg, dir, jobs)) std::cout << f << '\n';
    } else if (*fig) {
      for (const auto& f : oqs::named_figure(figure, out_dir.empty() ? "." : out_dir, jobs, overrides))
        std::cout << f << '\n';
    } else if (*self) {
      return oqs::selftest(std::cout, timings);
    }
  } catch (const oqs::NumericalError& e) {
    std::cerr << "oqs_apo: numerical failure in " << e.operation() << ": " << e.what() << '\n';
    return 2;
  } catch (const oqs::Error& e) {
    std::cerr << "oqs_apo: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "oqs_apo: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
