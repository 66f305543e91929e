#include "oqs/trajectory.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

namespace oqs {

const Series& TrajectoryTable::get(const std::string& method) const {
  for (const auto& s : series)
    if (s.method == method) return s;
  throw ValidationError("trajectory has no series for method '" + method + "'");
}

bool TrajectoryTable::has(const std::string& method) const {
  for (const auto& s : series)
    if (s.method == method) return true;
  return false;
}

void TrajectoryTable::add(Series s) {
  for (auto& existing : series)
    if (existing.method == s.method) {
      existing = std::move(s);
      return;
    }
  series.push_back(std::move(s));
}

void TrajectoryTable::validate() const {
  for (double t : time)
    if (!std::isfinite(t)) throw NumericalError("trajectory", "non-finite time value");
  for (const auto& s : series) {
    if (s.rho10.size() != time.size() || s.rho11.size() != time.size())
      throw ValidationError("trajectory: column length mismatch for " + s.method);
    for (std::size_t k = 0; k < time.size(); ++k)
      if (!std::isfinite(s.rho10[k].real()) || !std::isfinite(s.rho10[k].imag()) ||
          !std::isfinite(s.rho11[k]))
        throw NumericalError(s.method, "non-finite value at t = " + format_double(time[k]));
  }
}

std::vector<double> uniform_grid(double t_max, std::size_t n) {
  if (n < 2) throw ConfigError("time grid needs at least two points");
  if (!(t_max > 0.0)) throw ConfigError("time grid needs t_max > 0");
  std::vector<double> t(n);
  for (std::size_t k = 0; k < n; ++k)
    t[k] = t_max * static_cast<double>(k) / static_cast<double>(n - 1);
  return t;
}

std::string format_double(double x) {
  if (x == 0.0) x = 0.0;  // drop the sign of negative zero
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::scientific, 16);
  return std::string(buf, res.ptr);
}

void write_csv(const TrajectoryTable& table, std::ostream& os) {
  table.validate();
  for (const auto& [k, v] : table.metadata) os << "# " << k << "=" << v << '\n';
  os << table.time_label;
  for (const auto& s : table.series)
    os << ',' << s.method << "_re_rho10," << s.method << "_im_rho10," << s.method << "_rho11";
  os << '\n';
  for (std::size_t i = 0; i < table.time.size(); ++i) {
    os << format_double(table.time[i]);
    for (const auto& s : table.series)
      os << ',' << format_double(s.rho10[i].real()) << ',' << format_double(s.rho10[i].imag())
         << ',' << format_double(s.rho11[i]);
    os << '\n';
  }
}

void write_csv(const TrajectoryTable& table, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open '" + path + "' for writing");
  write_csv(table, os);
  if (!os) throw ConfigError("failed writing '" + path + "'");
}

}  // namespace oqs
