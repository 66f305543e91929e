#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "oqs/qmat.hpp"

namespace oqs {

struct Series {
  std::string method;
  std::vector<cplx> rho10;
  std::vector<double> rho11;
};

/// Time grid plus one (rho10, rho11) series per method.
struct TrajectoryTable {
  std::string time_label = "t";
  std::vector<double> time;
  std::vector<Series> series;
  std::vector<std::pair<std::string, std::string>> metadata;

  const Series& get(const std::string& method) const;
  bool has(const std::string& method) const;
  void add(Series s);
  /// Equal column lengths, finite values.
  void validate() const;
};

/// Uniform grid of n points on [0, t_max].
std::vector<double> uniform_grid(double t_max, std::size_t n);

/// 17 significant digits, scientific notation, locale independent.
std::string format_double(double x);

/// '#'-prefixed metadata lines, then time,<method>_re_rho10,<method>_im_rho10,<method>_rho11,...
void write_csv(const TrajectoryTable& table, std::ostream& os);
void write_csv(const TrajectoryTable& table, const std::string& path);

}  // namespace oqs
