#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace ssb {

// Resolved run configuration. The file format is flat `key = value` lines
// (keys are the long CLI flag names without dashes); '#' starts a comment.
struct RunConfig {
  int d = 1;
  double p = 5.0;
  bool couple_p = false;  // p = 1 + 4/(d - 2 sigma) per sigma
  double sigma = 1e-3;
  std::vector<double> sigma_list{1e-2, 3e-3, 1e-3, 3e-4};
  double sigma_min = 3e-4;
  double sigma_max = 3e-2;
  double b = 0.0;  // basis subcommand; 0 -> b_sigma(sigma)
  double tol_ode = 1e-12;
  double tol_newton = 1e-8;
  double tol_gs = 1e-12;  // ground-state shooting tolerance
  double tol_picard = 1e-13;
  double r_far = 0.0;  // 0 -> max(b^-2, 50)
  double box_relax = 10.0;
  int max_iter = 30;
  int jobs = 1;
  double h_outer = 0.005;
  std::string out_dir = "out";

  std::vector<std::pair<std::string, std::string>> to_kv() const;
  // Unknown keys or malformed values throw ConfigError.
  void set(const std::string& key, const std::string& value);
  // Tolerances positive, sigma values within [sigma_min, sigma_max], d >= 1, p > 1, ...
  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

std::map<std::string, std::string> parse_kv_text(const std::string& text);
std::string format_config(const RunConfig& cfg);
RunConfig config_from_text(const std::string& text);

// Locale-independent shortest round-trip formatting.
std::string fmt_double(double x);
double parse_double(const std::string& s);
std::vector<double> parse_double_list(const std::string& s);

std::string read_file(const std::string& path);
// Writes to path.tmp and renames over path.
void write_file_atomic(const std::string& path, const std::string& content);

// CSV: "# key=value" header lines, one column-name row, then data rows.
std::string csv_text(const std::vector<std::pair<std::string, std::string>>& header,
                     const std::vector<std::string>& columns, const std::vector<std::vector<double>>& rows);

}  // namespace ssb
