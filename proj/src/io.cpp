#include "ssb/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ssb/errors.hpp"

namespace ssb {

std::string fmt_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(*b))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(e[-1]))) --e;
  if (b < e && *b == '+') ++b;
  const auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e) throw ConfigError("not a number: '" + s + "'");
  return v;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item));
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

namespace {

int parse_int(const std::string& s) {
  const double v = parse_double(s);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError("not an integer: '" + s + "'");
  return static_cast<int>(v);
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("not a boolean: '" + s + "'");
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt_double(v[i]);
  return s;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> RunConfig::to_kv() const {
  return {{"d", std::to_string(d)},
          {"p", fmt_double(p)},
          {"couple-p", couple_p ? "true" : "false"},
          {"sigma", fmt_double(sigma)},
          {"sigma-list", join(sigma_list)},
          {"sigma-min", fmt_double(sigma_min)},
          {"sigma-max", fmt_double(sigma_max)},
          {"b", fmt_double(b)},
          {"tol-ode", fmt_double(tol_ode)},
          {"tol-newton", fmt_double(tol_newton)},
          {"tol-gs", fmt_double(tol_gs)},
          {"tol-picard", fmt_double(tol_picard)},
          {"r-far", fmt_double(r_far)},
          {"box-relax", fmt_double(box_relax)},
          {"max-iter", std::to_string(max_iter)},
          {"jobs", std::to_string(jobs)},
          {"h-outer", fmt_double(h_outer)},
          {"out-dir", out_dir}};
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (key == "d") d = parse_int(value);
  else if (key == "p") p = parse_double(value);
  else if (key == "couple-p") couple_p = parse_bool(value);
  else if (key == "sigma") sigma = parse_double(value);
  else if (key == "sigma-list") sigma_list = parse_double_list(value);
  else if (key == "sigma-min") sigma_min = parse_double(value);
  else if (key == "sigma-max") sigma_max = parse_double(value);
  else if (key == "b") b = parse_double(value);
  else if (key == "tol-ode") tol_ode = parse_double(value);
  else if (key == "tol-newton") tol_newton = parse_double(value);
  else if (key == "tol-gs") tol_gs = parse_double(value);
  else if (key == "tol-picard") tol_picard = parse_double(value);
  else if (key == "r-far") r_far = parse_double(value);
  else if (key == "box-relax") box_relax = parse_double(value);
  else if (key == "max-iter") max_iter = parse_int(value);
  else if (key == "jobs") jobs = parse_int(value);
  else if (key == "h-outer") h_outer = parse_double(value);
  else if (key == "out-dir") out_dir = value;
  else throw ConfigError("unknown configuration key '" + key + "'");
}

void RunConfig::validate() const {
  auto need = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  need(d >= 1 && d <= 10, "d must be in [1, 10]");
  need(p > 1 && (d <= 2 || p < (d + 2.0) / (d - 2.0)), "p must satisfy 1 < p < (d+2)/(d-2)");
  need(tol_ode > 0 && tol_newton > 0 && tol_gs > 0 && tol_picard > 0, "tolerances must be positive");
  need(sigma_min > 0 && sigma_max >= sigma_min && sigma_max <= 0.05, "need 0 < sigma-min <= sigma-max <= 0.05");
  auto in_range = [&](double s) { return s >= sigma_min * (1 - 1e-12) && s <= sigma_max * (1 + 1e-12); };
  need(in_range(sigma), "sigma=" + fmt_double(sigma) + " outside the supported range [" + fmt_double(sigma_min) + ", " +
                            fmt_double(sigma_max) + "]");
  need(!sigma_list.empty(), "sigma-list is empty");
  for (double s : sigma_list)
    need(in_range(s), "sigma-list entry " + fmt_double(s) + " outside the supported range");
  need(b >= 0 && b < 1, "b must be in [0, 1)");
  need(r_far >= 0, "r-far must be >= 0");
  need(box_relax >= 1, "box-relax must be >= 1");
  need(max_iter >= 1, "max-iter must be >= 1");
  need(jobs >= 1 && jobs <= 256, "jobs must be in [1, 256]");
  need(h_outer > 0 && h_outer <= 0.1, "h-outer must be in (0, 0.1]");
  need(!out_dir.empty(), "out-dir is empty");
}

std::map<std::string, std::string> parse_kv_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream is(text);
  std::string line;
  int no = 0;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return std::string();
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  };
  while (std::getline(is, line)) {
    ++no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(no) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

std::string format_config(const RunConfig& cfg) {
  std::string s;
  for (const auto& [k, v] : cfg.to_kv()) s += k + " = " + v + "\n";
  return s;
}

RunConfig config_from_text(const std::string& text) {
  RunConfig c;
  for (const auto& [k, v] : parse_kv_text(text)) c.set(k, v);
  return c;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot write '" + tmp + "'");
    f << content;
    f.flush();
    if (!f) throw ConfigError("write failed for '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw ConfigError("cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
  }
}

std::string csv_text(const std::vector<std::pair<std::string, std::string>>& header,
                     const std::vector<std::string>& columns, const std::vector<std::vector<double>>& rows) {
  std::string s;
  for (const auto& [k, v] : header) s += "# " + k + "=" + v + "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) s += (i ? "," : "") + columns[i];
  s += "\n";
  for (const auto& row : rows) {
    if (row.size() != columns.size()) throw ConfigError("csv row width mismatch");
    for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + fmt_double(row[i]);
    s += "\n";
  }
  return s;
}

}  // namespace ssb
