#include <doctest.h>

#include <filesystem>
#include <json.hpp>
#include <sstream>

#include "cli_app.hpp"
#include "ssb/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream o, e;
  const int code = ssb::cli::run_cli(args, o, e);
  return {code, o.str(), e.str()};
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("ssb_cli_" + name);
  fs::remove_all(p);
  return p;
}

json load(const fs::path& p) { return json::parse(ssb::read_file(p.string())); }

}  // namespace

TEST_CASE("ground-state writes the soliton constants") {
  const auto dir = scratch("gs");
  const auto r = cli({"ground-state", "--d", "1", "--p", "5", "--tol", "1e-10", "--out-dir", dir.string()});
  REQUIRE(r.code == 0);
  const auto j = load(dir / "ground_state.json");
  CHECK(j["kappa"].get<double>() == doctest::Approx(1.8612097).epsilon(1e-7));
  CHECK(j["n_c"].get<double>() == doctest::Approx(1.3603495).epsilon(1e-7));
  CHECK(j["tolerance"].get<double>() == 1e-10);
  CHECK(j["residual_sup"].get<double>() < 1e-10);
  CHECK(j["config"]["tol_gs"].get<double>() == 1e-10);
  const auto csv = ssb::read_file((dir / "ground_state.csv").string());
  CHECK(csv.rfind("# command=ground-state\n", 0) == 0);
  CHECK(csv.find("\nr,Q,Qp\n") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("usage and configuration errors exit 1") {
  auto r = cli({"ground-state", "--d", "1"});
  CHECK(r.code == 1);
  CHECK(r.err.find("--p") != std::string::npos);
  CHECK(r.err.find("Usage") != std::string::npos);
  CHECK(cli({}).code == 1);
  CHECK(cli({"frobnicate"}).code == 1);
  CHECK(cli({"solve", "--d", "1", "--p", "5", "--sigma", "0.5"}).code == 1);
  CHECK(cli({"solve", "--d", "1", "--p", "5", "--sigma", "abc"}).code == 1);
  CHECK(cli({"sweep", "--d", "1", "--p", "5", "--sigma-list", "1e-3,1e-2"}).code == 1);
  CHECK(cli({"solve", "--config", "/nonexistent/file.conf"}).code == 1);
  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("config file with flag override") {
  const auto dir = scratch("cfg");
  fs::create_directories(dir);
  const auto conf = dir / "run.conf";
  ssb::write_file_atomic(conf.string(), "d = 1\np = 5\nsigma = 1e-2\nout-dir = " + (dir / "a").string() + "\n");
  const auto r = cli({"basis", "--config", conf.string(), "--sigma", "3e-3"});
  REQUIRE(r.code == 0);
  const auto j = load(dir / "a" / "basis.json");
  CHECK(j["config"]["sigma"].get<double>() == 3e-3);
  CHECK(j["config"]["d"].get<int>() == 1);
  CHECK(j["kappa_B_identity"].get<double>() == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(j["wronskian_AD_max_deviation"].get<double>() < 1e-7);
  fs::remove_all(dir);
}

TEST_CASE("solve is deterministic and reports diagnostics") {
  const auto a = scratch("solve_a"), b = scratch("solve_b");
  const std::vector<std::string> base{"solve", "--d", "1", "--couple-p", "--sigma", "1e-2", "--dump-trajectory"};
  auto args = base;
  args.insert(args.end(), {"--out-dir", a.string()});
  REQUIRE(cli(args).code == 0);
  args = base;
  args.insert(args.end(), {"--out-dir", b.string(), "--jobs", "3"});
  REQUIRE(cli(args).code == 0);
  for (const char* f : {"profile.csv", "law_row.csv", "trajectory.csv"}) {
    auto strip = [](std::string s) {
      // drop the header lines that name the run itself
      std::string out;
      std::istringstream is(s);
      for (std::string line; std::getline(is, line);)
        if (line.rfind("# out-dir=", 0) != 0 && line.rfind("# jobs=", 0) != 0) out += line + "\n";
      return out;
    };
    CHECK(strip(ssb::read_file((a / f).string())) == strip(ssb::read_file((b / f).string())));
  }
  const auto j = load(a / "diagnostics.json");
  CHECK(j["matcher"]["residual_norm"].get<double>() <= 1e-8);
  CHECK(j["energy"]["zero_within_bound"].get<bool>());
  CHECK(std::abs(j["tail"]["relative_to_rho"].get<double>()) < 0.02);
  const auto prof = ssb::read_file((a / "profile.csv").string());
  CHECK(prof.find("\nr,re_psi,im_psi,abs_psi,re_p,im_p\n") != std::string::npos);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("solver failure exits 2 with a best-iterate dump") {
  const auto dir = scratch("fail");
  const auto r = cli({"solve", "--d", "1", "--p", "5", "--sigma", "1e-3", "--max-iter", "1", "--out-dir", dir.string()});
  CHECK(r.code == 2);
  REQUIRE(fs::exists(dir / "failure.json"));
  const auto j = load(dir / "failure.json");
  CHECK(j["best_iterate"]["b"].get<double>() > 0);
  CHECK_FALSE(fs::exists(dir / "profile.csv"));
  fs::remove_all(dir);
}

TEST_CASE("sweep table schema") {
  const std::vector<std::string> expected{
      "sigma",      "p",          "d",         "b",           "b_sigma",    "b_dev",        "rho",
      "rho_sigma",  "rho_dev",    "gamma",     "gamma_sigma", "theta",      "theta_sigma",  "residual",
      "jacobian_condition", "iterations", "converged", "strict_box", "warm_started", "energy",
      "energy_error", "kinetic",  "tail_amp",  "tail_spread", "hdot1_dist", "dpsi_slope"};
  CHECK(ssb::cli::law_table_columns() == expected);

  const auto dir = scratch("sweep");
  const auto r = cli({"sweep", "--d", "1", "--p", "5", "--sigma-list", "1e-2,3e-3", "--out-dir", dir.string()});
  REQUIRE(r.code == 0);
  const auto j = load(dir / "law_table.json");
  REQUIRE(j["rows"].size() == 2);
  CHECK(j["trends"]["b_dev_strictly_decreasing"].get<bool>());
  CHECK(j["rows"][1]["warm_started"].get<double>() == 1.0);
  fs::remove_all(dir);

  // a single sigma behaves like solve
  const auto one = scratch("sweep1");
  REQUIRE(cli({"sweep", "--d", "1", "--p", "5", "--sigma-list", "1e-2", "--out-dir", one.string()}).code == 0);
  CHECK(fs::exists(one / "diagnostics.json"));
  CHECK(fs::exists(one / "profile.csv"));
  fs::remove_all(one);
}

TEST_CASE("verify: clean pass and the kappa_B sensitivity hook") {
  const auto dir = scratch("verify");
  auto r = cli({"verify", "--out-dir", dir.string()});
  CHECK(r.code == 0);
  auto j = load(dir / "verify.json");
  CHECK(j["passed"].get<bool>());
  CHECK(j["suites"].size() == 8);
  for (const auto& s : j["suites"]) CHECK(s.contains("max_residual"));

  r = cli({"verify", "--out-dir", dir.string(), "--perturb-kappa-b", "0.01"});
  CHECK(r.code == 3);
  j = load(dir / "verify.json");
  REQUIRE(j["failed"].size() == 1);
  CHECK(j["failed"][0] == "kappa_b_identity");
  fs::remove_all(dir);
}
