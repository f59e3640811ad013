#include <doctest.h>

#include <filesystem>
#include <limits>

#include "ssb/errors.hpp"
#include "ssb/io.hpp"

using namespace ssb;

TEST_CASE("shortest double formatting round-trips") {
  for (double x : {0.1, 1e-3, 3e-4, 1.0 / 3.0, 5.0, -2.5e-300, 1.7976931348623157e308, 4.9e-324}) {
    CHECK(parse_double(fmt_double(x)) == x);
  }
  CHECK(fmt_double(5.0) == "5");
  CHECK_THROWS_AS(parse_double("1.0x"), ConfigError);
  CHECK_THROWS_AS(parse_double(""), ConfigError);
  CHECK(parse_double(" +2e-3 ") == 2e-3);
}

TEST_CASE("config round-trips through its text format") {
  RunConfig c;
  c.d = 3;
  c.p = 1.0 + 4.0 / 3.0;
  c.couple_p = true;
  c.sigma = 0.0017;
  c.sigma_list = {2e-2, 1.0 / 300.0, 7e-4};
  c.tol_ode = 3.3e-13;
  c.r_far = 123.456;
  c.jobs = 4;
  c.out_dir = "some dir/x";
  const std::string text = format_config(c);
  const RunConfig back = config_from_text(text);
  CHECK(back == c);
  CHECK(format_config(back) == text);
}

TEST_CASE("config parsing: comments, blanks, errors") {
  const auto kv = parse_kv_text("# top\n\n d = 1 # dim\np=5\n");
  CHECK(kv.size() == 2);
  CHECK(kv.at("d") == "1");
  CHECK(kv.at("p") == "5");
  CHECK_THROWS_AS(parse_kv_text("no equals sign\n"), ConfigError);
  CHECK_THROWS_AS(config_from_text("nope = 1\n"), ConfigError);
  CHECK_THROWS_AS(config_from_text("d = 1.5\n"), ConfigError);
  CHECK_THROWS_AS(config_from_text("couple-p = maybe\n"), ConfigError);
}

TEST_CASE("validation") {
  RunConfig c;
  CHECK_NOTHROW(c.validate());
  c.sigma = 0.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RunConfig{};
  c.tol_ode = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RunConfig{};
  c.sigma_list = {1e-2, 1e-5};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RunConfig{};
  c.d = 3;
  c.p = 5;  // energy critical
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("csv text and atomic write") {
  const auto s = csv_text({{"a", "1"}}, {"x", "y"}, {{1.0, 0.5}, {2.0, std::numeric_limits<double>::quiet_NaN()}});
  CHECK(s == "# a=1\nx,y\n1,0.5\n2,nan\n");
  CHECK_THROWS_AS(csv_text({}, {"x"}, {{1.0, 2.0}}), ConfigError);

  const auto dir = std::filesystem::temp_directory_path() / "ssb_test_io";
  std::filesystem::remove_all(dir);
  const auto path = (dir / "sub" / "f.txt").string();
  write_file_atomic(path, "hello\n");
  CHECK(read_file(path) == "hello\n");
  write_file_atomic(path, "again\n");
  CHECK(read_file(path) == "again\n");
  CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
  std::filesystem::remove_all(dir);
}
