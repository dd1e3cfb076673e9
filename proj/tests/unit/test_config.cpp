#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "pwlab/cli.hpp"
#include "pwlab/config.hpp"

using namespace pwlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("pwlab_unit_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string value_of(const config::Resolved& r, const std::string& key) {
  for (const auto& [k, v] : r.entries()) {
    if (k == key) return v;
  }
  return "<absent>";
}

}  // namespace

TEST_CASE("config text parsing") {
  const auto raw = config::parse_text("# header\n\n  solver.dt = 2e-3   # trailing\nwave.c=1/2\n", "t");
  REQUIRE(raw.entries.size() == 2);
  CHECK(raw.entries[0].first == "solver.dt");
  CHECK(raw.entries[0].second == "2e-3");
  CHECK(raw.entries[1].second == "1/2");
  CHECK_THROWS_AS(config::parse_text("a = 1\na = 2\n"), config::ConfigError);
  CHECK_THROWS_AS(config::parse_text("just words\n"), config::ConfigError);
  CHECK_THROWS_AS(config::parse_text("bad..key = 1\n"), config::ConfigError);
  CHECK_THROWS_AS(config::parse_file("/nonexistent/pwlab.conf"), config::ConfigError);
}

TEST_CASE("config reals") {
  CHECK(config::parse_real("2pi") == 2.0 * std::numbers::pi);
  CHECK(config::parse_real("2*pi") == 2.0 * std::numbers::pi);
  CHECK(config::parse_real("pi") == std::numbers::pi);
  CHECK(std::isinf(config::parse_real("inf")));
  CHECK(config::parse_real(" 1e-3 ") == 1e-3);
  CHECK_THROWS(config::parse_real("abc"));
  const auto list = config::parse_real_list("3, 6,inf");
  REQUIRE(list.size() == 3);
  CHECK(list[1] == 6.0);
  CHECK(config::parse_real_list("").empty());
  for (double x : {0.1, 1.0 / 3.0, 2.0 / 3.0, 6.283185307179586, 1e-300}) {
    CHECK(config::parse_real(config::format_real(x)) == x);
  }
}

TEST_CASE("config resolution") {
  const config::Schema& picard = cli::schema_for("picard");
  const auto minimal = config::resolve(config::parse_text("wave.c = 2/4\n"), picard);
  CHECK(value_of(minimal, "grid.dealias") == "0.6666666666666666");
  CHECK(minimal.real("grid.dealias") == 2.0 / 3.0);
  CHECK(minimal.real("solver.nu") == 1.0);
  CHECK(value_of(minimal, "picard.gammas") == "0.25, 0.5, 0.75, 1");
  CHECK(minimal.rational("wave.c") == Rational::make(1, 2));
  CHECK(value_of(minimal, "wave.c") == "1/2");
  CHECK(minimal.entries().size() == picard.size());

  try {
    config::resolve(config::parse_text("bogus.key = 3\n", "x.conf"), picard);
    FAIL("unknown key accepted");
  } catch (const config::ConfigError& e) {
    CHECK(std::string(e.what()).find("bogus.key") != std::string::npos);
  }
  try {
    config::resolve(config::parse_text("solver.dt = fast\n"), picard);
    FAIL("type mismatch accepted");
  } catch (const config::ConfigError& e) {
    CHECK(std::string(e.what()).find("solver.dt") != std::string::npos);
    CHECK(std::string(e.what()).find("real") != std::string::npos);
  }
  CHECK_THROWS_AS(config::resolve(config::parse_text("picard.max_iter = 2.5\n"), picard), config::ConfigError);
  CHECK_THROWS_AS(config::resolve(config::parse_text("solver.nonlinear = maybe\n"), picard), config::ConfigError);

  const config::Schema required{{"needed", config::ValueType::integer, std::nullopt, ""}};
  try {
    config::resolve(config::parse_text(""), required);
    FAIL("missing key accepted");
  } catch (const config::ConfigError& e) {
    CHECK(std::string(e.what()).find("needed") != std::string::npos);
  }

  auto r = minimal;
  r.set("seed", "42");
  CHECK(r.integer("seed") == 42);
  CHECK_THROWS_AS(r.set("seed", "x"), config::ConfigError);
  CHECK_THROWS_AS(r.real("seed"), config::ConfigError);

  const auto again = config::resolve(config::parse_text(cli::render_config(minimal)), picard);
  CHECK(again.entries() == minimal.entries());
  CHECK_THROWS_AS(cli::schema_for("nope"), config::ConfigError);
}

TEST_CASE("cli runs") {
  SUBCASE("taylor-green energy column") {
    cli::RunOptions o;
    o.command = "simulate2d";
    o.config_text = "grid.n = 32\nsolver.T = 0.05\nsolver.stride = 5\n";
    o.out = scratch("tg");
    const auto r = cli::run(o);
    CHECK(r.exit_code == 0);
    std::istringstream csv(slurp(o.out / "diagnostics.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "t,lp_p3,lp_p6,lp_pinf,hs,energy,div_resid,M_bound");
    int rows = 0;
    while (std::getline(csv, line)) {
      std::vector<double> v;
      std::stringstream ls(line);
      std::string cell;
      while (std::getline(ls, cell, ',')) v.push_back(std::stod(cell));
      const double exact = std::numbers::pi * std::numbers::pi * std::exp(-4.0 * v[0]);
      CHECK(std::abs(v[5] - exact) / exact < 1e-8);
      ++rows;
    }
    CHECK(rows == 11);
    CHECK(fs::exists(o.out / "manifest.json"));
    CHECK(slurp(o.out / "manifest.json").find("\"status\": \"passed\"") != std::string::npos);
    CHECK(fs::exists(o.out / "summary.json"));

    const auto again = cli::run(o);
    CHECK(again.exit_code == 2);
    CHECK(again.error.find("not empty") != std::string::npos);
  }
  SUBCASE("zero profile passes at once") {
    cli::RunOptions o;
    o.command = "planewave-check";
    o.config_text = "profile.kind = zero\nprofile.n = 8\nsolver.T = 0.01\n";
    o.out = scratch("zero");
    const auto r = cli::run(o);
    CHECK(r.exit_code == 0);
    REQUIRE(r.checks.size() == 1);
    CHECK(r.checks[0].value == 0.0);
  }
  SUBCASE("incommensurable box cites the rule") {
    cli::RunOptions o;
    o.command = "planewave-check";
    o.config_text = "wave.c = 1/3\nprofile.n = 8\nbox.points = 8,8,8\nbox.periods = 2pi,2pi,2pi\n";
    o.out = scratch("incomm");
    const auto r = cli::run(o);
    CHECK(r.exit_code == 2);
    CHECK(r.error.find("commensurability rule") != std::string::npos);
    CHECK(slurp(o.out / "summary.json").find("commensurability rule") != std::string::npos);
  }
  SUBCASE("oversized perturbation records smallness violation") {
    cli::RunOptions o;
    o.command = "stability";
    o.config_text =
        "profile.n = 32\nprofile.L = 0\nbox.points = 32,32,32\nbox.periods = 8,8,8\n"
        "perturbation.radius = 0.5\nperturbation.core = 0.0625\nstability.eps = 1e4\n"
        "stability.delta = 0.5\nstability.T = 0.1\nsolver.dt = 2e-3\n";
    o.out = scratch("abort");
    const auto r = cli::run(o);
    CHECK(r.exit_code == 1);
    CHECK(slurp(o.out / "summary.json").find("smallness violated") != std::string::npos);
  }
  SUBCASE("seed override and bit-identical reruns") {
    cli::RunOptions o;
    o.command = "simulate3d";
    o.config_text = "grid.n = 16\nsolver.T = 0.02\nsolver.dt = 0.005\noutput.snapshots = true\n";
    o.seed = 7;
    o.out = scratch("det_a");
    CHECK(cli::run(o).exit_code == 0);
    cli::RunOptions b = o;
    b.out = scratch("det_b");
    CHECK(cli::run(b).exit_code == 0);
    for (const char* f : {"diagnostics.csv", "summary.json", "config.resolved", "snapshots/state_000004.snap"}) {
      CHECK(slurp(o.out / f) == slurp(b.out / f));
    }
    CHECK(slurp(o.out / "config.resolved").find("seed = 7") != std::string::npos);
    cli::RunOptions c = o;
    c.seed = 8;
    c.out = scratch("det_c");
    CHECK(cli::run(c).exit_code == 0);
    CHECK(slurp(o.out / "diagnostics.csv") != slurp(c.out / "diagnostics.csv"));
  }
  SUBCASE("bad thread count") {
    cli::RunOptions o;
    o.command = "heatdecay";
    o.threads = 0;
    o.out = scratch("threads");
    CHECK(cli::run(o).exit_code == 2);
  }
}
