// end-to-end checks driving the installed binary
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "transio/empirical.hpp"
#include "transio/grid.hpp"

using namespace transio;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(TRANSIO_BIN) + " " + args + " >/tmp/cli_stdout.txt 2>/tmp/cli_stderr.txt";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_fixture_grid(const std::string& path) {
  std::ofstream out(path);
  out << "nrows 2\nncols 2\ncellsize 1.0\nnclasses 2\n";
  out << "1 2\n1 1\n";
}

}  // namespace

TEST_CASE("scan: single lag on a hand-enumerated fixture") {
  write_fixture_grid("/tmp/cli_fix.grid");
  REQUIRE(run("scan --grid /tmp/cli_fix.grid --lag 0 1 --output /tmp/cli_curve.csv") == 0);

  std::ifstream in("/tmp/cli_curve.csv");
  const auto curve = read_curve_csv(in);
  REQUIRE(curve.lags.size() == 1);
  CHECK(curve.at(1, 1, 0).value() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(curve.at(1, 2, 0).value() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_FALSE(curve.at(2, 1, 0).defined());

  SUBCASE("manifest sidecar is emitted") {
    const auto m = slurp("/tmp/cli_curve.csv.manifest.json");
    CHECK(m.find("\"subcommand\": \"scan\"") != std::string::npos);
    CHECK(m.find("wall_clock_ms") != std::string::npos);
  }
}

TEST_CASE("scan: missing grid file exits 2") {
  CHECK(run("scan --grid /tmp/does_not_exist.grid --lag 0 1 --output /tmp/x.csv") == 2);
}

TEST_CASE("scan: malformed grid exits 2 with a line-numbered message") {
  std::ofstream out("/tmp/cli_bad.grid");
  out << "nrows 2\nncols 2\ncellsize 1.0\nnclasses 2\n";
  out << "1 9\n1 1\n";
  out.close();
  CHECK(run("scan --grid /tmp/cli_bad.grid --lag 0 1 --output /tmp/x.csv") == 2);
  const auto err = slurp("/tmp/cli_stderr.txt");
  CHECK(err.find("line 5") != std::string::npos);
}

TEST_CASE("scan: unknown flag exits 2") {
  CHECK(run("scan --grid /tmp/cli_fix.grid --lag 0 1 --frobnicate") == 2);
}

TEST_CASE("simulate -> scan -> fit round trip") {
  REQUIRE(run("simulate --nrows 48 --ncols 48 --family exponential --range 6 "
              "--thresholds 0 --seed 11 --output /tmp/cli_sim.grid") == 0);
  std::ifstream gin("/tmp/cli_sim.grid");
  const auto grid = load_grid(gin);
  CHECK(grid.nrows == 48);
  CHECK(grid.nclasses == 2);

  SUBCASE("same seed reproduces the grid byte for byte") {
    REQUIRE(run("simulate --nrows 48 --ncols 48 --family exponential --range 6 "
                "--thresholds 0 --seed 11 --output /tmp/cli_sim2.grid") == 0);
    CHECK(slurp("/tmp/cli_sim.grid") == slurp("/tmp/cli_sim2.grid"));
  }

  REQUIRE(run("scan --grid /tmp/cli_sim.grid --direction 0 1 --maxlag 8 "
              "--output /tmp/cli_dir.csv") == 0);
  std::ifstream cin2("/tmp/cli_dir.csv");
  const auto curve = read_curve_csv(cin2);
  REQUIRE(curve.lags.size() == 8);

  REQUIRE(run("fit --curve /tmp/cli_dir.csv --kernel epanechnikov --bandwidth 3 "
              "--hgrid 0,1.5,2.5,4 --output /tmp/cli_fit.csv") == 0);
  std::ifstream fin("/tmp/cli_fit.csv");
  const auto fitted = read_curve_csv(fin);
  REQUIRE(fitted.lags.size() == 4);
  // identity at zero lag
  CHECK(fitted.at(1, 1, 0).value() == 1.0);
  CHECK(fitted.at(1, 2, 0).value() == 0.0);
  // unit sums on the fitted rows
  for (size_t l = 0; l < 4; ++l) {
    const double sum = fitted.at(1, 1, l).value() + fitted.at(1, 2, l).value();
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("fit: corrupt unit-sum input exits 2") {
  std::ofstream out("/tmp/cli_corrupt.csv");
  out << "tail,head,drow,dcol,distance,value,npairs\n";
  out << "1,1,0,1,1,0.6,10\n";
  out << "1,2,0,1,1,0.6,10\n";
  out << "2,1,0,1,1,0.5,10\n";
  out << "2,2,0,1,1,0.5,10\n";
  out.close();
  CHECK(run("fit --curve /tmp/cli_corrupt.csv --kernel gaussian --bandwidth 1 "
            "--hgrid 0.5 --output /tmp/x.csv") == 2);
}

TEST_CASE("validate: verdict report") {
  std::ofstream cfg("/tmp/cli_model.json");
  cfg << R"({"family":"exponential","range":1.0,"proportion":0.5})";
  cfg.close();
  REQUIRE(run("validate --model /tmp/cli_model.json --nrandom 40 --seed 1 "
              "--output /tmp/cli_report.json") == 0);
  const auto rep = slurp("/tmp/cli_report.json");
  CHECK(rep.find("\"verdict\": \"PASS\"") != std::string::npos);
  const auto table = slurp("/tmp/cli_stdout.txt");
  CHECK(table.find("overall: PASS") != std::string::npos);

  SUBCASE("spherical is flagged ineligible for excursion truncation") {
    std::ofstream c2("/tmp/cli_model2.json");
    c2 << R"({"family":"spherical","range":1.0,"proportion":0.5})";
    c2.close();
    REQUIRE(run("validate --model /tmp/cli_model2.json --nrandom 40 --seed 1 "
                "--output /tmp/cli_report2.json") == 0);
    const auto rep2 = slurp("/tmp/cli_report2.json");
    CHECK(rep2.find("\"verdict\": \"FAIL\"") != std::string::npos);
  }
  SUBCASE("malformed config exits 2") {
    std::ofstream bad("/tmp/cli_model_bad.json");
    bad << R"({"family":"exponential")";
    bad.close();
    CHECK(run("validate --model /tmp/cli_model_bad.json --output /tmp/x.json") == 2);
  }
}

TEST_CASE("shape: metrics on a rasterized disk") {
  // 128x128 unit map, disk of radius 0.25
  CategoricalGrid g;
  g.nrows = 128;
  g.ncols = 128;
  g.cellsize = 1.0 / 128;
  g.nclasses = 2;
  for (int r = 0; r < 128; ++r)
    for (int c = 0; c < 128; ++c) {
      const double x = (c + 0.5) * g.cellsize - 0.5, y = (r + 0.5) * g.cellsize - 0.5;
      g.labels.push_back(x * x + y * y <= 0.0625 ? 1 : 2);
    }
  std::ofstream out("/tmp/cli_disk.grid");
  save_grid(out, g);
  out.close();
  REQUIRE(run("shape --grid /tmp/cli_disk.grid --class 1 --directions 4 --nlags 1 "
              "--output /tmp/cli_shape.csv") == 0);
  const auto csv = slurp("/tmp/cli_shape.csv");
  CHECK(csv.find("psi_directional") != std::string::npos);
  CHECK(csv.find("psi_raster_oracle") != std::string::npos);

  SUBCASE("absent class exits 2") {
    CHECK(run("shape --grid /tmp/cli_disk.grid --class 2 --directions 3 "
              "--output /tmp/x.csv") == 2);
  }
}

TEST_CASE("simulate: infeasible embedding exits 3") {
  // gaussian correlogram with range comparable to the domain defeats the
  // padded embedding's positive definiteness
  CHECK(run("simulate --nrows 80 --ncols 80 --family gaussian --range 40 "
            "--thresholds 0 --seed 1 --output /tmp/x.grid") == 3);
}
