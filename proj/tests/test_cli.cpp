#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gaplab/cli.hpp"

using namespace gaplab;

namespace {

std::vector<std::string> data_rows(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::vector<std::string> rows;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') rows.push_back(line);
  return rows;
}

std::string tmp_path(const std::string& name) { return "/tmp/gaplab_test_" + name; }

}  // namespace

TEST_CASE("airy-table: wronskian column constant, rows deterministic") {
  RunConfig cfg;
  cfg.command = Command::airy_table;
  cfg.x_min = -10.0;
  cfg.x_max = 5.0;
  cfg.step = 0.05;
  cfg.output_path = tmp_path("airy1.csv");
  run(cfg);
  cfg.output_path = tmp_path("airy2.csv");
  run(cfg);

  const auto rows1 = data_rows(tmp_path("airy1.csv"));
  const auto rows2 = data_rows(tmp_path("airy2.csv"));
  REQUIRE(rows1.size() > 100);
  CHECK(rows1 == rows2);

  // header row then data; wronskian is the last column
  double w0 = 0.0;
  for (std::size_t i = 1; i < rows1.size(); ++i) {
    const auto pos = rows1[i].rfind(',');
    const double w = std::strtod(rows1[i].c_str() + pos + 1, nullptr);
    if (i == 1)
      w0 = w;
    else
      CHECK(std::abs(w - w0) < 1e-10 * std::abs(w0));
  }
}

TEST_CASE("eigen command writes eigenvalues and optional samples") {
  RunConfig cfg;
  cfg.command = Command::eigen;
  cfg.phi0 = M_PI / 4.0;
  cfg.mu = 1e4;
  cfg.K = 2;
  cfg.tol = 1e-11;
  cfg.output_path = tmp_path("eigen.csv");
  cfg.samples_path = tmp_path("eigen_samples.csv");
  run(cfg);

  const auto rows = data_rows(tmp_path("eigen.csv"));
  REQUIRE(rows.size() == 3);  // header + 2 eigenvalues
  CHECK(rows[0] == "k,lambda,norm_check");
  const double lam1 = std::strtod(rows[1].c_str() + 2, nullptr);
  const double lam2 = std::strtod(rows[2].c_str() + 2, nullptr);
  CHECK(lam1 > 0.0);
  CHECK(lam2 > lam1);

  const auto srows = data_rows(tmp_path("eigen_samples.csv"));
  CHECK(srows.size() > 8000);
}

TEST_CASE("perturb battery: deterministic for fixed seed, all pass") {
  RunConfig cfg;
  cfg.command = Command::perturb_battery;
  cfg.instances = 40;
  cfg.seed = 12345;
  cfg.output_path = tmp_path("batt1.csv");
  run(cfg);
  cfg.output_path = tmp_path("batt2.csv");
  cfg.jobs = 4;  // parallel run must produce identical rows
  run(cfg);
  const auto r1 = data_rows(tmp_path("batt1.csv"));
  const auto r2 = data_rows(tmp_path("batt2.csv"));
  CHECK(r1 == r2);
  CHECK(r1.back().substr(0, 8) == "summary,");
  CHECK(r1.back().substr(r1.back().rfind(',') + 1) == "1");
}

TEST_CASE("theorem command emits a verdict-true JSON report") {
  RunConfig cfg;
  cfg.command = Command::theorem;
  cfg.format = OutputFormat::json;
  cfg.D0 = 1.0;
  cfg.n = 2;
  cfg.mu_list = {1e4};
  cfg.boundary_samples = 128;
  cfg.output_path = tmp_path("report.json");
  run(cfg);

  std::ifstream in(tmp_path("report.json"));
  REQUIRE(in.good());
  nlohmann::json j;
  in >> j;
  CHECK(j.at("success").get<bool>());
  CHECK(j.at("gap").at("verdict").get<bool>());
  CHECK(j.at("gap").at("integral_I").get<double>() < 0.0);
  CHECK(std::abs(j.at("diameter").get<double>() - 1.0) < 1e-6);
  CHECK(j.at("schema").get<std::string>() == "theorem v1");
}

TEST_CASE("sweep commands: rows, slope diagnostics, converging deviation") {
  RunConfig cfg;
  cfg.command = Command::corollary_sweep;
  cfg.phi0 = M_PI / 4.0;
  cfg.mu_list = {1e4, 1e5, 1e6};
  cfg.output_path = tmp_path("cor.csv");
  run(cfg);
  const auto rows = data_rows(tmp_path("cor.csv"));
  REQUIRE(rows.size() == 5);  // header + 3 samples + slope
  CHECK(rows.back().substr(0, 6) == "slope,");
  // deviation column (7th) shrinks along the sweep
  auto col = [](const std::string& row, int idx) {
    std::size_t pos = 0;
    for (int i = 0; i < idx; ++i) pos = row.find(',', pos) + 1;
    return std::strtod(row.c_str() + pos, nullptr);
  };
  CHECK(std::abs(col(rows[3], 6)) < std::abs(col(rows[1], 6)));
  // scaled integral near the target -(2/3)(a2 - a1)
  CHECK(col(rows[3], 4) == doctest::Approx(-1.16656).epsilon(1e-2));

  RunConfig rcfg;
  rcfg.command = Command::rescale_sweep;
  rcfg.phi0 = M_PI / 4.0;
  rcfg.K = 2;
  rcfg.mu_list = {1e4, 1e5, 1e6};
  rcfg.jobs = 3;
  rcfg.output_path = tmp_path("resc.csv");
  run(rcfg);
  const auto rrows = data_rows(tmp_path("resc.csv"));
  REQUIRE(rrows.size() == 1 + 6 + 4);  // header + 3 mu x 2 k + 4 slope rows
  CHECK(rrows[1].substr(0, 7) == "sample,");
  CHECK(rrows[7].substr(0, 10) == "slope_eig,");
}

TEST_CASE("GAPLAB_OUT_DIR resolves relative output paths") {
  setenv("GAPLAB_OUT_DIR", "/tmp", 1);
  RunConfig cfg;
  cfg.command = Command::airy_table;
  cfg.x_min = -1.0;
  cfg.x_max = 1.0;
  cfg.step = 0.5;
  cfg.output_path = "gaplab_test_envdir.csv";
  run(cfg);
  unsetenv("GAPLAB_OUT_DIR");
  CHECK(data_rows("/tmp/gaplab_test_envdir.csv").size() == 6);
}

TEST_CASE("invalid parameters are rejected before computation") {
  RunConfig cfg;
  cfg.command = Command::eigen;
  cfg.phi0 = 2.0;  // outside (0, pi/2)
  cfg.output_path = tmp_path("never.csv");
  CHECK_THROWS_AS(run(cfg), range_error);

  RunConfig cfg2;
  cfg2.command = Command::airy_table;
  cfg2.step = -1.0;
  cfg2.output_path = tmp_path("never.csv");
  CHECK_THROWS_AS(run(cfg2), range_error);

  RunConfig cfg3;
  cfg3.command = Command::airy_table;
  cfg3.output_path.clear();
  CHECK_THROWS_AS(run(cfg3), range_error);

  RunConfig cfg4;
  cfg4.command = Command::theorem;  // format stays csv
  cfg4.output_path = tmp_path("never.json");
  CHECK_THROWS_AS(run(cfg4), range_error);
}

#ifdef GAPLAB_CLI_BINARY
TEST_CASE("binary: exit codes and output files") {
  const std::string bin = GAPLAB_CLI_BINARY;
  const std::string out = tmp_path("bin_airy.csv");

  int rc = std::system((bin + " airy-table --x-min -2 --x-max 2 --step 0.5 --out " + out +
                        " > /dev/null 2>&1")
                           .c_str());
  CHECK(WEXITSTATUS(rc) == 0);
  CHECK(data_rows(out).size() == 10);  // header + 9 points

  rc = std::system((bin + " eigen --phi0 3.0 --out /tmp/gaplab_x.csv > /dev/null 2>&1").c_str());
  CHECK(WEXITSTATUS(rc) == 2);

  rc = std::system((bin + " no-such-command > /dev/null 2>&1").c_str());
  CHECK(WEXITSTATUS(rc) == 2);

  // config file provides defaults, flags override
  const std::string cfg_path = tmp_path("cfg.json");
  {
    std::ofstream c(cfg_path);
    c << R"({"x_min": -1.0, "x_max": 1.0, "step": 0.5, "out": ")" << tmp_path("bin_cfg.csv")
      << R"("})";
  }
  rc = std::system((bin + " airy-table --config " + cfg_path + " > /dev/null 2>&1").c_str());
  CHECK(WEXITSTATUS(rc) == 0);
  CHECK(data_rows(tmp_path("bin_cfg.csv")).size() == 6);  // header + 5 points

  rc = std::system((bin + " airy-table --config " + cfg_path + " --step 0.25 > /dev/null 2>&1")
                       .c_str());
  CHECK(WEXITSTATUS(rc) == 0);
  CHECK(data_rows(tmp_path("bin_cfg.csv")).size() == 10);  // header + 9 points

  // perturbed problem with j = 2 through the flags
  rc = std::system((bin + " eigen --phi0 0.7 --mu 250 --j 2 --t 0.5 --K 2 --out " +
                    tmp_path("bin_eigen_j2.csv") + " > /dev/null 2>&1")
                       .c_str());
  CHECK(WEXITSTATUS(rc) == 0);
  CHECK(data_rows(tmp_path("bin_eigen_j2.csv")).size() == 3);
}
#endif
