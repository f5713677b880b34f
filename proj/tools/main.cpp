// gaplab command-line front-end. Exit codes: 0 success, 2 usage error
// (invalid parameters, named precondition), 3 computation failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "gaplab/cli.hpp"

namespace {

using gaplab::Command;
using gaplab::RunConfig;

// JSON config file: same keys as the long flags; flags given on the command
// line override the file.
void load_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw gaplab::range_error("cannot open config file " + path);
  nlohmann::json j;
  in >> j;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("phi0", cfg.phi0);
  get("mu", cfg.mu);
  get("t", cfg.t);
  get("D0", cfg.D0);
  get("tol", cfg.tol);
  get("t_factor", cfg.t_factor);
  get("x_min", cfg.x_min);
  get("x_max", cfg.x_max);
  get("step", cfg.step);
  get("n", cfg.n);
  get("j", cfg.j);
  get("K", cfg.K);
  get("grid", cfg.grid);
  get("instances", cfg.instances);
  get("dim_max", cfg.dim_max);
  get("boundary_samples", cfg.boundary_samples);
  get("seed", cfg.seed);
  get("jobs", cfg.jobs);
  get("out", cfg.output_path);
  get("samples_out", cfg.samples_path);
  if (j.contains("mu_list")) cfg.mu_list = j.at("mu_list").get<std::vector<double>>();
}

std::string prescan_config_path(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config") return argv[i + 1];
  return {};
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  try {
    const std::string config_path = prescan_config_path(argc, argv);
    if (!config_path.empty()) load_config_file(config_path, cfg);
  } catch (const std::exception& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }

  CLI::App app{"gaplab: spectral-gap laboratory for hyperbolic strip domains"};
  app.require_subcommand(1);
  std::string config_dummy;
  app.add_option("--config", config_dummy, "JSON config file (flags override)");

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", cfg.output_path, "output file path")->capture_default_str();
    sub->add_option("--jobs", cfg.jobs, "worker threads for sweeps")->capture_default_str();
    sub->add_option("--config", config_dummy, "JSON config file (flags override)");
  };

  CLI::App* airy = app.add_subcommand("airy-table", "dump (x, Ai, Ai', Bi, Bi') as CSV");
  airy->add_option("--x-min", cfg.x_min)->capture_default_str();
  airy->add_option("--x-max", cfg.x_max)->capture_default_str();
  airy->add_option("--step", cfg.step)->capture_default_str();
  add_common(airy);

  CLI::App* eig = app.add_subcommand("eigen", "reduced-problem eigenvalues to CSV");
  eig->add_option("--phi0", cfg.phi0, "opening angle in radians")->capture_default_str();
  eig->add_option("--mu", cfg.mu)->capture_default_str();
  eig->add_option("--n", cfg.n)->capture_default_str();
  eig->add_option("--j", cfg.j)->capture_default_str();
  eig->add_option("--t", cfg.t)->capture_default_str();
  eig->add_option("--K", cfg.K)->capture_default_str();
  eig->add_option("--tol", cfg.tol)->capture_default_str();
  eig->add_option("--grid", cfg.grid)->capture_default_str();
  eig->add_option("--samples-out", cfg.samples_path, "also dump sampled eigenfunctions");
  add_common(eig);

  CLI::App* resc = app.add_subcommand("rescale-sweep",
                                      "Airy-frame deviations over a mu sweep, with slope fits");
  resc->add_option("--phi0", cfg.phi0)->capture_default_str();
  resc->add_option("--n", cfg.n)->capture_default_str();
  resc->add_option("--K", cfg.K)->capture_default_str();
  resc->add_option("--grid", cfg.grid)->capture_default_str();
  resc->add_option("--mu", cfg.mu_list, "comma-separated mu values")->delimiter(',');
  add_common(resc);

  CLI::App* cor = app.add_subcommand("corollary-sweep",
                                     "scaled gap-derivative integral over a mu sweep");
  cor->add_option("--phi0", cfg.phi0)->capture_default_str();
  cor->add_option("--n", cfg.n)->capture_default_str();
  cor->add_option("--mu", cfg.mu_list, "comma-separated mu values")->delimiter(',');
  add_common(cor);

  CLI::App* pert = app.add_subcommand("perturb-battery",
                                      "random-instance battery for the perturbation bounds");
  pert->add_option("--instances", cfg.instances)->capture_default_str();
  pert->add_option("--seed", cfg.seed)->capture_default_str();
  pert->add_option("--dim-max", cfg.dim_max)->capture_default_str();
  add_common(pert);

  CLI::App* thm = app.add_subcommand("theorem", "full pipeline run, JSON report");
  thm->add_option("--D0", cfg.D0, "target diameter")->capture_default_str();
  thm->add_option("--n", cfg.n)->capture_default_str();
  thm->add_option("--t-factor", cfg.t_factor)->capture_default_str();
  thm->add_option("--mu-ladder", cfg.mu_list, "comma-separated mu ladder")->delimiter(',');
  thm->add_option("--boundary-samples", cfg.boundary_samples)->capture_default_str();
  add_common(thm);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (airy->parsed()) cfg.command = Command::airy_table;
  if (eig->parsed()) cfg.command = Command::eigen;
  if (resc->parsed()) cfg.command = Command::rescale_sweep;
  if (cor->parsed()) cfg.command = Command::corollary_sweep;
  if (pert->parsed()) cfg.command = Command::perturb_battery;
  if (thm->parsed()) cfg.command = Command::theorem;
  cfg.format = (cfg.command == Command::theorem) ? gaplab::OutputFormat::json
                                                 : gaplab::OutputFormat::csv;

  try {
    gaplab::run(cfg);
  } catch (const gaplab::range_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const gaplab::shape_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const gaplab::contract_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const gaplab::domain_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "computation failed: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
