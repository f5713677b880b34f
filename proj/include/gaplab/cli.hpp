#ifndef GAPLAB_CLI_HPP
#define GAPLAB_CLI_HPP

// Batch front-end: every pipeline as a reproducible command with file output.
// CSV files start with a '#'-prefixed metadata block (version, schema,
// config echo, timestamp); data rows are deterministic for a fixed config and
// seed, headers are excluded from that guarantee. Structured reports are JSON.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "gaplab/airy.hpp"
#include "gaplab/asymptotics.hpp"
#include "gaplab/common.hpp"
#include "gaplab/gap_model.hpp"
#include "gaplab/pipeline.hpp"

namespace gaplab {

enum class Command {
  airy_table,
  eigen,
  rescale_sweep,
  corollary_sweep,
  perturb_battery,
  theorem,
};

enum class OutputFormat { csv, json };

struct RunConfig {
  Command command = Command::airy_table;
  OutputFormat format = OutputFormat::csv;
  std::string output_path;

  double phi0 = M_PI / 4.0;
  double mu = 1e6;
  double t = 0.0;
  double D0 = 1.0;
  double tol = 1e-10;
  double t_factor = 1e-3;
  double x_min = -10.0;
  double x_max = 5.0;
  double step = 0.01;
  std::size_t n = 2;
  std::size_t j = 1;
  std::size_t K = 2;
  std::size_t grid = 0;  // 0 -> per-problem recommendation
  std::size_t instances = 500;
  std::size_t dim_max = 12;
  std::size_t boundary_samples = 256;
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
  std::vector<double> mu_list{1e4, 1e5, 1e6, 1e7};
  std::string samples_path;  // optional eigenfunction dump for `eigen`
};

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string command_name(Command c) {
  switch (c) {
    case Command::airy_table: return "airy-table";
    case Command::eigen: return "eigen";
    case Command::rescale_sweep: return "rescale-sweep";
    case Command::corollary_sweep: return "corollary-sweep";
    case Command::perturb_battery: return "perturb-battery";
    case Command::theorem: return "theorem";
  }
  return "?";
}

inline std::string config_echo(const RunConfig& c) {
  std::ostringstream os;
  os << "command=" << command_name(c.command);
  switch (c.command) {
    case Command::airy_table:
      os << " x_min=" << fmt(c.x_min) << " x_max=" << fmt(c.x_max) << " step=" << fmt(c.step);
      break;
    case Command::eigen:
      os << " phi0=" << fmt(c.phi0) << " mu=" << fmt(c.mu) << " n=" << c.n << " j=" << c.j
         << " t=" << fmt(c.t) << " K=" << c.K << " tol=" << fmt(c.tol) << " grid=" << c.grid;
      break;
    case Command::rescale_sweep:
    case Command::corollary_sweep: {
      os << " phi0=" << fmt(c.phi0) << " n=" << c.n << " K=" << c.K << " mu_list=";
      for (std::size_t i = 0; i < c.mu_list.size(); ++i)
        os << (i ? "," : "") << fmt(c.mu_list[i]);
      break;
    }
    case Command::perturb_battery:
      os << " instances=" << c.instances << " seed=" << c.seed << " dim_max=" << c.dim_max;
      break;
    case Command::theorem:
      os << " D0=" << fmt(c.D0) << " n=" << c.n << " t_factor=" << fmt(c.t_factor);
      break;
  }
  return os.str();
}

inline void write_csv_header(std::ofstream& out, const RunConfig& cfg,
                             const std::string& columns) {
  char stamp[64] = "unknown";
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  if (gmtime_r(&now, &tm_utc)) std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  out << "# gaplab " << version << "\n";
  out << "# schema: " << command_name(cfg.command) << " v1\n";
  out << "# config: " << config_echo(cfg) << "\n";
  out << "# timestamp: " << stamp << "\n";
  out << columns << "\n";
}

inline std::ofstream open_output(const RunConfig& cfg) {
  std::string path = cfg.output_path;
  if (path.empty()) throw range_error("run: output path must be set");
  if (path.front() != '/') {
    if (const char* dir = std::getenv("GAPLAB_OUT_DIR"); dir && *dir)
      path = std::string(dir) + "/" + path;
  }
  std::ofstream out(path);
  if (!out) throw range_error("run: cannot open output file " + path);
  return out;
}

// index-stamped parallel map; results land in submission order
template <class F>
void parallel_for(std::size_t count, std::size_t jobs, F&& body) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const std::size_t width = std::min(jobs, count);
  pool.reserve(width);
  for (std::size_t w = 0; w < width; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
    });
  for (auto& th : pool) th.join();
}

// ---- per-command runners ----------------------------------------------------

inline void run_airy_table(const RunConfig& cfg) {
  if (!(cfg.step > 0.0)) throw range_error("airy-table: step must be positive");
  if (!(cfg.x_min < cfg.x_max)) throw range_error("airy-table: need x_min < x_max");
  if (std::abs(cfg.x_min) > airy_x_limit || std::abs(cfg.x_max) > airy_x_limit)
    throw range_error("airy-table: range must lie within |x| <= 200");
  auto out = open_output(cfg);
  write_csv_header(out, cfg, "x,ai,ai_prime,bi,bi_prime,wronskian");
  for (double x = cfg.x_min; x <= cfg.x_max + 1e-12 * std::abs(cfg.step); x += cfg.step) {
    const AiryValue v = eval_airy(x);
    out << fmt(v.x) << ',' << fmt(v.ai) << ',' << fmt(v.ai_prime) << ',' << fmt(v.bi) << ','
        << fmt(v.bi_prime) << ',' << fmt(v.ai * v.bi_prime - v.ai_prime * v.bi) << "\n";
  }
}

inline void run_eigen(const RunConfig& cfg) {
  const ReducedProblem rp{cfg.n, cfg.phi0, cfg.mu, cfg.t, cfg.j};
  validate(rp);
  if (!(cfg.tol >= 1e-13 && cfg.tol <= 1e-4))
    throw range_error("eigen: tol must lie in [1e-13, 1e-4]");
  if (cfg.K < 1) throw range_error("eigen: K must be >= 1");
  const auto eig = solve_reduced(rp, cfg.K, cfg.tol, cfg.grid);
  auto out = open_output(cfg);
  write_csv_header(out, cfg, "k,lambda,norm_check");
  for (const auto& ep : eig)
    out << ep.k << ',' << fmt(ep.lambda) << ',' << fmt(ep.norm_check) << "\n";
  if (!cfg.samples_path.empty()) {
    RunConfig scfg = cfg;
    scfg.output_path = cfg.samples_path;
    auto sout = open_output(scfg);
    write_csv_header(sout, cfg, "k,phi,h,dh");
    for (const auto& ep : eig)
      for (std::size_t i = 0; i < ep.samples.size(); ++i)
        sout << ep.k << ',' << fmt(ep.samples.x[i]) << ',' << fmt(ep.samples.v[i]) << ','
             << fmt(ep.derivative_samples.v[i]) << "\n";
  }
}

inline void run_rescale_sweep(const RunConfig& cfg) {
  if (cfg.mu_list.empty()) throw range_error("rescale-sweep: mu list must not be empty");
  if (cfg.K < 1) throw range_error("rescale-sweep: K must be >= 1");
  for (const double mu : cfg.mu_list) validate(ReducedProblem{cfg.n, cfg.phi0, mu, 0.0, 1});
  const AiryZeros zeros = airy_zeros(cfg.K);

  struct Row {
    double mu, delta;
    std::size_t k;
    double alpha_tilde, eig_dev, int_dev;
  };
  std::vector<std::vector<Row>> rows(cfg.mu_list.size());
  parallel_for(cfg.mu_list.size(), cfg.jobs, [&](std::size_t mi) {
    const ReducedProblem rp{cfg.n, cfg.phi0, cfg.mu_list[mi], 0.0, 1};
    const auto eig = solve_reduced(rp, cfg.K, 1e-12, cfg.grid);
    const RescaledFrame fr = rescale(rp, eig);
    for (std::size_t k = 1; k <= cfg.K; ++k) {
      const Samples& u = fr.u_tilde[k - 1];
      const double a_k = zeros.a[k - 1];
      const double nc = std::abs(eval_airy(-a_k).ai_prime);
      std::vector<double> integrand(u.size());
      for (std::size_t i = 0; i < u.size(); ++i) {
        const double vk = eval_airy(u.x[i] - a_k).ai / nc;
        integrand[i] = u.x[i] * std::abs(u.v[i] * u.v[i] - vk * vk);
      }
      rows[mi].push_back({rp.mu, fr.delta, k, fr.alpha_tilde[k - 1],
                          std::abs(fr.alpha_tilde[k - 1] - a_k),
                          simpson(integrand, u.uniform_step())});
    }
  });

  auto out = open_output(cfg);
  write_csv_header(out, cfg, "kind,mu,delta,k,alpha_tilde,eig_deviation,int_deviation,slope");
  for (const auto& group : rows)
    for (const Row& r : group)
      out << "sample," << fmt(r.mu) << ',' << fmt(r.delta) << ',' << r.k << ','
          << fmt(r.alpha_tilde) << ',' << fmt(r.eig_dev) << ',' << fmt(r.int_dev) << ",\n";
  if (cfg.mu_list.size() >= 3) {
    for (std::size_t k = 1; k <= cfg.K; ++k) {
      std::vector<double> deltas, devs, idevs;
      for (const auto& group : rows)
        for (const Row& r : group)
          if (r.k == k) {
            deltas.push_back(r.delta);
            devs.push_back(std::max(r.eig_dev, 1e-300));
            idevs.push_back(std::max(r.int_dev, 1e-300));
          }
      out << "slope_eig,,," << k << ",,,," << fmt(fit_rate(deltas, devs).slope) << "\n";
      out << "slope_int,,," << k << ",,,," << fmt(fit_rate(deltas, idevs).slope) << "\n";
    }
  }
}

inline void run_corollary_sweep(const RunConfig& cfg) {
  if (cfg.mu_list.empty()) throw range_error("corollary-sweep: mu list must not be empty");
  for (const double mu : cfg.mu_list) validate(ReducedProblem{cfg.n, cfg.phi0, mu, 0.0, 1});
  std::vector<CorollaryResult> results(cfg.mu_list.size());
  parallel_for(cfg.mu_list.size(), cfg.jobs, [&](std::size_t mi) {
    results[mi] =
        check_corollary_integral(ReducedProblem{cfg.n, cfg.phi0, cfg.mu_list[mi], 0.0, 1});
  });
  auto out = open_output(cfg);
  write_csv_header(out, cfg, "kind,mu,delta,integral_I,scaled_integral,target,deviation,slope");
  for (std::size_t mi = 0; mi < results.size(); ++mi) {
    const CorollaryResult& r = results[mi];
    out << "sample," << fmt(cfg.mu_list[mi]) << ',' << fmt(r.delta) << ',' << fmt(r.integral_I)
        << ',' << fmt(r.scaled_integral) << ',' << fmt(r.target) << ',' << fmt(r.deviation)
        << ",\n";
  }
  if (results.size() >= 3) {
    std::vector<double> deltas, devs;
    for (const CorollaryResult& r : results) {
      deltas.push_back(r.delta);
      devs.push_back(std::max(std::abs(r.deviation), 1e-300));
    }
    out << "slope,,,,,,," << fmt(fit_rate(deltas, devs).slope) << "\n";
  }
}

inline void run_perturb_battery(const RunConfig& cfg) {
  if (cfg.instances < 1) throw range_error("perturb-battery: instances must be >= 1");
  if (cfg.dim_max < 3 || cfg.dim_max > 16)
    throw range_error("perturb-battery: dim_max must lie in [3, 16]");
  std::vector<BatteryRow> rows(cfg.instances);
  parallel_for(cfg.instances, cfg.jobs, [&](std::size_t i) {
    rows[i] = run_perturbation_instance(cfg.seed, i, cfg.dim_max);
  });
  auto out = open_output(cfg);
  write_csv_header(out, cfg,
                   "kind,instance,dim,k,c0,gamma_k,eps_k,eps_tilde_k,upper_ok,lower_ok,"
                   "evec_ok,margin");
  std::size_t passes = 0;
  for (const BatteryRow& row : rows) {
    const PerturbationReport& r = row.report;
    const bool pass =
        r.upper_bound_ok && r.lower_bound_ok && (r.gamma_k <= 1e-6 || r.eigenvector_bound_ok);
    passes += pass;
    out << "sample," << row.instance << ',' << row.dim << ',' << r.k << ',' << fmt(row.c0) << ','
        << fmt(r.gamma_k) << ',' << fmt(r.eps_k) << ',' << fmt(r.eps_tilde_k) << ','
        << r.upper_bound_ok << ',' << r.lower_bound_ok << ',' << r.eigenvector_bound_ok << ','
        << fmt(r.margin) << "\n";
  }
  out << "summary,,,,,,,,,,," << fmt(static_cast<double>(passes) / cfg.instances) << "\n";
}

inline void run_theorem_cmd(const RunConfig& cfg) {
  if (!(cfg.D0 > 0.0)) throw range_error("theorem: D0 must be positive");
  if (cfg.n < 2) throw range_error("theorem: n must be >= 2");
  if (!(cfg.t_factor > 0.0)) throw range_error("theorem: t_factor must be positive");
  RunTheoremConfig tc;
  tc.t_factor = cfg.t_factor;
  tc.boundary_samples = cfg.boundary_samples;
  if (!cfg.mu_list.empty()) tc.mu_ladder = cfg.mu_list;

  const auto t0 = std::chrono::steady_clock::now();
  const TheoremReport rep = run_theorem(cfg.D0, cfg.n, tc);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  nlohmann::json out_json;
  out_json["gaplab_version"] = version;
  out_json["schema"] = "theorem v1";
  out_json["config"] = {{"D0", cfg.D0},
                        {"n", cfg.n},
                        {"t_factor", cfg.t_factor},
                        {"mu_ladder", tc.mu_ladder},
                        {"boundary_samples", tc.boundary_samples},
                        {"solver_tol", tc.solver_tol},
                        {"diameter_tol", tc.diameter_tol}};
  out_json["success"] = rep.success;
  out_json["mu"] = rep.mu;
  out_json["phi0"] = rep.phi0;
  out_json["diameter"] = rep.diameter;
  out_json["gap"] = {{"gamma0", rep.gap.gamma0},
                     {"gamma_t", rep.gap.gamma_t},
                     {"t", rep.gap.t},
                     {"integral_I", rep.gap.integral_I},
                     {"hf_residual", rep.gap.hf_residual},
                     {"mode_ordering_ok", rep.gap.mode_ordering_ok},
                     {"verdict", rep.gap.verdict}};
  out_json["corollary"] = {{"integral_I", rep.corollary.integral_I},
                           {"scaled_integral", rep.corollary.scaled_integral},
                           {"target", rep.corollary.target},
                           {"deviation", rep.corollary.deviation},
                           {"delta", rep.corollary.delta}};
  out_json["hf_slope"] = rep.hf_slope;
  out_json["rung_log"] = rep.rung_log;
  out_json["timings"] = {{"total_seconds", elapsed}};

  auto out = open_output(cfg);
  out << out_json.dump(2) << "\n";
}

}  // namespace detail

// Validates the configuration against the target module's preconditions, runs
// the command, writes the output file(s). Throws range_error/shape_error on
// invalid parameters and search/stiffness errors on computation failures.
inline void run(const RunConfig& cfg) {
  const OutputFormat natural =
      (cfg.command == Command::theorem) ? OutputFormat::json : OutputFormat::csv;
  if (cfg.format != natural)
    throw range_error("run: " + detail::command_name(cfg.command) + " emits " +
                      (natural == OutputFormat::json ? std::string("json") : std::string("csv")));
  switch (cfg.command) {
    case Command::airy_table: detail::run_airy_table(cfg); return;
    case Command::eigen: detail::run_eigen(cfg); return;
    case Command::rescale_sweep: detail::run_rescale_sweep(cfg); return;
    case Command::corollary_sweep: detail::run_corollary_sweep(cfg); return;
    case Command::perturb_battery: detail::run_perturb_battery(cfg); return;
    case Command::theorem: detail::run_theorem_cmd(cfg); return;
  }
  throw range_error("run: unknown command");
}

}  // namespace gaplab

#endif  // GAPLAB_CLI_HPP
