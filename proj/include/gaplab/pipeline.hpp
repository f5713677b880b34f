#ifndef GAPLAB_PIPELINE_HPP
#define GAPLAB_PIPELINE_HPP

// End-to-end gap pipeline at fixed parameters: upper-half-plane geometry of
// the domain family, diameter matching, mode ordering, the gap with and
// without the distance potential, and the Hellmann-Feynman cross-check.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "gaplab/asymptotics.hpp"
#include "gaplab/common.hpp"
#include "gaplab/gap_model.hpp"

namespace gaplab {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

// Upper half-plane distance, via cosh d = 1 + |p-q|^2 / (2 y_p y_q) in the
// cancellation-free form d = 2 asinh(|p-q| / (2 sqrt(y_p y_q))).
inline double hyperbolic_distance(Point2 p, Point2 q) {
  if (!(p.y > 0.0) || !(q.y > 0.0))
    throw domain_error("hyperbolic_distance: points must have y > 0");
  const double dx = p.x - q.x, dy = p.y - q.y;
  return 2.0 * std::asinh(0.5 * std::sqrt((dx * dx + dy * dy) / (p.y * q.y)));
}

// phi_D: the angle whose hypercycle ray {phi = const} lies at distance D from
// the geodesic {phi = 0}; inverse of the arc length P.
inline double phi_of_length(double D) {
  if (!(D > 0.0)) throw range_error("phi_of_length: D must be positive");
  return std::asin(std::tanh(D));
}

struct DomainSpec {
  double phi0 = 0.0;
  double mu = 0.0;
  std::size_t n = 2;
  std::array<Point2, 4> corner_points;  // (r, phi) extremes in half-plane coordinates
};

inline DomainSpec make_domain_spec(double phi0, double mu, std::size_t n = 2) {
  if (!(phi0 > 0.0 && phi0 < M_PI / 2.0)) throw range_error("make_domain_spec: bad phi0");
  if (!(mu > 0.0)) throw range_error("make_domain_spec: mu must be positive");
  DomainSpec ds;
  ds.phi0 = phi0;
  ds.mu = mu;
  ds.n = n;
  const double R = std::exp(M_PI / std::sqrt(mu));
  int idx = 0;
  for (const double r : {1.0, R})
    for (const double phi : {0.0, phi0})
      ds.corner_points[idx++] = {r * std::sin(phi), r * std::cos(phi)};
  return ds;
}

// Max pairwise hyperbolic distance over the four corners plus samples of the
// four boundary arcs. Convexity puts the diameter on extreme points, so the
// corner pairs dominate; the samples guard the claim.
inline double diameter(const DomainSpec& spec, std::size_t boundary_samples = 256) {
  if (spec.n != 2) throw contract_error("diameter: defined for the n = 2 domain family");
  if (boundary_samples < 64) throw range_error("diameter: boundary_samples must be >= 64");
  const double R = std::exp(M_PI / std::sqrt(spec.mu));
  std::vector<Point2> pts(spec.corner_points.begin(), spec.corner_points.end());
  pts.reserve(4 * boundary_samples + 4);
  for (std::size_t i = 1; i < boundary_samples; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(boundary_samples);
    const double phi = f * spec.phi0;
    const double r = 1.0 + f * (R - 1.0);
    pts.push_back({std::sin(phi), std::cos(phi)});                  // r = 1 arc
    pts.push_back({R * std::sin(phi), R * std::cos(phi)});          // r = R arc
    pts.push_back({0.0, r});                                        // phi = 0 ray
    pts.push_back({r * std::sin(spec.phi0), r * std::cos(spec.phi0)});  // phi = phi0 ray
  }
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      best = std::max(best, hyperbolic_distance(pts[i], pts[j]));
  return best;
}

// Bisection on phi of the continuous, increasing map phi -> diam(Omega_{phi,mu}).
inline double find_phi0_for_diameter(double D0, double mu, double tol,
                                     std::size_t boundary_samples = 256) {
  if (!(D0 > 0.0)) throw range_error("find_phi0_for_diameter: D0 must be positive");
  double lo = phi_of_length(0.5 * D0);
  double hi = phi_of_length(1.5 * D0);
  double d_lo = diameter(make_domain_spec(lo, mu), boundary_samples);
  double d_hi = diameter(make_domain_spec(hi, mu), boundary_samples);
  if (!(d_lo < D0 && D0 < d_hi))
    throw search_error("find_phi0_for_diameter: bracket invalid, diam(phi-) = " +
                       std::to_string(d_lo) + ", diam(phi+) = " + std::to_string(d_hi) +
                       " around D0 = " + std::to_string(D0) + " (mu too small?)");
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double d = diameter(make_domain_spec(mid, mu), boundary_samples);
    if (std::abs(d - D0) <= tol) return mid;
    if (d < D0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// lambda_K^{(mu)} < lambda_1^{(4 mu)}: the hypothesis that the lowest K
// eigenvalues of the domain all come from the first radial mode.
inline bool check_mode_ordering(double phi0, double mu, std::size_t n, std::size_t K,
                                double t = 0.0, double tol = 1e-12) {
  if (K < 2) throw range_error("check_mode_ordering: K must be >= 2");
  const ReducedProblem base{n, phi0, mu, t, 1};
  const ReducedProblem quad{n, phi0, 4.0 * mu, t, 1};
  const double lam_K = solve_reduced(base, K, tol).back().lambda;
  const double lam_1_4mu = solve_reduced(quad, 1, tol)[0].lambda;
  return lam_K < lam_1_4mu;
}

struct GapReport {
  double gamma0 = 0.0;       // lambda_2 - lambda_1 at t = 0
  double gamma_t = 0.0;      // the same at potential strength t
  double t = 0.0;
  double integral_I = 0.0;   // gap derivative at t = 0
  double hf_residual = 0.0;  // |(gamma_t - gamma0)/t - I|
  bool mode_ordering_ok = false;
  bool verdict = false;      // gamma_t < gamma0
};

inline GapReport gap_with_potential(double phi0, double mu, std::size_t n, double t,
                                    double tol = 1e-12) {
  if (!(t >= 0.0)) throw range_error("gap_with_potential: t must be >= 0");
  const ReducedProblem base{n, phi0, mu, 0.0, 1};
  const auto e0 = solve_reduced(base, 2, tol);

  GapReport rep;
  rep.t = t;
  rep.gamma0 = e0[1].lambda - e0[0].lambda;
  rep.integral_I = gap_derivative_integral(base, e0[0], e0[1]);
  rep.mode_ordering_ok = check_mode_ordering(phi0, mu, n, 2, 0.0, tol);

  if (t == 0.0) {
    rep.gamma_t = rep.gamma0;
    rep.hf_residual = 0.0;
    rep.verdict = false;
    return rep;
  }

  const ReducedProblem pert{n, phi0, mu, t, 1};
  const auto et = solve_reduced(pert, 2, tol);
  rep.gamma_t = et[1].lambda - et[0].lambda;
  rep.hf_residual = std::abs((rep.gamma_t - rep.gamma0) / t - rep.integral_I);
  rep.mode_ordering_ok = rep.mode_ordering_ok && check_mode_ordering(phi0, mu, n, 2, t, tol);
  rep.verdict = rep.gamma_t < rep.gamma0;
  return rep;
}

// Higher-gap variant: does lambda_K - lambda_{K-1} also decrease at t > 0,
// given the ordering lambda_K^{(mu)} < lambda_1^{(4mu)}?
struct HigherGapReport {
  std::size_t K = 0;
  bool ordering_ok = false;
  double gap0 = 0.0;
  double gap_t = 0.0;
  bool decreases = false;
};

inline HigherGapReport check_higher_gap(double phi0, double mu, std::size_t n, std::size_t K,
                                        double t, double tol = 1e-12) {
  HigherGapReport rep;
  rep.K = K;
  rep.ordering_ok = check_mode_ordering(phi0, mu, n, K, 0.0, tol);
  const ReducedProblem base{n, phi0, mu, 0.0, 1};
  const ReducedProblem pert{n, phi0, mu, t, 1};
  const auto e0 = solve_reduced(base, K, tol);
  const auto et = solve_reduced(pert, K, tol);
  rep.gap0 = e0[K - 1].lambda - e0[K - 2].lambda;
  rep.gap_t = et[K - 1].lambda - et[K - 2].lambda;
  rep.decreases = rep.gap_t < rep.gap0;
  return rep;
}

struct RunTheoremConfig {
  std::vector<double> mu_ladder{1e4, 1e5, 1e6, 1e7};
  double t_factor = 1e-3;        // t = t_factor * gamma0
  double diameter_tol = 1e-8;
  std::size_t boundary_samples = 256;
  double solver_tol = 1e-13;     // hf differences need the tightest eigenvalues
  bool hf_refinement = true;     // 3-point slope check over {4,2,1} t_factor
};

struct TheoremReport {
  bool success = false;
  double D0 = 0.0;
  std::size_t n = 2;
  double mu = 0.0;
  double phi0 = 0.0;
  double diameter = 0.0;   // n = 2 only; equals D0 within tolerance on success
  GapReport gap;
  CorollaryResult corollary;
  double hf_slope = 0.0;   // log-log slope of hf_residual vs t, ~1
  std::vector<std::string> rung_log;
};

// The full recipe at one rung: pick the domain opening by diameter matching
// (n = 2) or by the potential range (n >= 3, reduced chain only), then demand
// mode ordering, I < 0, and a strictly smaller gap at t = t_factor * gamma0.
inline TheoremReport run_theorem(double D0, std::size_t n,
                                 const RunTheoremConfig& cfg = {}) {
  if (!(D0 > 0.0)) throw range_error("run_theorem: D0 must be positive");
  if (n < 2) throw range_error("run_theorem: n must be >= 2");
  TheoremReport rep;
  rep.D0 = D0;
  rep.n = n;

  for (const double mu : cfg.mu_ladder) {
    std::string log = "mu = " + std::to_string(mu) + ": ";
    double phi0 = 0.0;
    try {
      phi0 = (n == 2) ? find_phi0_for_diameter(D0, mu, cfg.diameter_tol, cfg.boundary_samples)
                      : phi_of_length(D0);
    } catch (const search_error& e) {
      rep.rung_log.push_back(log + std::string("diameter matching failed: ") + e.what());
      continue;
    }
    const ReducedProblem base{n, phi0, mu, 0.0, 1};

    const CorollaryResult cor = check_corollary_integral(base, 1e-12);
    if (!(cor.integral_I < 0.0)) {
      rep.rung_log.push_back(log + "integral I >= 0, next rung");
      continue;
    }
    if (!check_mode_ordering(phi0, mu, n, 2, 0.0, 1e-12)) {
      rep.rung_log.push_back(log + "mode ordering failed, next rung");
      continue;
    }

    const auto e0 = solve_reduced(base, 2, cfg.solver_tol);
    const double gamma0 = e0[1].lambda - e0[0].lambda;
    const double t = cfg.t_factor * gamma0;
    GapReport gap = gap_with_potential(phi0, mu, n, t, cfg.solver_tol);

    double hf_slope = 0.0;
    if (cfg.hf_refinement) {
      std::vector<double> ts, residuals;
      for (const double f : {4.0, 2.0, 1.0}) {
        const GapReport g = gap_with_potential(phi0, mu, n, f * t, cfg.solver_tol);
        ts.push_back(f * t);
        residuals.push_back(std::max(g.hf_residual, 1e-300));
      }
      hf_slope = fit_rate(ts, residuals).slope;
    }

    if (gap.verdict && gap.mode_ordering_ok) {
      rep.success = true;
      rep.mu = mu;
      rep.phi0 = phi0;
      rep.gap = gap;
      rep.corollary = cor;
      rep.hf_slope = hf_slope;
      if (n == 2) rep.diameter = diameter(make_domain_spec(phi0, mu), cfg.boundary_samples);
      rep.rung_log.push_back(log + "all checks passed");
      return rep;
    }
    rep.rung_log.push_back(log + "gap verdict failed, next rung");
  }
  rep.rung_log.push_back("ladder exhausted without a passing rung");
  return rep;
}

}  // namespace gaplab

#endif  // GAPLAB_PIPELINE_HPP
