#ifndef GAPLAB_GAP_MODEL_HPP
#define GAPLAB_GAP_MODEL_HPP

// Concrete model objects: the reduced ODE eigenproblems on (0, phi0) for
// dimension n >= 2 with optional potential term t*P, the hyperbolic distance
// potential P(phi) = artanh(sin phi), and the rescaling to the Airy frame
//   phi = phi0 - delta^{1/3} x,   delta = mu^{-1} / (2 tan phi0),
// under which the reduced operator is an O(delta^{1/3}) perturbation of
// -d^2/dx^2 + x.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "gaplab/airy.hpp"
#include "gaplab/common.hpp"
#include "gaplab/sturm.hpp"

namespace gaplab {

struct ReducedProblem {
  std::size_t n = 2;   // ambient dimension
  double phi0 = 0.0;   // opening angle, in (0, pi/2)
  double mu = 0.0;     // separation constant (j = 1 normalization)
  double t = 0.0;      // potential strength, >= 0
  std::size_t j = 1;   // radial mode index; enters only through j^2 mu
};

inline void validate(const ReducedProblem& rp) {
  if (rp.n < 2) throw range_error("ReducedProblem: n must be >= 2");
  if (!(rp.phi0 > 0.0 && rp.phi0 < M_PI / 2.0))
    throw range_error("ReducedProblem: phi0 must lie strictly inside (0, pi/2)");
  if (!(rp.mu > 0.0)) throw range_error("ReducedProblem: mu must be positive");
  if (!(rp.t >= 0.0)) throw range_error("ReducedProblem: t must be >= 0");
  if (rp.j < 1) throw range_error("ReducedProblem: j must be >= 1");
}

inline double effective_mu(const ReducedProblem& rp) {
  return static_cast<double>(rp.j * rp.j) * rp.mu;
}

// ---- distance potential -----------------------------------------------------
// P(phi) is the hyperbolic distance from a point at angle phi to the geodesic
// {phi = 0}; in closed form P = artanh(sin phi) (the arc length of the unit
// circle between angles 0 and phi), with P' = sec phi.

inline double eval_potential(double phi) {
  if (!(phi >= 0.0 && phi < M_PI / 2.0))
    throw range_error("eval_potential: phi must lie in [0, pi/2)");
  return std::atanh(std::sin(phi));
}

inline double eval_potential_derivative(double phi) {
  if (!(phi >= 0.0 && phi < M_PI / 2.0))
    throw range_error("eval_potential_derivative: phi must lie in [0, pi/2)");
  return 1.0 / std::cos(phi);
}

// ---- reduced problem in self-adjoint form -----------------------------------
//   -(cos^{2-n} h')' + [mu_eff cos^{2-n} + t P cos^{-n}] h = lambda cos^{-n} h
// on (0, phi0); for n = 2 this is h'' = (mu_eff - (lambda - tP) cos^{-2}) h.

inline SLProblem reduced_problem_as_sl(const ReducedProblem& rp) {
  validate(rp);
  const double mu_eff = effective_mu(rp);
  const double npow = static_cast<double>(rp.n);
  const double t = rp.t;
  SLProblem pr;
  pr.x_lo = 0.0;
  pr.x_hi = rp.phi0;
  pr.p = [npow](double phi) { return std::pow(std::cos(phi), 2.0 - npow); };
  pr.w = [npow](double phi) { return std::pow(std::cos(phi), -npow); };
  pr.q0 = [npow, mu_eff, t](double phi) {
    const double c = std::cos(phi);
    double q = mu_eff * std::pow(c, 2.0 - npow);
    if (t > 0.0) q += t * std::atanh(std::sin(phi)) * std::pow(c, -npow);
    return q;
  };
  pr.normalization_weight = pr.w;
  return pr;
}

inline double reduced_delta(const ReducedProblem& rp) {
  return 1.0 / (effective_mu(rp) * 2.0 * std::tan(rp.phi0));
}

// Grid resolution that keeps composite-Simpson errors of the boundary-layer
// integrands well below 1e-8; the layer width is delta^{1/3}.
inline std::size_t recommended_grid_intervals(const ReducedProblem& rp) {
  const double d13 = std::cbrt(reduced_delta(rp));
  const double want = 48.0 * rp.phi0 / d13;
  std::size_t g = 4096;
  while (g < want && g < 32768) g *= 2;
  return g;
}

// Eigenvalue location from the expansion lambda_k ~ mu cos^2(phi0)
// (1 + 2 tan(phi0) a_k delta^{1/3}); used as the bracket hint.
inline double eigenvalue_hint(const ReducedProblem& rp, std::size_t k) {
  const double mu_eff = effective_mu(rp);
  const double c2 = std::cos(rp.phi0) * std::cos(rp.phi0);
  const double a_k = airy_zeros(k).a.back();
  double hint = mu_eff * c2 * (1.0 + 2.0 * std::tan(rp.phi0) * a_k * std::cbrt(reduced_delta(rp)));
  if (rp.t > 0.0) hint += rp.t * eval_potential(rp.phi0);
  return hint;
}

// Solve the first K eigenpairs of the reduced problem with hints and grid
// sizing tuned to the boundary layer.
inline std::vector<Eigenpair> solve_reduced(const ReducedProblem& rp, std::size_t K, double tol,
                                            std::size_t grid_intervals = 0) {
  const SLProblem pr = reduced_problem_as_sl(rp);
  ShootingOptions opt;
  opt.grid_intervals = grid_intervals ? grid_intervals : recommended_grid_intervals(rp);
  std::vector<Eigenpair> out;
  out.reserve(K);
  for (std::size_t k = 1; k <= K; ++k) {
    opt.lambda_hint = eigenvalue_hint(rp, k);
    opt.lambda_halfwidth =
        std::max(1.0, 0.5 * std::abs(opt.lambda_hint - effective_mu(rp) *
                                                           std::cos(rp.phi0) * std::cos(rp.phi0)));
    out.push_back(solve_eigenpair(pr, k, tol, opt));
  }
  return out;
}

// ---- rescaled frame ----------------------------------------------------------

struct RescaledFrame {
  double delta = 0.0;
  double x_max = 0.0;  // phi0 * delta^{-1/3}, before truncation
  std::vector<double> n_k;
  std::vector<double> alpha_tilde;
  std::vector<Samples> u_tilde;  // shared uniform grid on [0, min(x_max, 60)]
  std::size_t n = 2;
  double phi0 = 0.0;
  double mu = 0.0;  // effective mu
};

inline constexpr double rescale_x_truncation = 60.0;

namespace detail {

inline double cospow(double phi, double e) { return std::pow(std::cos(phi), e); }

}  // namespace detail

// Rescale solved eigenpairs of the unperturbed problem into the Airy frame.
// The eigenfunction is re-integrated at the converged eigenvalue directly on
// the mapped nodes phi = phi0 - delta^{1/3} x, so no resampling error enters.
inline RescaledFrame rescale(const ReducedProblem& rp, const std::vector<Eigenpair>& eigenpairs,
                             std::size_t grid_intervals = 4096) {
  validate(rp);
  if (rp.t != 0.0) throw contract_error("rescale: defined for the unperturbed problem (t = 0)");
  if (eigenpairs.empty()) throw shape_error("rescale: need at least one eigenpair");

  RescaledFrame fr;
  fr.n = rp.n;
  fr.phi0 = rp.phi0;
  fr.mu = effective_mu(rp);
  fr.delta = reduced_delta(rp);
  const double d13 = std::cbrt(fr.delta);
  fr.x_max = rp.phi0 / d13;
  const double x_cap = std::min(fr.x_max, rescale_x_truncation);

  const SLProblem pr = reduced_problem_as_sl(rp);
  const double c2 = std::cos(rp.phi0) * std::cos(rp.phi0);
  const double nk = std::sqrt(d13 / detail::cospow(rp.phi0, static_cast<double>(rp.n)));

  const std::vector<double> xg = linspace(0.0, x_cap, grid_intervals + 1);
  const double phi_start = rp.phi0 - d13 * x_cap;

  // node set: a coarse uniform left part [0, phi_start] for the
  // normalization integral, then the mapped fine nodes up to phi0
  std::vector<double> nodes;
  std::size_t left_points = 0;
  if (phi_start > 1e-12) {
    const std::size_t L = 2048;
    const auto left = linspace(0.0, phi_start, L + 1);
    nodes.assign(left.begin(), left.end());
    left_points = L + 1;
  }
  for (std::size_t i = grid_intervals + 1; i-- > 0;) {
    const double phi = rp.phi0 - d13 * xg[i];
    if (left_points > 0 && i == grid_intervals) continue;  // phi_start already present
    nodes.push_back(phi);
  }
  // exact endpoints
  nodes.front() = 0.0;
  nodes.back() = rp.phi0;

  OdeOptions ode;
  for (const Eigenpair& ep : eigenpairs) {
    const detail::RawEigenfunction raw = detail::integrate_eigenfunction(pr, ep.lambda, nodes, ode);

    // weighted L^2 normalization over the full interval, in two Simpson pieces
    double norm_sq = 0.0;
    if (left_points > 0) {
      std::vector<double> part(left_points);
      for (std::size_t i = 0; i < left_points; ++i)
        part[i] = raw.y[i] * raw.y[i] * pr.normalization_weight(nodes[i]);
      norm_sq += simpson(part, nodes[1] - nodes[0]);
    }
    {
      const std::size_t off = (left_points > 0) ? left_points - 1 : 0;
      std::vector<double> part(nodes.size() - off);
      for (std::size_t i = 0; i < part.size(); ++i)
        part[i] = raw.y[off + i] * raw.y[off + i] * pr.normalization_weight(nodes[off + i]);
      norm_sq += simpson(part, d13 * (xg[1] - xg[0]));
    }
    const double scale = nk / std::sqrt(norm_sq);

    Samples u;
    u.x = xg;
    u.v.resize(xg.size());
    const std::size_t base = nodes.size() - 1;  // node index of phi0 <-> x = 0
    for (std::size_t i = 0; i < xg.size(); ++i) u.v[i] = scale * raw.y[base - i];
    fr.u_tilde.push_back(std::move(u));

    fr.n_k.push_back(nk);
    fr.alpha_tilde.push_back((ep.lambda / fr.mu - c2) / (2.0 * std::tan(rp.phi0) * d13 * c2));
  }
  return fr;
}

// Weight of the frame's inner product, cos^n(phi0) / cos^n(phi0 - d13 x).
inline double frame_weight(const RescaledFrame& fr, double x) {
  const double npow = static_cast<double>(fr.n);
  const double d13 = std::cbrt(fr.delta);
  return detail::cospow(fr.phi0, npow) / detail::cospow(fr.phi0 - d13 * x, npow);
}

// The rescaled potential coefficient
//   W(x) = delta^{-1/3}/(2 tan phi0) (1 - cos^2 phi0 / cos^2(phi0 - d13 x)),
// evaluated through sin(2 phi0 - theta) sin(theta) to avoid the 1 - (1 - eps)
// cancellation; W(x) -> x as delta -> 0.
inline double frame_potential_coefficient(const RescaledFrame& fr, double x) {
  const double d13 = std::cbrt(fr.delta);
  const double theta = d13 * x;
  const double cphi = std::cos(fr.phi0 - theta);
  return std::sin(2.0 * fr.phi0 - theta) * std::sin(theta) /
         (2.0 * std::tan(fr.phi0) * d13 * cphi * cphi);
}

namespace detail {

// 4th-order first and second derivatives on a uniform grid; 2nd-order 3-point
// stencils at the first and last interior points.
inline void fd_derivatives(const Samples& f, std::vector<double>& d1, std::vector<double>& d2) {
  const std::size_t n = f.size();
  const double h = f.uniform_step();
  d1.assign(n, 0.0);
  d2.assign(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (i >= 2 && i + 2 < n) {
      d1[i] = (f.v[i - 2] - 8.0 * f.v[i - 1] + 8.0 * f.v[i + 1] - f.v[i + 2]) / (12.0 * h);
      d2[i] = (-f.v[i - 2] + 16.0 * f.v[i - 1] - 30.0 * f.v[i] + 16.0 * f.v[i + 1] -
               f.v[i + 2]) /
              (12.0 * h * h);
    } else {
      d1[i] = (f.v[i + 1] - f.v[i - 1]) / (2.0 * h);
      d2[i] = (f.v[i + 1] - 2.0 * f.v[i] + f.v[i - 1]) / (h * h);
    }
  }
}

}  // namespace detail

// Apply the rescaled operator
//   A~ f = -[cos^n(phi_d)/cos^n(phi0)] d/dx( [cos^{n-2}(phi0)/cos^{n-2}(phi_d)] f' )
//          + [cos^2(phi_d)/cos^2(phi0)] W(x) f,      phi_d = phi0 - d13 x,
// by finite differences. For n = 2 the first term reduces to the plain
// -ratio * f''.
inline Samples apply_rescaled_operator(const RescaledFrame& fr, const Samples& f) {
  if (fr.u_tilde.empty()) throw shape_error("apply_rescaled_operator: empty frame");
  const Samples& g = fr.u_tilde.front();
  if (f.size() != g.size()) throw shape_error("apply_rescaled_operator: grid size mismatch");
  for (std::size_t i = 0; i < f.size(); i += std::max<std::size_t>(1, f.size() / 7))
    if (std::abs(f.x[i] - g.x[i]) > 1e-12 * (1.0 + std::abs(g.x[i])))
      throw shape_error("apply_rescaled_operator: grid mismatch");

  const double npow = static_cast<double>(fr.n);
  const double d13 = std::cbrt(fr.delta);
  std::vector<double> d1, d2;
  detail::fd_derivatives(f, d1, d2);

  Samples out;
  out.x = f.x;
  out.v.assign(f.size(), 0.0);
  for (std::size_t i = 1; i + 1 < f.size(); ++i) {
    const double x = f.x[i];
    const double phid = fr.phi0 - d13 * x;
    const double ration = detail::cospow(phid, npow) / detail::cospow(fr.phi0, npow);
    const double ratio2 = detail::cospow(phid, 2.0) / detail::cospow(fr.phi0, 2.0);
    const double c = detail::cospow(fr.phi0, npow - 2.0) / detail::cospow(phid, npow - 2.0);
    const double cprime = (2.0 - npow) * d13 * std::tan(phid) * c;
    out.v[i] = -ration * (c * d2[i] + cprime * d1[i]) +
               ratio2 * frame_potential_coefficient(fr, x) * f.v[i];
  }
  return out;
}

// The model operator A = -d^2/dx^2 + x with the same stencils, for
// like-for-like (A~ - A) differences.
inline Samples apply_airy_operator(const Samples& f) {
  std::vector<double> d1, d2;
  detail::fd_derivatives(f, d1, d2);
  Samples out;
  out.x = f.x;
  out.v.assign(f.size(), 0.0);
  for (std::size_t i = 1; i + 1 < f.size(); ++i) out.v[i] = -d2[i] + f.x[i] * f.v[i];
  return out;
}

}  // namespace gaplab

#endif  // GAPLAB_GAP_MODEL_HPP
