#ifndef GAPLAB_STURM_HPP
#define GAPLAB_STURM_HPP

// Regular Sturm-Liouville Dirichlet eigensolver for
//     -(p y')' + q0 y = lambda w y   on (x_lo, x_hi),  y(x_lo) = y(x_hi) = 0,
// with p, w > 0. Eigenvalues are indexed by Prufer-angle node counting, so
// the k-th eigenvalue is bracketed monotonically even when the spectrum
// clusters; the eigenfunction is integrated as the first-order system
// (y, p y') with on-the-fly rescaling through classically forbidden regions.
// A symmetric finite-difference matrix on the same problem serves as an
// independent oracle.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "gaplab/common.hpp"
#include "gaplab/rk.hpp"

namespace gaplab {

struct SLProblem {
  double x_lo = 0.0;
  double x_hi = 1.0;
  RealFn p;                     // diffusion coefficient, > 0
  RealFn w;                     // spectral weight (coefficient of lambda), > 0
  RealFn q0;                    // lambda-independent potential
  RealFn normalization_weight;  // weight of the L^2 normalization integral, > 0
};

inline void validate(const SLProblem& pr) {
  if (!(pr.x_lo < pr.x_hi)) throw shape_error("SLProblem: need x_lo < x_hi");
  if (!pr.p || !pr.w || !pr.q0 || !pr.normalization_weight)
    throw shape_error("SLProblem: all coefficient functions must be set");
  for (int i = 0; i <= 16; ++i) {
    const double x = pr.x_lo + (pr.x_hi - pr.x_lo) * i / 16.0;
    if (!(pr.p(x) > 0.0) || !std::isfinite(pr.p(x)))
      throw shape_error("SLProblem: p must be positive and finite on the interval");
    if (!(pr.w(x) > 0.0) || !std::isfinite(pr.w(x)))
      throw shape_error("SLProblem: w must be positive and finite on the interval");
    if (!std::isfinite(pr.q0(x))) throw shape_error("SLProblem: q0 must be finite");
    if (!(pr.normalization_weight(x) > 0.0))
      throw shape_error("SLProblem: normalization_weight must be positive");
  }
}

struct Eigenpair {
  std::size_t k = 0;
  double lambda = 0.0;
  Samples samples;             // normalized, sign-fixed y on a uniform grid
  Samples derivative_samples;  // y' on the same grid
  double norm_check = 0.0;     // normalization integral of the returned samples
};

struct ShootingOptions {
  std::size_t grid_intervals = 4096;
  double ode_rtol = 1e-12;
  double ode_atol = 1e-12;
  double lambda_hint = std::numeric_limits<double>::quiet_NaN();
  double lambda_halfwidth = 0.0;  // 0 -> 1 + 0.1|hint|
  double search_expansion_limit = 1e16;
};

namespace detail {

// Prufer angle at x_hi for the shooting problem; strictly increasing in
// lambda, passes k*pi exactly at the k-th Dirichlet eigenvalue.
inline double prufer_theta_end(const SLProblem& pr, double lambda, const OdeOptions& ode) {
  auto rhs = [&](double x, const std::array<double, 1>& th) -> std::array<double, 1> {
    const double c = std::cos(th[0]);
    const double s = std::sin(th[0]);
    return {c * c / pr.p(x) + (lambda * pr.w(x) - pr.q0(x)) * s * s};
  };
  return ode_integrate<1>(rhs, pr.x_lo, pr.x_hi, {0.0}, ode)[0];
}

struct Bracket {
  double lo, hi, g_lo, g_hi;
};

inline Bracket bracket_eigenvalue(const SLProblem& pr, std::size_t k, const ShootingOptions& opt,
                                  const OdeOptions& ode) {
  const double target = static_cast<double>(k) * M_PI;
  const double hint = std::isnan(opt.lambda_hint) ? 0.0 : opt.lambda_hint;
  double width = opt.lambda_halfwidth > 0.0 ? opt.lambda_halfwidth : 1.0 + 0.1 * std::abs(hint);

  double lo = hint - width, hi = hint + width;
  double g_lo = prufer_theta_end(pr, lo, ode) - target;
  double g_hi = prufer_theta_end(pr, hi, ode) - target;
  while (!(g_lo < 0.0 && g_hi >= 0.0)) {
    width *= 2.0;
    if (width > opt.search_expansion_limit * (1.0 + std::abs(hint)))
      throw search_error(
          "solve_eigenpair: no bracket for k = " + std::to_string(k) + " in [" +
          std::to_string(lo) + ", " + std::to_string(hi) + "]; node counts at ends: " +
          std::to_string((g_lo + target) / M_PI) + ", " + std::to_string((g_hi + target) / M_PI));
    if (g_lo >= 0.0) {
      hi = lo;
      g_hi = g_lo;
      lo = hint - width;
      g_lo = prufer_theta_end(pr, lo, ode) - target;
    } else {  // g_hi < 0
      lo = hi;
      g_lo = g_hi;
      hi = hint + width;
      g_hi = prufer_theta_end(pr, hi, ode) - target;
    }
  }
  return {lo, hi, g_lo, g_hi};
}

// Illinois refinement of the bracketed root of g(lambda) = theta_end - k pi.
inline double refine_eigenvalue(const SLProblem& pr, std::size_t k, Bracket br, double tol,
                                const OdeOptions& ode) {
  const double target = static_cast<double>(k) * M_PI;
  int side = 0;
  for (int iter = 0; iter < 300; ++iter) {
    if (br.hi - br.lo <= tol * (1.0 + 0.5 * (std::abs(br.lo) + std::abs(br.hi)))) break;
    double c = (br.lo * br.g_hi - br.hi * br.g_lo) / (br.g_hi - br.g_lo);
    if (!(c > br.lo && c < br.hi)) c = 0.5 * (br.lo + br.hi);
    const double gc = prufer_theta_end(pr, c, ode) - target;
    if (gc > 0.0) {
      br.hi = c;
      br.g_hi = gc;
      if (side == 1) br.g_lo *= 0.5;
      side = 1;
    } else if (gc < 0.0) {
      br.lo = c;
      br.g_lo = gc;
      if (side == -1) br.g_hi *= 0.5;
      side = -1;
    } else {
      return c;
    }
  }
  return 0.5 * (br.lo + br.hi);
}

struct RawEigenfunction {
  std::vector<double> y;   // scaled so max |y| = O(1)
  std::vector<double> py;  // p * y' under the same scaling
};

// One directed shooting pass over nodes[0..m] (in list order), rescaling by
// powers of two whenever the state grows out of range; per-node exponents are
// returned alongside the mantissas.
struct ShootPass {
  std::vector<double> y, py;
  std::vector<long> e2;
};

template <class Rhs>
inline ShootPass shoot_over_nodes(Rhs&& rhs, const std::vector<double>& nodes, double slope_scale,
                                  const OdeOptions& ode) {
  const std::size_t n = nodes.size();
  ShootPass pass;
  pass.y.resize(n);
  pass.py.resize(n);
  pass.e2.resize(n);
  long cur = 0;
  auto visit = [&](std::size_t i, std::array<double, 2>& s) {
    pass.y[i] = s[0];
    pass.py[i] = s[1];
    pass.e2[i] = cur;
    const double m = std::max(std::abs(s[0]), std::abs(s[1]));
    if (m > 0x1p600) {
      s[0] = std::ldexp(s[0], -600);
      s[1] = std::ldexp(s[1], -600);
      cur += 600;
    } else if (m > 0.0 && m < 0x1p-600) {
      s[0] = std::ldexp(s[0], 600);
      s[1] = std::ldexp(s[1], 600);
      cur -= 600;
    }
  };
  ode_integrate_nodes<2>(rhs, nodes, {0.0, slope_scale}, visit, ode);
  return pass;
}

// Integrate (y, p y') at fixed lambda over the given increasing node set.
// Shooting runs from each Dirichlet endpoint toward the deepest classically
// allowed node and the two passes are matched there, so every forbidden
// barrier is traversed in its growing (stable) direction and the returned
// tails are genuine, not contamination.
inline RawEigenfunction integrate_eigenfunction(const SLProblem& pr, double lambda,
                                                const std::vector<double>& nodes,
                                                const OdeOptions& ode) {
  auto rhs = [&](double x, const std::array<double, 2>& s) -> std::array<double, 2> {
    return {s[1] / pr.p(x), (pr.q0(x) - lambda * pr.w(x)) * s[0]};
  };
  const std::size_t n = nodes.size();

  std::size_t m = 0;
  double depth = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double d = pr.q0(nodes[i]) - lambda * pr.w(nodes[i]);
    if (d < depth) {
      depth = d;
      m = i;
    }
  }

  std::vector<double> y(n), py(n);
  std::vector<long> e2(n);

  if (m > 0) {
    const std::vector<double> left(nodes.begin(), nodes.begin() + m + 1);
    const ShootPass lp = shoot_over_nodes(rhs, left, pr.p(nodes.front()), ode);
    for (std::size_t i = 0; i <= m; ++i) {
      y[i] = lp.y[i];
      py[i] = lp.py[i];
      e2[i] = lp.e2[i];
    }
  }
  if (m + 1 < n || m == 0) {
    const std::vector<double> right(nodes.rbegin(), nodes.rend() - (m > 0 ? m : 0));
    const ShootPass rp = shoot_over_nodes(rhs, right, -pr.p(nodes.back()), ode);
    if (m == 0) {
      for (std::size_t i = 0; i < n; ++i) {
        y[i] = rp.y[n - 1 - i];
        py[i] = rp.py[n - 1 - i];
        e2[i] = rp.e2[n - 1 - i];
      }
    } else {
      // align the right pass to the left values at the match node; the two
      // states are parallel at an eigenvalue, so a least-squares ratio is
      // robust even if y or py vanishes there
      const std::size_t rm = rp.y.size() - 1;  // right-pass index of node m
      const double q = (y[m] * rp.y[rm] + py[m] * rp.py[rm]) /
                       (rp.y[rm] * rp.y[rm] + rp.py[rm] * rp.py[rm]);
      const long eshift = e2[m] - rp.e2[rm];
      for (std::size_t i = m + 1; i < n; ++i) {
        const std::size_t ri = n - 1 - i;
        y[i] = rp.y[ri] * q;
        py[i] = rp.py[ri] * q;
        e2[i] = rp.e2[ri] + eshift;
      }
    }
  }

  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double mg = std::max(std::abs(y[i]), std::abs(py[i]));
    if (mg > 0.0) peak = std::max(peak, std::log2(mg) + static_cast<double>(e2[i]));
  }
  const long e_ref = static_cast<long>(std::llround(peak));
  RawEigenfunction r;
  r.y.resize(n);
  r.py.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int sh = static_cast<int>(e2[i] - e_ref);
    r.y[i] = std::ldexp(y[i], sh);
    r.py[i] = std::ldexp(py[i], sh);
  }
  return r;
}

}  // namespace detail

// Composite-Simpson inner product of two sampled functions against a weight.
inline double weighted_inner_product(const Samples& f, const Samples& g, const RealFn& weight) {
  if (f.size() != g.size()) throw shape_error("weighted_inner_product: size mismatch");
  for (std::size_t i = 0; i < f.size(); ++i)
    if (std::abs(f.x[i] - g.x[i]) > 1e-12 * (1.0 + std::abs(f.x[i])))
      throw shape_error("weighted_inner_product: grids differ");
  std::vector<double> integrand(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) integrand[i] = f.v[i] * g.v[i] * weight(f.x[i]);
  return simpson(integrand, f.uniform_step());
}

inline Eigenpair solve_eigenpair(const SLProblem& pr, std::size_t k, double tol,
                                 const ShootingOptions& opt = {}) {
  validate(pr);
  if (k < 1) throw range_error("solve_eigenpair: k must be >= 1");
  if (!(tol >= 1e-13 && tol <= 1e-4))
    throw range_error("solve_eigenpair: tol must lie in [1e-13, 1e-4]");

  OdeOptions ode{opt.ode_rtol, opt.ode_atol};
  const detail::Bracket br = detail::bracket_eigenvalue(pr, k, opt, ode);
  const double lambda = detail::refine_eigenvalue(pr, k, br, tol, ode);

  Eigenpair ep;
  ep.k = k;
  ep.lambda = lambda;
  ep.samples.x = linspace(pr.x_lo, pr.x_hi, opt.grid_intervals + 1);
  const detail::RawEigenfunction raw =
      detail::integrate_eigenfunction(pr, lambda, ep.samples.x, ode);

  std::vector<double> nsq(raw.y.size());
  for (std::size_t i = 0; i < raw.y.size(); ++i)
    nsq[i] = raw.y[i] * raw.y[i] * pr.normalization_weight(ep.samples.x[i]);
  const double nrm = std::sqrt(simpson(nsq, ep.samples.uniform_step()));
  if (!(nrm > 0.0) || !std::isfinite(nrm))
    throw stiffness_error("solve_eigenpair: eigenfunction normalization failed");

  ep.samples.v.resize(raw.y.size());
  ep.derivative_samples.x = ep.samples.x;
  ep.derivative_samples.v.resize(raw.y.size());
  const double sign = (raw.py.front() < 0.0) ? -1.0 : 1.0;  // convention y'(x_lo) > 0
  for (std::size_t i = 0; i < raw.y.size(); ++i) {
    ep.samples.v[i] = sign * raw.y[i] / nrm;
    ep.derivative_samples.v[i] = sign * raw.py[i] / (nrm * pr.p(ep.samples.x[i]));
  }
  for (std::size_t i = 0; i < nsq.size(); ++i)
    nsq[i] = ep.samples.v[i] * ep.samples.v[i] * pr.normalization_weight(ep.samples.x[i]);
  ep.norm_check = simpson(nsq, ep.samples.uniform_step());
  return ep;
}

inline std::vector<Eigenpair> solve_spectrum(const SLProblem& pr, std::size_t K, double tol,
                                             const ShootingOptions& opt = {}) {
  if (K < 1) throw range_error("solve_spectrum: K must be >= 1");
  std::vector<Eigenpair> out;
  out.reserve(K);
  ShootingOptions o = opt;
  for (std::size_t k = 1; k <= K; ++k) {
    out.push_back(solve_eigenpair(pr, k, tol, o));
    // reuse the previous eigenvalue as the next hint; spacing grows, so a
    // generous halfwidth keeps the bracket cheap
    o.lambda_hint = out.back().lambda;
    o.lambda_halfwidth = std::max(1.0, 0.5 * std::abs(out.back().lambda));
  }
  for (std::size_t k = 1; k < out.size(); ++k)
    if (!(out[k].lambda > out[k - 1].lambda))
      throw search_error("solve_spectrum: eigenvalues not strictly increasing");
  return out;
}

// Discrete Rayleigh quotient of an eigenpair's samples; reproduces lambda up
// to quadrature error.
inline double rayleigh_quotient(const SLProblem& pr, const Eigenpair& ep) {
  const std::size_t n = ep.samples.size();
  std::vector<double> num(n), den(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = ep.samples.x[i];
    const double y = ep.samples.v[i];
    const double dy = ep.derivative_samples.v[i];
    num[i] = pr.p(x) * dy * dy + pr.q0(x) * y * y;
    den[i] = pr.w(x) * y * y;
  }
  const double h = ep.samples.uniform_step();
  return simpson(num, h) / simpson(den, h);
}

// ---- finite-difference matrix oracle ---------------------------------------

struct MatrixOracle {
  std::size_t grid_size = 0;     // interval count N; unknowns are the N-1 interior nodes
  std::vector<double> diag;      // symmetric tridiagonal after folding in the weight
  std::vector<double> offdiag;   // size N-2
  std::vector<double> eigenvalues;  // lowest eigenvalues, nondecreasing
};

namespace detail {

// number of eigenvalues of the tridiagonal (diag, off) strictly below lambda,
// by the LDL^T pivot sign count; near-zero pivots are clamped to -pivmin so a
// lambda that hits an eigenvalue of a leading minor is counted consistently
inline std::size_t sturm_count(const std::vector<double>& diag, const std::vector<double>& off,
                               double lambda) {
  double max_off2 = 1.0;
  for (const double e : off) max_off2 = std::max(max_off2, e * e);
  const double pivmin = std::numeric_limits<double>::min() * max_off2;
  std::size_t cnt = 0;
  double t = diag[0] - lambda;
  if (std::abs(t) < pivmin) t = -pivmin;
  if (t < 0.0) ++cnt;
  for (std::size_t i = 1; i < diag.size(); ++i) {
    t = diag[i] - lambda - off[i - 1] * off[i - 1] / t;
    if (std::abs(t) < pivmin) t = -pivmin;
    if (t < 0.0) ++cnt;
  }
  return cnt;
}

inline double tridiag_eigenvalue(const std::vector<double>& diag, const std::vector<double>& off,
                                 std::size_t k) {  // k is 1-based
  double lo = diag[0], hi = diag[0];
  for (std::size_t i = 0; i < diag.size(); ++i) {
    const double r = (i > 0 ? std::abs(off[i - 1]) : 0.0) +
                     (i + 1 < diag.size() ? std::abs(off[i]) : 0.0);
    lo = std::min(lo, diag[i] - r);
    hi = std::max(hi, diag[i] + r);
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (sturm_count(diag, off, mid) >= k)
      hi = mid;
    else
      lo = mid;
    if (hi - lo <= 1e-14 * (std::abs(lo) + std::abs(hi) + 1.0)) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

// Symmetric second-order central-difference discretization of the
// self-adjoint form, with the spectral weight folded in symmetrically:
//   B = W^{-1/2} A W^{-1/2},  A = tridiag(-p_{i-1/2}, p_{i-1/2}+p_{i+1/2}, -p_{i+1/2})/h^2 + q0.
// The lowest `K_eigs` eigenvalues come from Sturm-sequence bisection (the
// matrix is tridiagonal, so this is exact to bisection tolerance).
inline MatrixOracle build_matrix_oracle(const SLProblem& pr, std::size_t N,
                                        std::size_t K_eigs = 8) {
  validate(pr);
  if (N < 64) throw range_error("build_matrix_oracle: N must be >= 64");
  const double h = (pr.x_hi - pr.x_lo) / static_cast<double>(N);
  MatrixOracle mo;
  mo.grid_size = N;
  mo.diag.resize(N - 1);
  mo.offdiag.resize(N - 2);
  std::vector<double> wv(N - 1);
  for (std::size_t i = 1; i < N; ++i) {
    const double x = pr.x_lo + h * static_cast<double>(i);
    const double pm = pr.p(x - 0.5 * h), pp = pr.p(x + 0.5 * h);
    wv[i - 1] = pr.w(x);
    mo.diag[i - 1] = ((pm + pp) / (h * h) + pr.q0(x)) / wv[i - 1];
  }
  for (std::size_t i = 1; i + 1 < N; ++i) {
    const double x = pr.x_lo + h * static_cast<double>(i);
    mo.offdiag[i - 1] = -pr.p(x + 0.5 * h) / (h * h) / std::sqrt(wv[i - 1] * wv[i]);
  }
  K_eigs = std::min(K_eigs, mo.diag.size());
  mo.eigenvalues.resize(K_eigs);
  for (std::size_t k = 1; k <= K_eigs; ++k)
    mo.eigenvalues[k - 1] = detail::tridiag_eigenvalue(mo.diag, mo.offdiag, k);
  return mo;
}

// One h^2 Richardson step from the oracle values at N and N/2. Used when a
// comparison needs more accuracy than the raw second-order matrix carries.
inline double oracle_eigenvalue_extrapolated(const SLProblem& pr, std::size_t N, std::size_t k) {
  const MatrixOracle fine = build_matrix_oracle(pr, N, k);
  const MatrixOracle coarse = build_matrix_oracle(pr, N / 2, k);
  return (4.0 * fine.eigenvalues[k - 1] - coarse.eigenvalues[k - 1]) / 3.0;
}

}  // namespace gaplab

#endif  // GAPLAB_STURM_HPP
