#ifndef GAPLAB_ASYMPTOTICS_HPP
#define GAPLAB_ASYMPTOTICS_HPP

// Empirical verification harness: the abstract two-norm perturbation bounds
// on random finite-dimensional instances, the finite-vs-infinite Airy
// comparison, log-log rate fits, and the rescaled gap-derivative integral.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "gaplab/airy.hpp"
#include "gaplab/common.hpp"
#include "gaplab/gap_model.hpp"
#include "gaplab/sturm.hpp"

namespace gaplab {

namespace detail {

// ---- small dense symmetric linear algebra (dims <= 16) ----------------------

struct Mat {
  std::size_t n = 0;
  std::vector<double> a;  // row-major

  Mat() = default;
  explicit Mat(std::size_t n_) : n(n_), a(n_ * n_, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }

  static Mat identity(std::size_t n_) {
    Mat m(n_);
    for (std::size_t i = 0; i < n_; ++i) m(i, i) = 1.0;
    return m;
  }
};

inline std::vector<double> matvec(const Mat& m, const std::vector<double>& x) {
  std::vector<double> r(m.n, 0.0);
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t j = 0; j < m.n; ++j) r[i] += m(i, j) * x[j];
  return r;
}

inline Mat cholesky(const Mat& g) {
  Mat l(g.n);
  for (std::size_t j = 0; j < g.n; ++j) {
    double s = g(j, j);
    for (std::size_t k = 0; k < j; ++k) s -= l(j, k) * l(j, k);
    if (!(s > 0.0)) throw domain_error("cholesky: matrix not positive definite");
    l(j, j) = std::sqrt(s);
    for (std::size_t i = j + 1; i < g.n; ++i) {
      double t = g(i, j);
      for (std::size_t k = 0; k < j; ++k) t -= l(i, k) * l(j, k);
      l(i, j) = t / l(j, j);
    }
  }
  return l;
}

inline std::vector<double> forward_solve(const Mat& l, std::vector<double> b) {
  for (std::size_t i = 0; i < l.n; ++i) {
    for (std::size_t k = 0; k < i; ++k) b[i] -= l(i, k) * b[k];
    b[i] /= l(i, i);
  }
  return b;
}

inline std::vector<double> backward_solve_t(const Mat& l, std::vector<double> b) {
  for (std::size_t i = l.n; i-- > 0;) {
    for (std::size_t k = i + 1; k < l.n; ++k) b[i] -= l(k, i) * b[k];
    b[i] /= l(i, i);
  }
  return b;
}

struct EigenSym {
  std::vector<double> values;        // ascending
  std::vector<std::vector<double>> vectors;  // vectors[k] is the k-th eigenvector
};

// cyclic Jacobi; plenty for the dims used here
inline EigenSym jacobi_eigen(Mat m) {
  const std::size_t n = m.n;
  Mat v = Mat::identity(n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += m(i, j) * m(i, j);
    if (off < 1e-28) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(m(p, q)) < 1e-300) continue;
        const double theta = 0.5 * (m(q, q) - m(p, p)) / m(p, q);
        const double t = ((theta >= 0.0) ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t i = 0; i < n; ++i) {
          const double mip = m(i, p), miq = m(i, q);
          m(i, p) = c * mip - s * miq;
          m(i, q) = s * mip + c * miq;
        }
        for (std::size_t j = 0; j < n; ++j) {
          const double mpj = m(p, j), mqj = m(q, j);
          m(p, j) = c * mpj - s * mqj;
          m(q, j) = s * mpj + c * mqj;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vip = v(i, p), viq = v(i, q);
          v(i, p) = c * vip - s * viq;
          v(i, q) = s * vip + c * viq;
        }
      }
  }
  EigenSym e;
  e.values.resize(n);
  e.vectors.assign(n, std::vector<double>(n));
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return m(a, a) < m(b, b); });
  for (std::size_t k = 0; k < n; ++k) {
    e.values[k] = m(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) e.vectors[k][i] = v(i, order[k]);
  }
  return e;
}

// generalized symmetric-definite problem A x = alpha G x; returned vectors
// are G-orthonormal
inline EigenSym generalized_eigen(const Mat& a, const Mat& g) {
  const Mat l = cholesky(g);
  // C = L^{-1} A L^{-T}
  Mat c(a.n);
  for (std::size_t j = 0; j < a.n; ++j) {
    std::vector<double> col(a.n);
    for (std::size_t i = 0; i < a.n; ++i) col[i] = a(i, j);
    col = forward_solve(l, col);
    for (std::size_t i = 0; i < a.n; ++i) c(i, j) = col[i];
  }
  for (std::size_t i = 0; i < a.n; ++i) {
    std::vector<double> row(a.n);
    for (std::size_t j = 0; j < a.n; ++j) row[j] = c(i, j);
    row = forward_solve(l, row);
    for (std::size_t j = 0; j < a.n; ++j) c(i, j) = row[j];
  }
  EigenSym e = jacobi_eigen(c);
  for (auto& vec : e.vectors) vec = backward_solve_t(l, vec);
  return e;
}

inline double weighted_dot(const Mat& g, const std::vector<double>& x,
                           const std::vector<double>& y) {
  double s = 0.0;
  const auto gx = matvec(g, x);
  for (std::size_t i = 0; i < x.size(); ++i) s += gx[i] * y[i];
  return s;
}

}  // namespace detail

// ---- perturbation lemma harness ----------------------------------------------

struct NormPair {
  std::size_t dim = 0;
  detail::Mat gram_base;   // inner product of the reference space H
  detail::Mat gram_tilde;  // inner product of the perturbed space H~
  double c0 = 1.0;         // norm-equivalence constant
};

// c0 is the smallest constant with (1/c0)||v||_H <= ||v||_H~ <= c0 ||v||_H,
// read off the extreme generalized eigenvalues of (G~, G).
inline NormPair make_norm_pair(detail::Mat gram_base, detail::Mat gram_tilde) {
  if (gram_base.n != gram_tilde.n) throw shape_error("make_norm_pair: dimension mismatch");
  NormPair np;
  np.dim = gram_base.n;
  const detail::EigenSym e = detail::generalized_eigen(gram_tilde, gram_base);
  if (!(e.values.front() > 0.0))
    throw domain_error("make_norm_pair: gram_tilde not positive definite");
  np.c0 = std::sqrt(std::max(e.values.back(), 1.0 / e.values.front()));
  np.gram_base = std::move(gram_base);
  np.gram_tilde = std::move(gram_tilde);
  return np;
}

struct PerturbationReport {
  std::size_t k = 0;
  bool lower_bound_ok = false;
  bool upper_bound_ok = false;
  bool eigenvector_bound_ok = false;
  double gamma_k = 0.0;  // spectral gap min(alpha_{k+1}-alpha_k, alpha_k-alpha_{k-1})
  double margin = 0.0;   // smallest slack across the checked inequalities
  double eps_k = 0.0;
  double eps_tilde_k = 0.0;
};

// Evaluate both sides of the eigenvalue bound
//   -C (sum ||(A~-A)u~_i||^2)^{1/2} - eps~_k a~_k
//       <= a~_k - a_k <= eps_k a_k + C (sum ||(A~-A)u_i||^2)^{1/2}
// and of the eigenvector bound with gap gamma_k, on matrices A (self-adjoint
// in H) and A~ (self-adjoint in H~) given as quadratic-form matrices. The
// harness constants are read off the proof chain (products of c0^2 factors
// and the span-wise Cauchy-Schwarz step) times a safety factor 2:
//   C = 2 c0^2,  C_vec = 2 sqrt(2) (c0^3 + 1).
inline PerturbationReport check_perturbation_lemma(const NormPair& norms,
                                                   const detail::Mat& a_form,
                                                   const detail::Mat& a_tilde_form,
                                                   std::size_t k) {
  const std::size_t n = norms.dim;
  if (a_form.n != n || a_tilde_form.n != n)
    throw shape_error("check_perturbation_lemma: dimension mismatch");
  if (k < 1 || k >= n)
    throw range_error("check_perturbation_lemma: need 1 <= k <= dim - 1");

  const detail::EigenSym base = detail::generalized_eigen(a_form, norms.gram_base);
  const detail::EigenSym tilde = detail::generalized_eigen(a_tilde_form, norms.gram_tilde);
  if (!(base.values.front() >= 0.0) || !(tilde.values.front() >= 0.0))
    throw contract_error("check_perturbation_lemma: nonnegative spectra assumed");

  // norm distortion on span{u_1..u_k}: extreme eigenvalues of the restricted
  // Gram ratio (the basis is G-orthonormal, so the base Gram restricts to I)
  auto span_distortion = [&](const detail::EigenSym& eg, const detail::Mat& other_gram) {
    detail::Mat m(k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j)
        m(i, j) = detail::weighted_dot(other_gram, eg.vectors[i], eg.vectors[j]);
    const detail::EigenSym em = detail::jacobi_eigen(m);
    return std::max(0.0, std::max(em.values.back(), 1.0 / em.values.front()) - 1.0);
  };
  const double eps_k = span_distortion(base, norms.gram_tilde);
  const double eps_tk = span_distortion(tilde, norms.gram_base);

  // operator difference E = G~^{-1} A~ - G^{-1} A applied in H-norm
  const detail::Mat lg = detail::cholesky(norms.gram_base);
  const detail::Mat lgt = detail::cholesky(norms.gram_tilde);
  auto e_norm = [&](const std::vector<double>& u) {
    const auto au = detail::matvec(a_form, u);
    const auto atu = detail::matvec(a_tilde_form, u);
    const auto opa = detail::backward_solve_t(lg, detail::forward_solve(lg, au));
    const auto opat = detail::backward_solve_t(lgt, detail::forward_solve(lgt, atu));
    std::vector<double> d(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) d[i] = opat[i] - opa[i];
    return std::sqrt(detail::weighted_dot(norms.gram_base, d, d));
  };
  double su2 = 0.0, st2 = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double eu = e_norm(base.vectors[i]);
    const double et = e_norm(tilde.vectors[i]);
    su2 += eu * eu;
    st2 += et * et;
  }
  const double s_u = std::sqrt(su2), s_t = std::sqrt(st2);

  const double c0 = norms.c0;
  const double C = 2.0 * c0 * c0;
  const double alpha_k = base.values[k - 1];
  const double alpha_tk = tilde.values[k - 1];
  const double diff = alpha_tk - alpha_k;
  const double slack = 1e-12 * (1.0 + std::abs(alpha_k));

  PerturbationReport rep;
  rep.k = k;
  rep.eps_k = eps_k;
  rep.eps_tilde_k = eps_tk;
  const double rhs_upper = eps_k * alpha_k + C * s_u;
  const double rhs_lower = eps_tk * alpha_tk + C * s_t;
  rep.upper_bound_ok = diff <= rhs_upper + slack;
  rep.lower_bound_ok = -diff <= rhs_lower + slack;
  rep.margin = std::min(rhs_upper - diff, rhs_lower + diff);

  double gap = base.values[k] - base.values[k - 1];
  if (k >= 2) gap = std::min(gap, base.values[k - 1] - base.values[k - 2]);
  rep.gamma_k = gap;
  if (!(gap > 1e-10))
    throw degeneracy_error("check_perturbation_lemma: alpha_k gap below 1e-10");

  // eigenvector bound, after sign alignment
  std::vector<double> uk = base.vectors[k - 1];
  const std::vector<double>& utk = tilde.vectors[k - 1];
  if (detail::weighted_dot(norms.gram_base, uk, utk) < 0.0)
    for (double& x : uk) x = -x;
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = utk[i] - uk[i];
  const double lhs_vec = std::sqrt(detail::weighted_dot(norms.gram_base, d, d));
  const double c_vec = 2.0 * std::sqrt(2.0) * (c0 * c0 * c0 + 1.0);
  const double rhs_vec =
      c_vec / gap * (eps_k * alpha_k + s_u + eps_tk * alpha_tk + s_t);
  rep.eigenvector_bound_ok = lhs_vec <= rhs_vec + slack;
  rep.margin = std::min(rep.margin, rhs_vec - lhs_vec);
  return rep;
}

// ---- random instance battery --------------------------------------------------

struct BatteryRow {
  std::size_t instance = 0;
  std::size_t dim = 0;
  double c0 = 0.0;
  PerturbationReport report;
};

namespace detail {

inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1p-53;  // [0, 1)
}

inline Mat random_symmetric(std::mt19937_64& rng, std::size_t n, double scale) {
  Mat m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      m(i, j) = m(j, i) = scale * (2.0 * unit_uniform(rng) - 1.0);
  return m;
}

}  // namespace detail

// One random instance: grams I + small symmetric noise (condition <= 4),
// positive-definite A with O(1) gaps, perturbation of scale <= 1e-2.
inline BatteryRow run_perturbation_instance(std::uint64_t seed, std::size_t instance,
                                            std::size_t dim_max = 12) {
  std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (instance + 1)));
  const std::size_t n = 3 + static_cast<std::size_t>(detail::unit_uniform(rng) *
                                                     static_cast<double>(dim_max - 2));
  const double beta = 0.4 / static_cast<double>(n);

  detail::Mat g = detail::random_symmetric(rng, n, beta);
  detail::Mat gt = detail::random_symmetric(rng, n, beta);
  for (std::size_t i = 0; i < n; ++i) {
    g(i, i) += 1.0;
    gt(i, i) += 1.0;
  }

  detail::Mat a = detail::random_symmetric(rng, n, 0.3);
  for (std::size_t i = 0; i < n; ++i) a(i, i) += 1.0 + static_cast<double>(i);

  const double scale = 1e-2 * detail::unit_uniform(rng);
  detail::Mat pert = detail::random_symmetric(rng, n, scale);
  detail::Mat at(n);
  for (std::size_t i = 0; i < n * n; ++i) at.a[i] = a.a[i] + pert.a[i];

  const std::size_t k =
      1 + static_cast<std::size_t>(detail::unit_uniform(rng) * std::min<std::size_t>(4, n - 1));

  BatteryRow row;
  row.instance = instance;
  row.dim = n;
  NormPair np = make_norm_pair(std::move(g), std::move(gt));
  row.c0 = np.c0;
  row.report = check_perturbation_lemma(np, a, at, k);
  return row;
}

inline std::vector<BatteryRow> run_perturbation_battery(std::size_t count, std::uint64_t seed,
                                                        std::size_t dim_max = 12) {
  std::vector<BatteryRow> rows;
  rows.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    rows.push_back(run_perturbation_instance(seed, i, dim_max));
  return rows;
}

// ---- finite-interval Airy problem ---------------------------------------------

struct FiniteAiryResult {
  double R = 0.0;
  std::vector<double> alpha_R;
  std::vector<Samples> u_R;
  std::vector<double> deviation;  // |alpha_k^R - a_k|
};

inline FiniteAiryResult finite_airy(double R, std::size_t K, double tol = 1e-12) {
  if (!(R >= 6.0)) throw range_error("finite_airy: R must be >= 6");
  if (K < 1) throw range_error("finite_airy: K must be >= 1");
  SLProblem pr;
  pr.x_lo = 0.0;
  pr.x_hi = R;
  pr.p = [](double) { return 1.0; };
  pr.w = [](double) { return 1.0; };
  pr.q0 = [](double x) { return x; };
  pr.normalization_weight = [](double) { return 1.0; };

  const AiryZeros zeros = airy_zeros(K);
  FiniteAiryResult res;
  res.R = R;
  ShootingOptions opt;
  opt.grid_intervals = std::max<std::size_t>(4096, static_cast<std::size_t>(R) * 256);
  for (std::size_t k = 1; k <= K; ++k) {
    opt.lambda_hint = zeros.a[k - 1];
    opt.lambda_halfwidth = 1.0;
    const Eigenpair ep = solve_eigenpair(pr, k, tol, opt);
    res.alpha_R.push_back(ep.lambda);
    res.deviation.push_back(std::abs(ep.lambda - zeros.a[k - 1]));
    res.u_R.push_back(ep.samples);
  }
  for (std::size_t k = 1; k < res.alpha_R.size(); ++k)
    if (!(res.alpha_R[k] > res.alpha_R[k - 1]))
      throw search_error("finite_airy: eigenvalues not simple/increasing");
  return res;
}

// ---- rate fit ------------------------------------------------------------------

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

inline RateFit fit_rate(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw shape_error("fit_rate: size mismatch");
  if (xs.size() < 3) throw shape_error("fit_rate: need at least 3 points");
  std::vector<double> lx(xs.size()), ly(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0)) throw domain_error("fit_rate: xs must be positive");
    if (!(ys[i] > 0.0)) throw domain_error("fit_rate: ys must be positive");
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
  }
  const LineFit f = least_squares(lx, ly);
  return {f.slope, f.intercept, f.r2};
}

// ---- corollary integral ---------------------------------------------------------

struct CorollaryResult {
  double integral_I = 0.0;      // int_0^phi0 P (h_2^2 - h_1^2) cos^{-n}
  double scaled_integral = 0.0; // delta^{-1/3} I / P'(phi0)
  double target = 0.0;          // -(2/3)(a_2 - a_1)
  double deviation = 0.0;       // scaled_integral - target
  double delta = 0.0;
};

// I = int_0^phi0 P(phi) (h_j^2 - h_i^2) cos^{-n} dphi from two solved pairs.
inline double gap_derivative_integral(const ReducedProblem& rp, const Eigenpair& lo,
                                      const Eigenpair& hi) {
  const SLProblem pr = reduced_problem_as_sl(rp);
  const Samples& h1 = lo.samples;
  const Samples& h2 = hi.samples;
  if (h1.size() != h2.size()) throw shape_error("gap_derivative_integral: grid mismatch");
  std::vector<double> integrand(h1.size());
  for (std::size_t i = 0; i < h1.size(); ++i) {
    const double phi = h1.x[i];
    integrand[i] = eval_potential(phi) * (h2.v[i] * h2.v[i] - h1.v[i] * h1.v[i]) *
                   pr.normalization_weight(phi);
  }
  return simpson(integrand, h1.uniform_step());
}

inline CorollaryResult check_corollary_integral(const ReducedProblem& rp, double tol = 1e-12,
                                                std::size_t grid_intervals = 0) {
  validate(rp);
  if (rp.t != 0.0)
    throw contract_error("check_corollary_integral: defined for the unperturbed problem");
  const auto eig = solve_reduced(rp, 2, tol, grid_intervals);

  CorollaryResult res;
  res.delta = reduced_delta(rp);
  res.integral_I = gap_derivative_integral(rp, eig[0], eig[1]);
  res.scaled_integral =
      res.integral_I / (std::cbrt(res.delta) * eval_potential_derivative(rp.phi0));
  const AiryZeros z = airy_zeros(2);
  res.target = -2.0 / 3.0 * (z.a[1] - z.a[0]);
  res.deviation = res.scaled_integral - res.target;
  return res;
}

}  // namespace gaplab

#endif  // GAPLAB_ASYMPTOTICS_HPP
