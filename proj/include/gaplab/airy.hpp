#ifndef GAPLAB_AIRY_HPP
#define GAPLAB_AIRY_HPP

// Airy functions Ai, Bi and their derivatives on the real line, their
// negative zeros, and the Dirichlet eigenfunctions of -d^2/dx^2 + x on the
// half line. No external special-function dependency: a double-double
// Maclaurin core covers |x| <= 8.5 and standard asymptotic expansions cover
// the rest. The Maclaurin connection constants Ai(0), -Ai'(0) are
// bootstrapped internally from the asymptotic series at a far anchor, so the
// only literal constants are pi and ln 2.

#include <cmath>
#include <string>
#include <vector>

#include "gaplab/common.hpp"

namespace gaplab {

namespace detail {

// ---- minimal double-double arithmetic -------------------------------------

struct dd {
  double hi = 0.0, lo = 0.0;
  dd() = default;
  explicit dd(double h) : hi(h), lo(0.0) {}
  dd(double h, double l) : hi(h), lo(l) {}
};

inline dd two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

inline dd quick_two_sum(double a, double b) {  // requires |a| >= |b|
  const double s = a + b;
  return {s, b - (s - a)};
}

inline dd two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

inline dd add(const dd& a, const dd& b) {
  dd s = two_sum(a.hi, b.hi);
  s.lo += a.lo + b.lo;
  return quick_two_sum(s.hi, s.lo);
}

inline dd neg(const dd& a) { return {-a.hi, -a.lo}; }

inline dd sub(const dd& a, const dd& b) { return add(a, neg(b)); }

inline dd mul(const dd& a, const dd& b) {
  dd p = two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return quick_two_sum(p.hi, p.lo);
}

inline dd mul(const dd& a, double b) {
  dd p = two_prod(a.hi, b);
  p.lo += a.lo * b;
  return quick_two_sum(p.hi, p.lo);
}

inline dd div(const dd& a, const dd& b) {
  const double q1 = a.hi / b.hi;
  dd r = sub(a, mul(b, q1));
  const double q2 = r.hi / b.hi;
  r = sub(r, mul(b, q2));
  const double q3 = r.hi / b.hi;
  dd q = quick_two_sum(q1, q2);
  return add(q, dd(q3));
}

inline dd div(const dd& a, double b) { return div(a, dd(b)); }

inline dd sqrt(const dd& a) {
  const double y = std::sqrt(a.hi);
  // one Newton correction in dd: y + (a - y^2) / (2y)
  const dd r = sub(a, mul(dd(y), dd(y)));
  return add(dd(y), div(r, 2.0 * y));
}

inline double to_double(const dd& a) { return a.hi + a.lo; }

// standard hi/lo splits of pi and ln 2
inline const dd dd_pi{3.141592653589793116e+00, 1.224646799147353207e-16};
inline const dd dd_ln2{6.931471805599452862e-01, 2.319046813846299558e-17};

inline dd dd_exp(const dd& a) {
  const double n = std::nearbyint(a.hi / dd_ln2.hi);
  const dd r = sub(a, mul(dd_ln2, n));
  dd term(1.0), sum(1.0);
  for (int k = 1; k <= 30; ++k) {
    term = div(mul(term, r), static_cast<double>(k));
    sum = add(sum, term);
    if (std::abs(term.hi) < 1e-35 * std::abs(sum.hi)) break;
  }
  const int ni = static_cast<int>(n);
  return {std::ldexp(sum.hi, ni), std::ldexp(sum.lo, ni)};
}

// ---- Maclaurin series -------------------------------------------------------
// f and g are the standard Airy basis solutions with f(0)=1, f'(0)=0 and
// g(0)=0, g'(0)=1; both solve y'' = x y. All four series are accumulated in
// double-double because the terms grow to ~e^{zeta} before cancelling.

struct FgValue {
  dd f, fp, g, gp;
};

inline FgValue maclaurin_fg(double x) {
  const dd xd(x);
  const dd x3 = mul(mul(xd, xd), xd);
  FgValue r;

  dd t(1.0);  // f: sum a_k x^{3k}, a_{k+1} = a_k / ((3k+2)(3k+3))
  r.f = t;
  for (int k = 0; k < 500; ++k) {
    t = div(mul(t, x3), (3.0 * k + 2.0) * (3.0 * k + 3.0));
    r.f = add(r.f, t);
    if (std::abs(t.hi) < 1e-40 * (std::abs(r.f.hi) + 1.0) && k > 3) break;
  }

  dd u = mul(mul(xd, xd), 0.5);  // f': sum a_k 3k x^{3k-1}, ratio x^3/(3k(3k+2))
  r.fp = u;
  for (int k = 1; k < 500; ++k) {
    u = div(mul(u, x3), (3.0 * k) * (3.0 * k + 2.0));
    r.fp = add(r.fp, u);
    if (std::abs(u.hi) < 1e-40 * (std::abs(r.fp.hi) + 1.0) && k > 3) break;
  }

  dd s = xd;  // g: sum b_k x^{3k+1}, b_{k+1} = b_k / ((3k+3)(3k+4))
  r.g = s;
  for (int k = 0; k < 500; ++k) {
    s = div(mul(s, x3), (3.0 * k + 3.0) * (3.0 * k + 4.0));
    r.g = add(r.g, s);
    if (std::abs(s.hi) < 1e-40 * (std::abs(r.g.hi) + 1.0) && k > 3) break;
  }

  dd q(1.0);  // g': sum b_k (3k+1) x^{3k}, ratio x^3/((3k+1)(3k+3))
  r.gp = q;
  for (int k = 0; k < 500; ++k) {
    q = div(mul(q, x3), (3.0 * k + 1.0) * (3.0 * k + 3.0));
    r.gp = add(r.gp, q);
    if (std::abs(q.hi) < 1e-40 * (std::abs(r.gp.hi) + 1.0) && k > 3) break;
  }
  return r;
}

// ---- asymptotic expansions --------------------------------------------------
// u_k, v_k are the standard Airy asymptotic coefficients,
//   u_0 = v_0 = 1,  u_k = u_{k-1} (6k-5)(6k-3)(6k-1) / (216 k (2k-1)),
//   v_k = u_k (6k+1)/(1-6k).

struct AiryQuad {
  dd ai, aip, bi, bip;
};

// Exponential region x > 0 in dd, for the bootstrap anchor where the
// expansion error is far below double precision.
inline AiryQuad asym_positive_dd(double x) {
  const dd xd(x);
  const dd sx = sqrt(xd);
  const dd x14 = sqrt(sx);
  const dd zeta = div(mul(mul(xd, sx), 2.0), 3.0);  // 2/3 x^{3/2} without a rounded 2/3

  dd su(1.0), sv(1.0), su_alt(1.0), sv_alt(1.0);
  dd term_u(1.0);
  double prev = 1.0;
  double sign = -1.0;
  for (int k = 1; k <= 80; ++k) {
    const double num = (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0);
    const double den = 216.0 * k * (2.0 * k - 1.0);
    term_u = div(mul(term_u, num), mul(zeta, den));
    const dd term_v = mul(term_u, (6.0 * k + 1.0) / (1.0 - 6.0 * k));
    if (std::abs(term_u.hi) > prev) break;  // divergent tail reached
    prev = std::abs(term_u.hi);
    su = add(su, term_u);
    sv = add(sv, term_v);
    su_alt = add(su_alt, mul(term_u, sign));
    sv_alt = add(sv_alt, mul(term_v, sign));
    sign = -sign;
    if (std::abs(term_u.hi) < 1e-35) break;
  }

  const dd sqrt_pi = sqrt(dd_pi);
  const dd em = dd_exp(neg(zeta));
  const dd ep = dd_exp(zeta);
  AiryQuad r;
  r.ai = div(mul(em, su_alt), mul(mul(sqrt_pi, x14), 2.0));
  r.aip = neg(div(mul(mul(em, sv_alt), x14), mul(sqrt_pi, 2.0)));
  r.bi = div(mul(ep, su), mul(sqrt_pi, x14));
  r.bip = div(mul(mul(ep, sv), x14), sqrt_pi);
  return r;
}

struct AiryOsc {
  double ai, aip, bi, bip;
};

// Plain-double positive branch for the public surface; series truncation
// (~e^{-2 zeta}) dominates its error, and IEEE saturation handles the
// exponential overflow/underflow at large x.
inline AiryOsc asym_positive(double x) {
  const double sx = std::sqrt(x);
  const double x14 = std::sqrt(sx);
  const double zeta = 2.0 / 3.0 * x * sx;

  double su = 1.0, sv = 1.0, su_alt = 1.0, sv_alt = 1.0;
  double uk = 1.0, zk = 1.0, sign = -1.0, prev = 1.0;
  for (int k = 1; k <= 60; ++k) {
    uk *= (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) / (216.0 * k * (2.0 * k - 1.0));
    zk /= zeta;
    const double tu = uk * zk;
    if (std::abs(tu) > prev) break;
    prev = std::abs(tu);
    const double tv = tu * (6.0 * k + 1.0) / (1.0 - 6.0 * k);
    su += tu;
    sv += tv;
    su_alt += sign * tu;
    sv_alt += sign * tv;
    sign = -sign;
    if (std::abs(tu) < 1e-20) break;
  }
  const double sp = std::sqrt(M_PI);
  const double em = std::exp(-zeta), ep = std::exp(zeta);
  AiryOsc r;
  r.ai = em * su_alt / (2.0 * sp * x14);
  r.aip = -x14 * em * sv_alt / (2.0 * sp);
  r.bi = ep * su / (sp * x14);
  r.bip = x14 * ep * sv / sp;
  return r;
}

// Oscillatory region: returns Ai(-z), Ai'(-z), Bi(-z), Bi'(-z) for z > 0,
// plain double (phase accuracy is the limit, dd would not help).
inline AiryOsc asym_negative(double z) {
  const double sz = std::sqrt(z);
  const double z14 = std::sqrt(sz);
  const double zeta = 2.0 / 3.0 * z * sz;
  const double omega = zeta - M_PI / 4.0;

  // even/odd splits of the u/v series with alternating signs
  double P = 1.0, Q = 0.0, R = 1.0, S = 0.0;
  double uk = 1.0, zk = 1.0;
  double prev = 1.0;
  for (int k = 1; k <= 60; ++k) {
    uk *= (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) / (216.0 * k * (2.0 * k - 1.0));
    zk /= zeta;
    const double tu = uk * zk;
    if (std::abs(tu) > prev) break;
    prev = std::abs(tu);
    const double tv = tu * (6.0 * k + 1.0) / (1.0 - 6.0 * k);
    const int m = k / 2;
    const double sgn = (m % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 0) {  // even index 2m = k
      P += sgn * tu;
      R += sgn * tv;
    } else {  // odd index 2m+1 = k
      Q += sgn * tu;
      S += sgn * tv;
    }
    if (std::abs(tu) < 1e-20) break;
  }

  const double c = std::cos(omega), s = std::sin(omega);
  const double sp = std::sqrt(M_PI);
  AiryOsc r;
  r.ai = (c * P + s * Q) / (sp * z14);
  r.aip = z14 * (s * R - c * S) / sp;
  r.bi = (-s * P + c * Q) / (sp * z14);
  r.bip = z14 * (c * R + s * S) / sp;
  return r;
}

// Connection constants c1 = Ai(0), c2 = -Ai'(0), solved from the asymptotic
// anchor Ai = c1 f - c2 g, Bi = sqrt(3)(c1 f + c2 g) at x = anchor. The f, g
// series have positive terms there, so the dd evaluation carries no
// cancellation and the constants come out to ~1e-29.
struct AiryConstants {
  dd c1, c2, sqrt3;
};

inline AiryConstants airy_constants_at(double anchor) {
  const FgValue fg = maclaurin_fg(anchor);
  const AiryQuad aq = asym_positive_dd(anchor);
  const dd sqrt3 = sqrt(dd(3.0));
  const dd bi_over = div(aq.bi, sqrt3);
  AiryConstants c;
  c.c1 = div(add(aq.ai, bi_over), mul(fg.f, 2.0));
  c.c2 = div(sub(bi_over, aq.ai), mul(fg.g, 2.0));
  c.sqrt3 = sqrt3;
  return c;
}

inline const AiryConstants& airy_constants() {
  static const AiryConstants c = airy_constants_at(30.0);
  return c;
}

}  // namespace detail

// ---- public surface --------------------------------------------------------

struct AiryValue {
  double x = 0.0;
  double ai = 0.0;
  double ai_prime = 0.0;
  double bi = 0.0;
  double bi_prime = 0.0;
};

inline constexpr double airy_x_limit = 200.0;
inline constexpr double airy_series_cut = 8.5;

inline AiryValue eval_airy(double x) {
  if (!std::isfinite(x) || std::abs(x) > airy_x_limit)
    throw range_error("eval_airy: x must be finite with |x| <= 200, got " + std::to_string(x));

  AiryValue v;
  v.x = x;
  if (std::abs(x) <= airy_series_cut) {
    const auto& c = detail::airy_constants();
    const detail::FgValue fg = detail::maclaurin_fg(x);
    using detail::add;
    using detail::mul;
    using detail::sub;
    using detail::to_double;
    const detail::dd c1f = mul(c.c1, fg.f), c2g = mul(c.c2, fg.g);
    const detail::dd c1fp = mul(c.c1, fg.fp), c2gp = mul(c.c2, fg.gp);
    v.ai = to_double(sub(c1f, c2g));
    v.ai_prime = to_double(sub(c1fp, c2gp));
    v.bi = to_double(mul(c.sqrt3, add(c1f, c2g)));
    v.bi_prime = to_double(mul(c.sqrt3, add(c1fp, c2gp)));
  } else if (x > 0.0) {
    const detail::AiryOsc q = detail::asym_positive(x);
    v.ai = q.ai;
    v.ai_prime = q.aip;
    v.bi = q.bi;
    v.bi_prime = q.bip;
  } else {
    const detail::AiryOsc q = detail::asym_negative(-x);
    v.ai = q.ai;
    v.ai_prime = q.aip;
    v.bi = q.bi;
    v.bi_prime = q.bip;
  }
  return v;
}

struct AiryZeros {
  std::vector<double> a;  // a_1 < a_2 < ..., Ai(-a_k) = 0
};

// First K zeros of Ai on the negative axis, by sign-change scan plus
// bisection to 1e-12. The scan step is 0.25: consecutive zero spacing decays
// like pi/sqrt(a_k) (~0.51 near a_50), so unit steps would merge brackets
// past k ~ 6.
inline AiryZeros airy_zeros(std::size_t K) {
  if (K < 1 || K > 50) throw range_error("airy_zeros: K must be in [1, 50]");
  AiryZeros out;
  out.a.reserve(K);
  const double step = 0.25;
  const double scan_end = 3.0 * (static_cast<double>(K) + 2.0);
  double z0 = 0.0, f0 = eval_airy(0.0).ai;
  while (out.a.size() < K && z0 < scan_end) {
    const double z1 = z0 + step;
    const double f1 = eval_airy(-z1).ai;
    if (f0 == 0.0) {
      out.a.push_back(z0);
    } else if (f0 * f1 < 0.0) {
      double lo = z0, hi = z1, flo = f0;
      while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        const double fm = eval_airy(-mid).ai;
        if (flo * fm <= 0.0)
          hi = mid;
        else {
          lo = mid;
          flo = fm;
        }
      }
      out.a.push_back(0.5 * (lo + hi));
    }
    z0 = z1;
    f0 = f1;
  }
  if (out.a.size() < K) throw search_error("airy_zeros: scan exhausted before K zeros");
  return out;
}

struct HalfLineEigenfunction {
  std::size_t k = 0;
  double eigenvalue = 0.0;  // = a_k
  Samples samples;          // v_k on [0, X_max]
  double norm_constant = 0.0;  // ||Ai(. - a_k)||_{L^2(0,inf)}
};

// v_k(x) = Ai(x - a_k) / ||Ai(. - a_k)||. The norm comes from the identity
// d/dx (Ai'(x)^2 - x Ai(x)^2) = -Ai(x)^2, which gives
// int_{-a_k}^inf Ai^2 = Ai'(-a_k)^2 since Ai(-a_k) = 0.
inline HalfLineEigenfunction half_line_eigenfunction(std::size_t k, double X_max,
                                                     double grid_step = 1.0 / 256.0) {
  if (k < 1) throw range_error("half_line_eigenfunction: k must be >= 1");
  const double a_k = airy_zeros(k).a.back();
  if (X_max < a_k + 10.0)
    throw range_error("half_line_eigenfunction: X_max must be >= a_k + 10 = " +
                      std::to_string(a_k + 10.0));
  HalfLineEigenfunction ef;
  ef.k = k;
  ef.eigenvalue = a_k;
  ef.norm_constant = std::abs(eval_airy(-a_k).ai_prime);
  const auto n = static_cast<std::size_t>(std::ceil(X_max / grid_step)) + 1;
  ef.samples.x = linspace(0.0, X_max, n);
  ef.samples.v.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    ef.samples.v[i] = eval_airy(ef.samples.x[i] - a_k).ai / ef.norm_constant;
  return ef;
}

// int_0^{X_max} x (v_2^2 - v_1^2) dx; equals 2/3 (a_2 - a_1) up to an
// exponentially small tail.
inline double model_integral(double X_max) {
  const AiryZeros z = airy_zeros(2);
  if (X_max < z.a[1] + 30.0)
    throw range_error("model_integral: X_max must be >= a_2 + 30");
  const HalfLineEigenfunction v1 = half_line_eigenfunction(1, X_max);
  const HalfLineEigenfunction v2 = half_line_eigenfunction(2, X_max);
  std::vector<double> integrand(v1.samples.size());
  for (std::size_t i = 0; i < integrand.size(); ++i) {
    const double x = v1.samples.x[i];
    integrand[i] = x * (v2.samples.v[i] * v2.samples.v[i] - v1.samples.v[i] * v1.samples.v[i]);
  }
  return simpson(integrand, v1.samples.uniform_step());
}

}  // namespace gaplab

#endif  // GAPLAB_AIRY_HPP
