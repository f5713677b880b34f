#ifndef GAPLAB_TEST_ORACLES_HPP
#define GAPLAB_TEST_ORACLES_HPP

// Test-side oracles, independent of the library implementation paths they
// check. The Airy oracle integrates the rotated contour form of the standard
// integral representation
//   Ai(x) = (1/pi) Re  e^{i pi/6} int_0^inf exp(-s^3/3 + x s e^{2 pi i/3}) ds,
// which is absolutely convergent and smooth, with composite Gauss-Legendre.

#include <cmath>
#include <stdexcept>
#include <vector>

namespace oracle {

struct GaussLegendre {
  std::vector<double> node, weight;  // on [-1, 1]

  explicit GaussLegendre(int n) {
    node.resize(n);
    weight.resize(n);
    for (int i = 0; i < n; ++i) {
      // Newton from the Chebyshev-like initial guess
      double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int j = 2; j <= n; ++j) {
          const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
          p0 = p1;
          p1 = p2;
        }
        const double dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (x * p1 - p0) / (x * x - 1.0);
      node[i] = x;
      weight[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }
};

// Composite 16-point Gauss-Legendre over [a, b] with `panels` subintervals.
template <class F>
double integrate(F&& f, double a, double b, int panels = 128) {
  static const GaussLegendre gl(16);
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double c = a + (p + 0.5) * h;
    double acc = 0.0;
    for (std::size_t i = 0; i < gl.node.size(); ++i)
      acc += gl.weight[i] * f(c + 0.5 * h * gl.node[i]);
    total += acc * 0.5 * h;
  }
  return total;
}

// Valid for |x| <= ~12; the integrand decays like exp(-s^3/3) so truncation
// at s = 9 is far below double precision for that range.
inline double airy_ai(double x) {
  const double c = std::sqrt(3.0) / 2.0;
  auto f = [&](double s) {
    const double e = std::exp(-s * s * s / 3.0 - 0.5 * x * s);
    const double ph = c * x * s;
    return e * (c * std::cos(ph) - 0.5 * std::sin(ph));
  };
  return integrate(f, 0.0, 9.0, 256) / M_PI;
}

inline double airy_ai_prime(double x) {
  const double c = std::sqrt(3.0) / 2.0;
  auto f = [&](double s) {
    const double e = s * std::exp(-s * s * s / 3.0 - 0.5 * x * s);
    const double ph = c * x * s;
    return e * (-c * std::cos(ph) - 0.5 * std::sin(ph));
  };
  return integrate(f, 0.0, 9.0, 256) / M_PI;
}

// k-th positive zero of Ai(-z), bracketed on unit intervals and bisected on
// the quadrature oracle itself.
inline double airy_zero(int k) {
  int found = 0;
  double lo = 0.0, hi = 0.0, flo = airy_ai(-0.0);
  for (double z = 0.0; z < 12.0; z += 0.25) {
    const double fz = airy_ai(-(z + 0.25));
    if (flo == 0.0 || flo * fz < 0.0) {
      ++found;
      if (found == k) {
        lo = z;
        hi = z + 0.25;
        break;
      }
    }
    flo = fz;
  }
  if (hi == 0.0) throw std::runtime_error("oracle::airy_zero: zero not bracketed");
  double fl = airy_ai(-lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = airy_ai(-mid);
    if (fl * fm <= 0.0)
      hi = mid;
    else {
      lo = mid;
      fl = fm;
    }
    if (hi - lo < 1e-15) break;
  }
  return 0.5 * (lo + hi);
}

// ---- 2-D hyperbolic strip eigenvalues ---------------------------------------
// Lowest Dirichlet eigenvalues of -Delta + t P on the domain
// {(r sin phi, r cos phi) : log r in (0, pi/sqrt(mu)), phi in (0, phi0)} in
// the upper half-plane, via the exact identity -Delta = -cos^2(phi)
// (d^2/drho^2 + d^2/dphi^2) with rho = log r. Discretized with the 5-point
// stencil as the generalized problem A u = lambda W u, W = cos^{-2}(phi);
// solved by banded Cholesky plus W-deflated inverse iteration. Entirely
// independent of the separated 1-D solver it cross-checks.

class StripEigenSolver {
 public:
  StripEigenSolver(double phi0, double mu, double t, int n_rho, int n_phi)
      : nr_(n_rho - 1), np_(n_phi - 1) {
    const double L = M_PI / std::sqrt(mu);
    hr_ = L / n_rho;
    hp_ = phi0 / n_phi;
    n_ = nr_ * np_;
    band_ = np_;  // row-major over (i_rho, i_phi): phi neighbors adjacent
    diag_.resize(n_);
    w_.resize(n_);
    for (int ir = 0; ir < nr_; ++ir)
      for (int ip = 0; ip < np_; ++ip) {
        const double phi = (ip + 1) * hp_;
        const double c = std::cos(phi);
        const int idx = ir * np_ + ip;
        w_[idx] = 1.0 / (c * c);
        diag_[idx] = 2.0 / (hr_ * hr_) + 2.0 / (hp_ * hp_) +
                     t * std::atanh(std::sin(phi)) * w_[idx];
      }
    factorize();
  }

  std::vector<double> lowest(int howmany, int iterations = 120) const {
    std::vector<std::vector<double>> vecs;
    std::vector<double> lambdas;
    for (int m = 0; m < howmany; ++m) {
      std::vector<double> u(n_);
      for (int i = 0; i < n_; ++i) u[i] = std::sin(0.37 * (i + 1) * (m + 1)) + 1e-3;
      double lambda = 0.0;
      for (int it = 0; it < iterations; ++it) {
        std::vector<double> rhs(n_);
        for (int i = 0; i < n_; ++i) rhs[i] = w_[i] * u[i];
        std::vector<double> x = solve(rhs);
        for (const auto& v : vecs) {  // W-deflation
          double ip = 0.0;
          for (int i = 0; i < n_; ++i) ip += w_[i] * x[i] * v[i];
          for (int i = 0; i < n_; ++i) x[i] -= ip * v[i];
        }
        double nw = 0.0;
        for (int i = 0; i < n_; ++i) nw += w_[i] * x[i] * x[i];
        nw = std::sqrt(nw);
        for (int i = 0; i < n_; ++i) x[i] /= nw;
        u = x;
        // Rayleigh quotient u^T A u / u^T W u (the latter is 1)
        std::vector<double> au = apply(u);
        lambda = 0.0;
        for (int i = 0; i < n_; ++i) lambda += u[i] * au[i];
      }
      vecs.push_back(u);
      lambdas.push_back(lambda);
    }
    return lambdas;
  }

 private:
  int nr_, np_, n_, band_;
  double hr_, hp_;
  std::vector<double> diag_, w_;
  std::vector<std::vector<double>> chol_;  // chol_[d][i]: L(i+d, i), d = 0..band_

  double offdiag(int i, int j) const {  // A(i, j) for i != j, j = i+1 or i+band_
    if (j == i + 1) return (((i % np_) + 1) < np_) ? -1.0 / (hp_ * hp_) : 0.0;
    if (j == i + band_) return -1.0 / (hr_ * hr_);
    return 0.0;
  }

  std::vector<double> apply(const std::vector<double>& u) const {
    std::vector<double> r(n_);
    for (int i = 0; i < n_; ++i) {
      double s = diag_[i] * u[i];
      if (i + 1 < n_) s += offdiag(i, i + 1) * u[i + 1];
      if (i >= 1) s += offdiag(i - 1, i) * u[i - 1];
      if (i + band_ < n_) s += offdiag(i, i + band_) * u[i + band_];
      if (i >= band_) s += offdiag(i - band_, i) * u[i - band_];
      r[i] = s;
    }
    return r;
  }

  void factorize() {
    chol_.assign(band_ + 1, std::vector<double>(n_, 0.0));
    for (int j = 0; j < n_; ++j) {
      for (int d = 0; d <= band_ && j + d < n_; ++d) {
        double s = (d == 0) ? diag_[j] : offdiag(j, j + d);
        const int kmin = std::max(0, j - band_);
        for (int k = kmin; k < j; ++k) {
          const int dj = j - k, di = j + d - k;
          if (di <= band_) s -= chol_[dj][k] * chol_[di][k];
        }
        if (d == 0)
          chol_[0][j] = std::sqrt(s);
        else
          chol_[d][j] = s / chol_[0][j];
      }
    }
  }

  std::vector<double> solve(const std::vector<double>& b) const {
    std::vector<double> y(b);
    for (int i = 0; i < n_; ++i) {
      const int kmin = std::max(0, i - band_);
      double s = y[i];
      for (int k = kmin; k < i; ++k) s -= chol_[i - k][k] * y[k];
      y[i] = s / chol_[0][i];
    }
    for (int i = n_ - 1; i >= 0; --i) {
      double s = y[i];
      const int kmax = std::min(n_ - 1, i + band_);
      for (int k = i + 1; k <= kmax; ++k) s -= chol_[k - i][i] * y[k];
      y[i] = s / chol_[0][i];
    }
    return y;
  }
};

}  // namespace oracle

#endif  // GAPLAB_TEST_ORACLES_HPP
