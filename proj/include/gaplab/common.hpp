#ifndef GAPLAB_COMMON_HPP
#define GAPLAB_COMMON_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gaplab {

inline constexpr const char* version = "1.0.0";

// Error taxonomy. Every module throws one of these so callers (and the CLI)
// can map failures to exit codes without string matching.
struct range_error : std::out_of_range {
  using std::out_of_range::out_of_range;
};
struct shape_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct contract_error : std::logic_error {
  using std::logic_error::logic_error;
};
struct domain_error : std::domain_error {
  using std::domain_error::domain_error;
};
struct search_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct stiffness_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct degeneracy_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using RealFn = std::function<double(double)>;

// A function sampled on a strictly increasing grid. Most grids here are
// uniform; `uniform_step()` asserts that where quadrature requires it.
struct Samples {
  std::vector<double> x;
  std::vector<double> v;

  std::size_t size() const { return x.size(); }

  double uniform_step() const {
    if (x.size() < 2) throw shape_error("Samples: need at least 2 points");
    const double h = x[1] - x[0];
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
      if (std::abs((x[i + 1] - x[i]) - h) > 1e-9 * (std::abs(h) + 1e-300))
        throw shape_error("Samples: grid is not uniform");
    }
    return h;
  }
};

inline std::vector<double> linspace(double a, double b, std::size_t n) {
  if (n < 2) throw range_error("linspace: need n >= 2");
  std::vector<double> x(n);
  const double h = (b - a) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) x[i] = a + static_cast<double>(i) * h;
  x.back() = b;
  return x;
}

// Composite Simpson on a uniform grid. An odd interval count is handled by a
// closing 3/8 rule so the global order stays O(h^4).
inline double simpson(const std::vector<double>& y, double h) {
  const std::size_t n = y.size();
  if (n < 2) throw shape_error("simpson: need at least 2 samples");
  if (n == 2) return 0.5 * h * (y[0] + y[1]);
  if (n == 3) return h / 3.0 * (y[0] + 4.0 * y[1] + y[2]);
  std::size_t m = n - 1;  // interval count
  double total = 0.0;
  std::size_t last = n - 1;
  if (m % 2 != 0) {
    // 3/8 rule on the trailing three intervals
    last = n - 4;
    total += 3.0 * h / 8.0 * (y[n - 4] + 3.0 * y[n - 3] + 3.0 * y[n - 2] + y[n - 1]);
  }
  double acc = y[0] + y[last];
  for (std::size_t i = 1; i < last; i += 2) acc += 4.0 * y[i];
  for (std::size_t i = 2; i < last; i += 2) acc += 2.0 * y[i];
  return total + acc * h / 3.0;
}

inline double simpson(const Samples& s) { return simpson(s.v, s.uniform_step()); }

// Ordinary least squares for y = slope*x + intercept; returns r^2 as well.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

inline LineFit least_squares(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw shape_error("least_squares: size mismatch");
  const std::size_t n = xs.size();
  if (n < 2) throw shape_error("least_squares: need >= 2 points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw domain_error("least_squares: degenerate abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = (syy == 0.0) ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

}  // namespace gaplab

#endif  // GAPLAB_COMMON_HPP
