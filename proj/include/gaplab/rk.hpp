#ifndef GAPLAB_RK_HPP
#define GAPLAB_RK_HPP

// Embedded Dormand-Prince 5(4) integrator for the small ODE systems used by
// the shooting solver. Step control is the usual mixed absolute/relative
// test; state dimension is a compile-time constant.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

#include "gaplab/common.hpp"

namespace gaplab {

struct OdeOptions {
  double rtol = 1e-12;
  double atol = 1e-12;
  std::size_t max_steps = 4'000'000;
};

namespace detail {

template <std::size_t N, class F>
struct Dopri5 {
  F f;
  OdeOptions opt;
  std::size_t steps_used = 0;

  using Y = std::array<double, N>;

  static Y axpy(const Y& y, double h, const Y& k) {
    Y r;
    for (std::size_t i = 0; i < N; ++i) r[i] = y[i] + h * k[i];
    return r;
  }

  // one adaptive macro-step group from t to exactly t_end
  void advance(double& t, Y& y, double t_end) {
    const double dir = (t_end >= t) ? 1.0 : -1.0;
    double h = dir * std::max(1e-12, 1e-3 * std::abs(t_end - t));
    while (dir * (t_end - t) > 0.0) {
      if (++steps_used > opt.max_steps)
        throw stiffness_error("ode: step budget exhausted (t = " + std::to_string(t) + ")");
      if (dir * (t + h) > dir * t_end) h = t_end - t;

      const Y k1 = f(t, y);
      const Y k2 = f(t + h / 5.0, axpy(y, h / 5.0, k1));
      Y tmp;
      for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y[i] + h * (3.0 / 40.0 * k1[i] + 9.0 / 40.0 * k2[i]);
      const Y k3 = f(t + 3.0 / 10.0 * h, tmp);
      for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y[i] + h * (44.0 / 45.0 * k1[i] - 56.0 / 15.0 * k2[i] + 32.0 / 9.0 * k3[i]);
      const Y k4 = f(t + 4.0 / 5.0 * h, tmp);
      for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y[i] + h * (19372.0 / 6561.0 * k1[i] - 25360.0 / 2187.0 * k2[i] +
                             64448.0 / 6561.0 * k3[i] - 212.0 / 729.0 * k4[i]);
      const Y k5 = f(t + 8.0 / 9.0 * h, tmp);
      for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y[i] + h * (9017.0 / 3168.0 * k1[i] - 355.0 / 33.0 * k2[i] +
                             46732.0 / 5247.0 * k3[i] + 49.0 / 176.0 * k4[i] -
                             5103.0 / 18656.0 * k5[i]);
      const Y k6 = f(t + h, tmp);
      Y y5;
      for (std::size_t i = 0; i < N; ++i)
        y5[i] = y[i] + h * (35.0 / 384.0 * k1[i] + 500.0 / 1113.0 * k3[i] +
                            125.0 / 192.0 * k4[i] - 2187.0 / 6784.0 * k5[i] +
                            11.0 / 84.0 * k6[i]);
      const Y k7 = f(t + h, y5);

      double err = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        const double y4i = y[i] + h * (5179.0 / 57600.0 * k1[i] + 7571.0 / 16695.0 * k3[i] +
                                       393.0 / 640.0 * k4[i] - 92097.0 / 339200.0 * k5[i] +
                                       187.0 / 2100.0 * k6[i] + 1.0 / 40.0 * k7[i]);
        const double scale =
            opt.atol + opt.rtol * std::max({std::abs(y[i]), std::abs(y5[i]),
                                            std::abs(h * k1[i])});
        const double e = (y5[i] - y4i) / scale;
        err += e * e;
      }
      err = std::sqrt(err / static_cast<double>(N));

      if (err <= 1.0) {
        t += h;
        y = y5;
        const double fac = (err == 0.0) ? 5.0 : 0.9 * std::pow(err, -0.2);
        h *= std::clamp(fac, 0.2, 5.0);
      } else {
        h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
        if (std::abs(h) < 1e-14 * (std::abs(t) + 1.0))
          throw stiffness_error("ode: step size underflow at t = " + std::to_string(t));
      }
    }
  }
};

}  // namespace detail

// Integrate y' = f(t, y) from t0 to t1; returns y(t1).
template <std::size_t N, class F>
std::array<double, N> ode_integrate(F&& f, double t0, double t1, std::array<double, N> y0,
                                    const OdeOptions& opt = {}) {
  detail::Dopri5<N, F> stepper{std::forward<F>(f), opt};
  stepper.advance(t0, y0, t1);
  return y0;
}

// Integrate while visiting every node of an increasing grid; `visit(i, y)` is
// called at node i (including i = 0 with the initial state). The callback may
// rescale the state in place; the integration continues from the modified
// state.
template <std::size_t N, class F, class V>
void ode_integrate_nodes(F&& f, const std::vector<double>& nodes, std::array<double, N> y0,
                         V&& visit, const OdeOptions& opt = {}) {
  if (nodes.size() < 2) throw shape_error("ode_integrate_nodes: need >= 2 nodes");
  detail::Dopri5<N, F> stepper{std::forward<F>(f), opt};
  visit(std::size_t{0}, y0);
  double t = nodes[0];
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    stepper.advance(t, y0, nodes[i]);
    visit(i, y0);
  }
}

}  // namespace gaplab

#endif  // GAPLAB_RK_HPP
