#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gaplab/airy.hpp"
#include "gaplab/sturm.hpp"

using namespace gaplab;

namespace {

SLProblem constant_problem(double mu) {
  SLProblem pr;
  pr.x_lo = 0.0;
  pr.x_hi = M_PI;
  pr.p = [](double) { return 1.0; };
  pr.w = [](double) { return 1.0; };
  pr.q0 = [mu](double) { return mu; };
  pr.normalization_weight = [](double) { return 1.0; };
  return pr;
}

// n = 2 reduced problem: -h'' + mu h = lambda cos^-2(phi) h on (0, phi0)
SLProblem reduced2(double phi0, double mu) {
  SLProblem pr;
  pr.x_lo = 0.0;
  pr.x_hi = phi0;
  pr.p = [](double) { return 1.0; };
  pr.w = [](double phi) { return 1.0 / (std::cos(phi) * std::cos(phi)); };
  pr.q0 = [mu](double) { return mu; };
  pr.normalization_weight = pr.w;
  return pr;
}

std::size_t interior_sign_changes(const Samples& s) {
  std::size_t changes = 0;
  double last = 0.0;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const double y = s.v[i];
    if (y == 0.0) continue;
    if (last != 0.0 && y * last < 0.0) ++changes;
    last = y;
  }
  return changes;
}

}  // namespace

TEST_CASE("constant-coefficient problem has lambda_k = mu + k^2") {
  const double mu = 7.25;
  const SLProblem pr = constant_problem(mu);

  const Eigenpair e1 = solve_eigenpair(pr, 1, 1e-12);
  CHECK(e1.lambda == doctest::Approx(mu + 1.0).epsilon(1e-10));

  const Eigenpair e3 = solve_eigenpair(pr, 3, 1e-12);
  CHECK(e3.lambda == doctest::Approx(mu + 9.0).epsilon(1e-10));
  CHECK(interior_sign_changes(e3.samples) == 2);

  const auto spec = solve_spectrum(pr, 4, 1e-12);
  for (std::size_t k = 1; k <= 4; ++k)
    CHECK(spec[k - 1].lambda == doctest::Approx(mu + k * k).epsilon(1e-10));

  // eigenfunctions are sqrt(2/pi) sin(k x)
  const double amp = std::sqrt(2.0 / M_PI);
  double max_err = 0.0;
  for (std::size_t i = 0; i < e1.samples.size(); ++i)
    max_err = std::max(max_err, std::abs(e1.samples.v[i] - amp * std::sin(e1.samples.x[i])));
  CHECK(max_err < 1e-8);
}

TEST_CASE("eigenpair invariants: boundary values, sign, nodes, normalization") {
  const SLProblem pr = reduced2(M_PI / 4.0, 100.0);
  for (std::size_t k = 1; k <= 8; ++k) {
    const Eigenpair ep = solve_eigenpair(pr, k, 1e-10);
    CHECK(std::abs(ep.samples.v.front()) < 1e-12);
    CHECK(std::abs(ep.samples.v.back()) < 1e-7);
    CHECK(interior_sign_changes(ep.samples) == k - 1);
    CHECK(ep.derivative_samples.v.front() > 0.0);
    CHECK(std::abs(ep.norm_check - 1.0) < 1e-8);
  }
}

TEST_CASE("solve_spectrum: strictly increasing, weighted-orthogonal") {
  const SLProblem pr = reduced2(1.1, 1000.0);
  const auto spec = solve_spectrum(pr, 3, 1e-11);
  CHECK(spec[0].lambda < spec[1].lambda);
  CHECK(spec[1].lambda < spec[2].lambda);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j) {
      const double ip = weighted_inner_product(spec[i].samples, spec[j].samples,
                                               pr.normalization_weight);
      CHECK(std::abs(ip) < 1e-6);
    }
  const double self = weighted_inner_product(spec[0].samples, spec[0].samples,
                                             pr.normalization_weight);
  CHECK(self == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("Rayleigh quotient reproduces the eigenvalue") {
  const SLProblem pr = reduced2(M_PI / 4.0, 1e4);
  for (std::size_t k : {std::size_t{1}, std::size_t{2}}) {
    const Eigenpair ep = solve_eigenpair(pr, k, 1e-11);
    CHECK(rayleigh_quotient(pr, ep) == doctest::Approx(ep.lambda).epsilon(1e-6));
  }
}

TEST_CASE("matrix oracle: constant problem and Richardson ratio") {
  const double mu = 3.5;
  const SLProblem pr = constant_problem(mu);
  const MatrixOracle mo = build_matrix_oracle(pr, 4096, 3);
  CHECK(std::abs(mo.eigenvalues[0] - (mu + 1.0)) < 1e-5);
  for (std::size_t i = 1; i < mo.eigenvalues.size(); ++i)
    CHECK(mo.eigenvalues[i] >= mo.eigenvalues[i - 1]);

  // second-order scheme: halving h shrinks the error by ~4
  const double e_coarse = std::abs(build_matrix_oracle(pr, 512, 1).eigenvalues[0] - (mu + 1.0));
  const double e_fine = std::abs(build_matrix_oracle(pr, 1024, 1).eigenvalues[0] - (mu + 1.0));
  const double ratio = e_coarse / e_fine;
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);
}

TEST_CASE("shooting agrees with the matrix oracle on reduced problems") {
  {
    // phi0 = pi/4, mu = 1e6, k = 1, N = 8192: 1e-6 relative
    const SLProblem pr = reduced2(M_PI / 4.0, 1e6);
    ShootingOptions opt;
    opt.grid_intervals = 8192;
    const Eigenpair ep = solve_eigenpair(pr, 1, 1e-12, opt);
    const MatrixOracle mo = build_matrix_oracle(pr, 8192, 1);
    CHECK(std::abs(ep.lambda - mo.eigenvalues[0]) < 1e-6 * std::abs(ep.lambda));
  }
  {
    // phi0 = pi/4, mu = 1e4, K = 2: both within 1e-6 relative
    const SLProblem pr = reduced2(M_PI / 4.0, 1e4);
    const auto spec = solve_spectrum(pr, 2, 1e-12);
    const MatrixOracle mo = build_matrix_oracle(pr, 8192, 2);
    for (std::size_t k = 0; k < 2; ++k)
      CHECK(std::abs(spec[k].lambda - mo.eigenvalues[k]) < 1e-6 * std::abs(spec[k].lambda));
  }
}

TEST_CASE("inner product of the normalized Airy eigenfunction is 1") {
  const auto v1 = half_line_eigenfunction(1, 40.0);
  const double ip = weighted_inner_product(v1.samples, v1.samples, [](double) { return 1.0; });
  CHECK(ip == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("node-count indexing on random smooth problems, k <= 8") {
  std::mt19937_64 rng(424242);
  auto uni = [&] { return (rng() >> 11) * 0x1p-53; };
  for (int trial = 0; trial < 5; ++trial) {
    const double L = 0.5 + 2.0 * uni();
    const double a = 0.3 * uni(), b = 1.0 + 3.0 * uni(), c = 2.0 * M_PI * uni();
    const double qs = 200.0 * uni(), qf = 1.0 + 2.0 * uni();
    SLProblem pr;
    pr.x_lo = 0.0;
    pr.x_hi = L;
    pr.p = [=](double x) { return 1.0 + a * std::sin(b * x + c); };
    pr.w = [=](double x) { return 1.0 + 0.4 * a * std::cos(b * x); };
    pr.q0 = [=](double x) { return qs * std::cos(qf * x); };
    pr.normalization_weight = pr.w;

    const auto spec8 = solve_spectrum(pr, 8, 1e-10);
    for (std::size_t k = 1; k <= 8; ++k) {
      CHECK(interior_sign_changes(spec8[k - 1].samples) == k - 1);
      CHECK(rayleigh_quotient(pr, spec8[k - 1]) ==
            doctest::Approx(spec8[k - 1].lambda).epsilon(1e-6));
      if (k > 1) CHECK(spec8[k - 1].lambda > spec8[k - 2].lambda);
    }
  }
}

TEST_CASE("exhausted search range reports the observed node counts") {
  const SLProblem pr = constant_problem(1e6);  // lambda_1 = 1e6 + 1, far from the hint
  ShootingOptions opt;
  opt.search_expansion_limit = 4.0;
  try {
    solve_eigenpair(pr, 1, 1e-10, opt);
    CHECK(false);
  } catch (const search_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("node counts") != std::string::npos);
    CHECK(msg.find("k = 1") != std::string::npos);
  }
}

TEST_CASE("error paths") {
  const SLProblem pr = constant_problem(0.0);
  CHECK_THROWS_AS(solve_eigenpair(pr, 0, 1e-10), range_error);
  CHECK_THROWS_AS(solve_eigenpair(pr, 1, 1e-3), range_error);
  CHECK_THROWS_AS(solve_eigenpair(pr, 1, 1e-14), range_error);
  CHECK_THROWS_AS(build_matrix_oracle(pr, 32), range_error);
  CHECK_THROWS_AS(solve_spectrum(pr, 0, 1e-10), range_error);

  SLProblem bad = pr;
  bad.p = [](double) { return -1.0; };
  CHECK_THROWS_AS(solve_eigenpair(bad, 1, 1e-10), shape_error);

  SLProblem flipped = pr;
  flipped.x_lo = 2.0;
  flipped.x_hi = 1.0;
  CHECK_THROWS_AS(solve_eigenpair(flipped, 1, 1e-10), shape_error);

  // mismatched grids in the inner product
  const Eigenpair a = solve_eigenpair(pr, 1, 1e-10);
  ShootingOptions opt;
  opt.grid_intervals = 2048;
  const Eigenpair b = solve_eigenpair(pr, 1, 1e-10, opt);
  CHECK_THROWS_AS(weighted_inner_product(a.samples, b.samples, pr.w), shape_error);
}
