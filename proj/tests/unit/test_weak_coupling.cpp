#include "doctest.h"

#include <cmath>
#include <numeric>
#include <vector>

#include "activemedia/phase_model.hpp"
#include "activemedia/weak_coupling.hpp"

using namespace activemedia;

namespace {

ReductionInputs inputs(double c_oe, double c_ee = 0.5, double b = 1.1, double a = 0.0) {
  ReductionInputs in;
  in.c_oe = c_oe;
  in.c_ee = c_ee;
  in.b = b;
  in.second_harmonic = a;
  return in;
}

}  // namespace

TEST_CASE("period of the O-cell orbit") {
  const OrbitU free = periodic_orbit_U(0.0, 256);
  CHECK(free.period == doctest::Approx(kTwoPi).epsilon(1e-14));
  for (std::size_t i = 0; i < free.s.size(); ++i) CHECK(free.u[i] == doctest::Approx(free.s[i]).epsilon(1e-12));
  for (double c : {0.5, 0.7}) {
    const OrbitU orbit = periodic_orbit_U(c, 2048);
    CHECK(std::abs(orbit.period - kTwoPi / std::sqrt(1.0 - c * c)) < 1e-8);
    CHECK(std::abs(orbit.endpoint_error) < 1e-8);
  }
  CHECK(periodic_orbit_U(0.5, 2048).period == doctest::Approx(7.2552).epsilon(1e-4));
  CHECK(periodic_orbit_U(0.7, 2048).period == doctest::Approx(8.7980).epsilon(1e-4));
  CHECK_THROWS_AS(periodic_orbit_U(1.0, 2048), std::invalid_argument);
}

TEST_CASE("input validation") {
  CHECK_NOTHROW(inputs(0.5).validate());
  CHECK_THROWS_WITH(inputs(1.2).validate(), doctest::Contains("c_oe"));
  CHECK_THROWS_WITH(inputs(0.5, -1.0).validate(), doctest::Contains("c_ee"));
  CHECK_THROWS_WITH(inputs(0.5, 0.5, 0.9).validate(), doctest::Contains("b"));
  CHECK(inputs(0.5).resolved_grid() == 4096);
  CHECK(inputs(0.2).resolved_grid() == 4096);
  CHECK(inputs(0.999).resolved_grid() == 32768);
}

TEST_CASE("rest matrix eigenvalues") {
  const auto [lo, hi] = rest_eigenvalues(1.1, 0.5);
  CHECK(hi == doctest::Approx(-std::sqrt(0.21)).epsilon(1e-12));
  CHECK(lo == doctest::Approx(-std::sqrt(0.21) - 1.0).epsilon(1e-12));
  CHECK(hi == doctest::Approx(-0.4583).epsilon(1e-4));
  CHECK(lo == doctest::Approx(-1.4583).epsilon(1e-4));
  const auto [r0, r1] = rest_matrix(1.1, 0.5);
  const double bs = 1.1 * std::sin(-std::acos(1.0 / 1.1));
  CHECK(r0.first == doctest::Approx(bs - 0.5));
  CHECK(r0.second == doctest::Approx(0.5));
  CHECK(r1.first == doctest::Approx(0.5));
}

TEST_CASE("forced response is periodic and averages correctly") {
  const ReductionInputs in = inputs(0.5);
  const OrbitU orbit = periodic_orbit_U(0.5, 2048);
  double residual = 1.0;
  const auto [w1, w2] = forced_response_W(in, orbit, &residual);
  CHECK(residual < 1e-8);
  double mean_w = 0.0, mean_sin = 0.0;
  for (std::size_t i = 0; i < w1.size(); ++i) {
    mean_w += w1[i] + w2[i];
    mean_sin += std::sin(orbit.u[i]);
  }
  mean_w /= static_cast<double>(w1.size());
  mean_sin /= static_cast<double>(w1.size());
  const double bs = -std::sqrt(1.1 * 1.1 - 1.0);
  CHECK(mean_w == doctest::Approx(mean_sin / -bs).epsilon(1e-6));
}

TEST_CASE("decoupled E pair: w2 vanishes and H is flat") {
  const GFunctionTable t = reduce(inputs(0.5, 0.0));
  for (double v : t.w2) CHECK(std::abs(v) < 1e-14);
  const double h0 = interaction_H(t, 0.0);
  for (double phi : {0.3, 1.7, 4.0}) CHECK(interaction_H(t, phi) == doctest::Approx(h0).epsilon(1e-12));
}

TEST_CASE("table invariants") {
  const GFunctionTable t = reduce(inputs(0.5));
  const std::size_t n = t.s.size();
  CHECK(t.w_residual < 1e-8);
  CHECK(std::abs(coupling_G(t, 0.0)) < 1e-15);
  CHECK(std::abs(coupling_G(t, 0.5 * t.period)) < 1e-12);
  for (std::size_t i = 0; i < n; i += 97) {
    CHECK(t.g[(n - i) % n] == doctest::Approx(-t.g[i]).epsilon(1e-12));
    CHECK(t.m[(i + n / 2) % n] == doctest::Approx(-t.m[i]).epsilon(1e-9));
  }
  for (double phi : {0.1, 2.5, 5.0}) {
    CHECK(interaction_H(t, phi + t.period) == doctest::Approx(interaction_H(t, phi)).epsilon(1e-12));
  }
  // Spectral evaluation agrees with the grid correlation at grid points.
  for (std::size_t i = 0; i < n; i += 511) CHECK(interaction_H(t, t.s[i]) == doctest::Approx(t.h[i]).epsilon(1e-10));
  // Direct trapezoid sum at a grid shift.
  const std::size_t shift = 300;
  double direct = 0.0;
  for (std::size_t j = 0; j < n; ++j) direct += t.m[j] * (t.w1[j] + t.w2[(j + shift) % n]);
  direct *= 0.5 / static_cast<double>(n);
  CHECK(t.h[shift] == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("H converges under grid refinement") {
  ReductionInputs a = inputs(0.5);
  a.grid_size = 2048;
  ReductionInputs b = a;
  b.grid_size = 4096;
  const GFunctionTable ta = reduce(a);
  const GFunctionTable tb = reduce(b);
  for (double phi : {0.0, 0.9, 3.1, 6.0}) CHECK(std::abs(interaction_H(ta, phi) - interaction_H(tb, phi)) < 1e-6);
}

TEST_CASE("quadrature converges at second order or better") {
  // Coarse grids against a fine reference: error drops by >= 4x per halving.
  ReductionInputs ref = inputs(0.7);
  ref.grid_size = 8192;
  const double h_ref = interaction_H(reduce(ref), 1.3);
  double prev_err = 0.0;
  for (std::size_t n : {32, 64}) {
    ReductionInputs in = ref;
    in.grid_size = n;
    const double err = std::abs(interaction_H(reduce(in), 1.3) - h_ref);
    if (prev_err > 0.0) CHECK(prev_err / std::max(err, 1e-16) >= 4.0);
    prev_err = err;
  }
}

TEST_CASE("synchrony and anti-phase swap stability") {
  const GFunctionTable half = reduce(inputs(0.5));
  CHECK(half.g_prime_zero > 0.0);
  CHECK(half.g_prime_half < 0.0);
  const GFunctionTable seven = reduce(inputs(0.7));
  CHECK(seven.g_prime_zero < 0.0);
  CHECK(seven.g_prime_half > 0.0);
  for (double c : {0.3, 0.5, 0.7, 0.9}) {
    const GFunctionTable t = reduce(inputs(c));
    CHECK(std::abs(t.g_prime_half + t.g_prime_zero) < 1e-6 * std::abs(t.g_prime_zero) + 1e-10);
  }
  REQUIRE(half.zeros.size() >= 2);
  CHECK(half.zeros.front().phi == 0.0);
  CHECK_FALSE(half.zeros.front().stable);
}

TEST_CASE("critical c_oe") {
  const double c = critical_coe(1.1, 0.5);
  CHECK(c > 0.5);
  CHECK(c < 0.7);
  CHECK_THROWS_AS(critical_coe(1.1, 0.5, CriticalOptions{{0.3, 0.5}, 1e-4}), std::domain_error);
  // c* decreases as either b or c_ee grows.
  CHECK(critical_coe(1.05, 0.5) > c);
  CHECK(critical_coe(1.1, 0.3) > c);
}

TEST_CASE("second harmonic breaks the coincidence") {
  const CriticalOptions opt;
  const SymmetryBreaking plain = symmetry_breaking_check(0.0, 1.1, 0.5, opt);
  CHECK(std::abs(plain.synchrony_critical - plain.antiphase_critical) <= 2.0 * opt.tol);
  const SymmetryBreaking plus = symmetry_breaking_check(0.2, 1.1, 0.5, opt);
  const SymmetryBreaking minus = symmetry_breaking_check(-0.2, 1.1, 0.5, opt);
  CHECK(std::abs(plus.synchrony_critical - plus.antiphase_critical) > 10.0 * opt.tol);
  CHECK(std::abs(minus.synchrony_critical - minus.antiphase_critical) > 10.0 * opt.tol);
  CHECK((plus.antiphase_critical - plus.synchrony_critical) * (minus.antiphase_critical - minus.synchrony_critical) <
        0.0);
}
