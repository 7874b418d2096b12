#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "activemedia/ml_model.hpp"

using namespace activemedia;

TEST_CASE("gating functions") {
  CHECK(MLParams::m_inf(-1.2) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(MLParams::w_inf(12.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(MLParams::tau_w(12.0) == doctest::Approx(1.0).epsilon(1e-15));
  for (double v : {-70.0, -30.0, 0.0, 25.0}) CHECK(MLParams::dw(v, MLParams::w_inf(v)) == 0.0);
}

TEST_CASE("vector field of an isolated cell") {
  const MLParams p{39.0};
  const double v = -20.0, w = 0.1;
  const double expected = 39.0 - 4.0 * MLParams::m_inf(v) * (v - 120.0) - 8.0 * w * (v + 84.0) - 2.0 * (v + 60.0);
  CHECK(p.dv(v, w) == doctest::Approx(expected));
  CHECK(MLParams::dw(v, w) == doctest::Approx(0.3 * (MLParams::w_inf(v) - w) / MLParams::tau_w(v)));
}

TEST_CASE("network coupling currents") {
  MLNetwork net;
  net.g_oe = 0.3;
  net.g_eo = 0.07;
  net.g_ee = 0.1;
  const std::vector<double> s{-10.0, 0.1, -30.0, 0.0, -35.0, 0.0, 5.0, 0.2};
  const auto cur = coupling_currents(net, s);
  CHECK(cur[0] == doctest::Approx(0.3 * (-30.0 + 10.0)));
  CHECK(cur[1] == doctest::Approx(0.07 * (-10.0 + 30.0) + 0.1 * (-35.0 + 30.0)));
  CHECK(cur[2] == doctest::Approx(0.1 * (-30.0 + 35.0) + 0.07 * (5.0 + 35.0)));
  CHECK(cur[3] == doctest::Approx(0.3 * (-35.0 - 5.0)));
  const auto f = ml_vector_field(net, s);
  for (std::size_t c = 0; c < 4; ++c) {
    CHECK(f[2 * c] == doctest::Approx(net.cell(c).dv(s[2 * c], s[2 * c + 1]) + cur[c]));
    CHECK(f[2 * c + 1] == doctest::Approx(MLParams::dw(s[2 * c], s[2 * c + 1])));
  }
  CHECK_THROWS_AS(ml_vector_field(net, std::vector<double>(6)), std::invalid_argument);
}

TEST_CASE("junction currents cancel for equal gains") {
  MLNetwork net;
  net.g_oe = net.g_eo = net.g_ee = 0.2;
  const std::vector<double> s{-10.0, 0.1, -30.0, 0.0, -35.0, 0.0, 5.0, 0.2};
  const auto cur = coupling_currents(net, s);
  CHECK(std::abs(cur[0] + cur[1] + cur[2] + cur[3]) < 1e-12);
  // The E-E junction is always symmetric: with O-E voltage gaps closed only
  // it carries current.
  net.g_oe = 0.4;
  net.g_eo = 0.05;
  const std::vector<double> t{-30.0, 0.0, -30.0, 0.0, -35.0, 0.0, -35.0, 0.0};
  const auto c = coupling_currents(net, t);
  CHECK(c[0] == 0.0);
  CHECK(c[3] == 0.0);
  CHECK(c[1] + c[2] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(c[1] == doctest::Approx(0.2 * -5.0));
}

TEST_CASE("excitable cell has a stable rest state") {
  const auto eqs = ml_equilibria(kExcitableCurrent);
  REQUIRE_FALSE(eqs.empty());
  const MLEquilibrium& rest = eqs.front();
  CHECK(rest.stable);
  CHECK(rest.v < 0.0);
  const MLParams p{kExcitableCurrent};
  CHECK(std::abs(p.dv(rest.v, rest.w)) < 1e-9);
  // Long simulation from nearby data settles on the same point.
  MLNetwork net;
  net.n_excitable = 1;
  net.g_oe = net.g_eo = net.g_ee = 0.0;
  net.I_oscillator = kExcitableCurrent;
  const MLSystem sys(net);
  std::vector<double> s{rest.v + 3.0, rest.w, rest.v - 3.0, rest.w, rest.v, rest.w + 0.01};
  advance(sys, s, 2000.0, IntegratorConfig::ml_defaults());
  for (std::size_t c = 0; c < 3; ++c) {
    CHECK(s[2 * c] == doctest::Approx(rest.v).epsilon(1e-6));
    CHECK(s[2 * c + 1] == doctest::Approx(rest.w).epsilon(1e-6));
  }
}

TEST_CASE("oscillator cell has a stable limit cycle") {
  for (const auto& e : ml_equilibria(kOscillatorCurrent)) CHECK_FALSE(e.stable);
  const MLLimitCycle a = ml_limit_cycle(kOscillatorCurrent, 0.01);
  const MLLimitCycle b = ml_limit_cycle(kOscillatorCurrent, 0.005);
  CHECK(a.period > 5.0);
  CHECK(std::abs(a.period - b.period) / b.period < 0.005);
  CHECK(*std::max_element(a.v.begin(), a.v.end()) > 0.0);
  CHECK_THROWS_AS(ml_limit_cycle(kExcitableCurrent), std::domain_error);
}

TEST_CASE("symmetric data stays symmetric") {
  MLNetwork net;
  net.g_oe = 0.4;
  net.g_eo = 0.05;
  net.g_ee = 0.1;
  const MLSystem sys(net);
  std::vector<double> s{-20.0, 0.2, -33.0, 0.006, -33.0, 0.006, -20.0, 0.2};
  IntegratorConfig cfg = IntegratorConfig::ml_defaults();
  cfg.t_transient = 0.0;
  cfg.t_record = 2000.0;
  cfg.sample_interval = 1.0;
  const Trajectory tr = integrate(sys, s, cfg);
  double worst = 0.0;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    worst = std::max(worst, std::abs(tr.at(i, 0) - tr.at(i, 6)));
    worst = std::max(worst, std::abs(tr.at(i, 2) - tr.at(i, 4)));
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("firing rules and layout") {
  const MLSystem sys(MLNetwork{});
  CHECK(sys.dimension() == 8);
  CHECK(sys.firing_rule(3).kind == FiringRule::Kind::Threshold);
  CHECK(sys.firing_rule(3).coordinate == 6);
  CHECK(sys.firing_rule(3).level == 0.0);
  CHECK(sys.layout().z.value() == 3);
  MLNetwork bad;
  bad.g_eo = -1.0;
  CHECK_THROWS_WITH(bad.validate(), doctest::Contains("g_eo"));
}

TEST_CASE("initial conditions are reproducible") {
  const MLNetwork net;
  const auto a = ml_initials(net, 4, 9);
  const auto b = ml_initials(net, 4, 9);
  CHECK(a == b);
  CHECK(a != ml_initials(net, 4, 10));
  for (const auto& s : a) {
    CHECK(s.size() == 8);
    CHECK(std::abs(s[2] - ml_equilibria(kExcitableCurrent).front().v) <= 5.0);
  }
}

TEST_CASE("anti-phase subthreshold point classifies as 0:1-m") {
  MLNetwork net;
  net.g_oe = 0.4;
  net.g_eo = 0.05;
  net.g_ee = 0.1;
  const MLSystem sys(net);
  const MLLimitCycle lc = ml_limit_cycle(kOscillatorCurrent);
  const auto rest = ml_equilibria(kExcitableCurrent).front();
  const std::size_t half = lc.v.size() / 2;
  const std::vector<double> s{lc.v[0], lc.w[0], rest.v, rest.w, rest.v, rest.w, lc.v[half], lc.w[half]};
  const Trajectory tr = integrate(sys, s, IntegratorConfig::ml_defaults());
  CHECK(ml_classify(net, tr).label() == "0:1-m");
}
