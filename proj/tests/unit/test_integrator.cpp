#include "doctest.h"

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "activemedia/integrator.hpp"
#include "activemedia/phase_model.hpp"

using namespace activemedia;

namespace {

struct SingleExcitable {
  double b = 1.1;
  std::size_t dimension() const { return 1; }
  std::size_t cell_count() const { return 1; }
  FiringRule firing_rule(std::size_t) const { return {FiringRule::Kind::PhaseCrossing, 0, kPi}; }
  void operator()(std::span<const double> s, std::span<double> out) const { out[0] = f_excitable(s[0], b); }
};

struct Blowup {
  std::size_t dimension() const { return 1; }
  std::size_t cell_count() const { return 1; }
  FiringRule firing_rule(std::size_t) const { return {FiringRule::Kind::Threshold, 0, 0.0}; }
  void operator()(std::span<const double> s, std::span<double> out) const { out[0] = s[0] * s[0]; }
};

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("uncoupled oscillator winds once in 2 pi") {
  const PhaseChain sys(ChainSpec::chain(1, 0.0, 0.0, 0.0));
  std::vector<double> s = rest_state(sys.spec());
  advance(sys, s, kTwoPi, IntegratorConfig{});
  CHECK(s[0] == doctest::Approx(kTwoPi).epsilon(1e-12));
  CHECK(s[2] == doctest::Approx(kTwoPi).epsilon(1e-12));

  IntegratorConfig cfg;
  cfg.method = IntegratorConfig::Method::DormandPrince45;
  s = rest_state(sys.spec());
  advance(sys, s, kTwoPi, cfg);
  CHECK(s[0] == doctest::Approx(kTwoPi).epsilon(1e-10));
}

TEST_CASE("excitable cell at rest stays put") {
  const SingleExcitable sys;
  IntegratorConfig cfg;
  cfg.t_transient = 0.0;
  cfg.t_record = 200.0;
  const Trajectory tr = integrate(sys, {ExcitableParams{1.1}.rest()}, cfg);
  CHECK(tr.firings[0].empty());
  CHECK(detect_firings(tr, 0).empty());
  for (std::size_t i = 0; i < tr.size(); i += 1000) CHECK(tr.at(i, 0) == doctest::Approx(ExcitableParams{1.1}.rest()));
}

TEST_CASE("supra-threshold start fires exactly once") {
  const SingleExcitable sys;
  IntegratorConfig cfg;
  cfg.t_transient = 0.0;
  cfg.t_record = 300.0;
  const Trajectory tr = integrate(sys, {ExcitableParams{1.1}.threshold() + 0.01}, cfg);
  CHECK(tr.firings[0].size() == 1);
  CHECK(detect_firings(tr, 0).size() == 1);
  CHECK(tr.final_state[0] == doctest::Approx(ExcitableParams{1.1}.rest() + kTwoPi).epsilon(1e-8));
  CHECK(tr.firings[0][0] == doctest::Approx(detect_firings(tr, 0)[0]).epsilon(1e-12));
}

TEST_CASE("trajectory layout") {
  const PhaseChain sys(ChainSpec::chain(2, 0.3, 0.2, 0.5));
  IntegratorConfig cfg;
  cfg.t_transient = 10.0;
  cfg.t_record = 20.0;
  cfg.sample_interval = 0.1;
  const Trajectory tr = integrate(sys, rest_state(sys.spec()), cfg);
  CHECK(tr.dimension == 4);
  CHECK(tr.t_begin == doctest::Approx(10.0));
  CHECK(tr.t_end == doctest::Approx(30.0));
  CHECK(tr.size() == 201);
  for (std::size_t i = 1; i < tr.size(); ++i) CHECK(tr.times[i] > tr.times[i - 1]);
  CHECK(tr.samples.size() == tr.size() * 4);
  // Firing counts equal the winding gained (x starts at 0, so boundary
  // alignment is exact up to one crossing).
  const double gained = (tr.final_state[0] - tr.initial_state[0]) / kTwoPi;
  CHECK(std::abs(static_cast<double>(tr.firings[0].size()) - gained) <= 1.0);
}

TEST_CASE("state dimension mismatch") {
  const PhaseChain sys(ChainSpec::chain(2, 0.3, 0.2, 0.5));
  CHECK_THROWS_AS(integrate(sys, std::vector<double>{0.0, 0.0}, IntegratorConfig{}), std::invalid_argument);
}

TEST_CASE("config validation") {
  IntegratorConfig cfg;
  cfg.dt = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = IntegratorConfig{};
  cfg.t_record = -1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = IntegratorConfig{};
  cfg.abs_tol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("non-finite state is reported") {
  IntegratorConfig cfg;
  cfg.t_transient = 0.0;
  cfg.t_record = 10.0;
  cfg.dt = 0.01;
  CHECK_THROWS_AS(integrate(Blowup{}, {1.0}, cfg), IntegrationError);
  CHECK_THROWS_AS(integrate(Blowup{}, {std::numeric_limits<double>::quiet_NaN()}, cfg), IntegrationError);
}

TEST_CASE("adaptive step-size underflow is reported") {
  IntegratorConfig cfg;
  cfg.method = IntegratorConfig::Method::DormandPrince45;
  cfg.t_transient = 0.0;
  cfg.t_record = 10.0;
  CHECK_THROWS_AS(integrate(Blowup{}, {1.0}, cfg), IntegrationError);
}

TEST_CASE("RK4 converges at fourth order") {
  // A subthreshold locked state, so errors are not amplified by chaos.
  const PhaseChain sys(ChainSpec::chain(2, 0.3, 0.05, 0.5));
  const std::vector<double> start{0.0, -0.4, -0.4, 1.0};
  auto run = [&](double dt) {
    IntegratorConfig cfg;
    cfg.dt = dt;
    std::vector<double> s = start;
    advance(sys, s, 1000.0, cfg);
    return s;
  };
  const std::vector<double> ref = run(0.003125);
  std::vector<double> log_dt, log_err;
  for (double dt : {0.1, 0.05, 0.025}) {
    log_dt.push_back(std::log(dt));
    log_err.push_back(std::log(max_abs_diff(run(dt), ref)));
  }
  const double slope = (log_err.back() - log_err.front()) / (log_dt.back() - log_dt.front());
  CHECK(slope >= 3.7);
}

TEST_CASE("adaptive and fixed-step solutions agree") {
  const PhaseChain sys(ChainSpec::chain(2, 0.5, 0.3, 0.5));
  std::vector<double> a{0.0, -0.4, -0.4, 1.0};
  std::vector<double> b = a;
  IntegratorConfig rk;
  rk.dt = 0.0025;
  advance(sys, a, 50.0, rk);
  IntegratorConfig dp;
  dp.method = IntegratorConfig::Method::DormandPrince45;
  dp.abs_tol = 1e-11;
  dp.rel_tol = 1e-11;
  advance(sys, b, 50.0, dp);
  CHECK(max_abs_diff(a, b) < 1e-7);
}

TEST_CASE("event times are stable under dt halving") {
  const PhaseChain sys(ChainSpec::chain(1, 0.3, 0.6, 0.0));
  IntegratorConfig cfg;
  cfg.t_transient = 0.0;
  cfg.t_record = 200.0;
  const Trajectory a = integrate(sys, rest_state(sys.spec(), 0.0, 0.5), cfg);
  cfg.dt /= 2.0;
  const Trajectory b = integrate(sys, rest_state(sys.spec(), 0.0, 0.5), cfg);
  for (std::size_t c = 0; c < 3; ++c) {
    REQUIRE(a.firings[c].size() == b.firings[c].size());
    for (std::size_t k = 0; k < a.firings[c].size(); ++k) {
      CHECK(std::abs(a.firings[c][k] - b.firings[c][k]) <= 0.005);
    }
  }
}

TEST_CASE("synchrony manifold is preserved") {
  const PhaseChain sys(ChainSpec::chain(2, 0.78, 0.13, 0.5));
  std::vector<double> s{0.7, -0.2, -0.2, 0.7};
  advance(sys, s, 1000.0, IntegratorConfig{});
  CHECK(std::abs(s[0] - s[3]) <= 1e-10);
  CHECK(std::abs(s[1] - s[2]) <= 1e-10);
}

TEST_CASE("deterministic reruns") {
  const PhaseChain sys(ChainSpec::chain(2, 0.11, 0.49, 0.5));
  IntegratorConfig cfg;
  cfg.t_transient = 100.0;
  cfg.t_record = 200.0;
  const Trajectory a = integrate(sys, {0.1, 0.2, 0.3, 0.4}, cfg);
  const Trajectory b = integrate(sys, {0.1, 0.2, 0.3, 0.4}, cfg);
  CHECK(a.samples == b.samples);
  CHECK(a.firings == b.firings);
}

TEST_CASE("Poincare section of rigid rotation") {
  ChainSpec spec = ChainSpec::chain(1, 0.0, 0.0, 0.0, 1.0, 0.2);
  const PhaseChain sys(spec);
  IntegratorConfig cfg;
  cfg.t_transient = 0.0;
  cfg.t_record = 100.0;
  const Trajectory tr = integrate(sys, {0.0, 0.0, 0.0}, cfg);
  const PoincareSection sec = poincare_section(tr, 0, 1.0);
  REQUIRE(sec.points.size() >= 10);
  CHECK(sec.monotone);
  const double advance_z = kTwoPi * spec.omega_z() / spec.omega_x();
  for (std::size_t i = 1; i < sec.points.size(); ++i) {
    CHECK(std::abs(wrap_pi(sec.points[i][2] - sec.points[i - 1][2] - advance_z)) < 1e-9);
    CHECK(sec.points[i][0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(sec.times[i] - sec.times[i - 1] == doctest::Approx(kTwoPi / 1.2).epsilon(1e-9));
  }
}

TEST_CASE("wrapping helpers") {
  CHECK(wrap_two_pi(-0.5) == doctest::Approx(kTwoPi - 0.5));
  CHECK(wrap_two_pi(7.0) == doctest::Approx(7.0 - kTwoPi));
  CHECK(wrap_pi(kPi) == doctest::Approx(kPi));
  CHECK(wrap_pi(-kPi) == doctest::Approx(kPi));
  CHECK(wrap_pi(4.0) == doctest::Approx(4.0 - kTwoPi));
}
