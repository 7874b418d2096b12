#include "doctest.h"

#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <vector>

#include "activemedia/sweep.hpp"

using namespace activemedia;

namespace {

const PitchforkBranch& branch(const std::vector<PitchforkBranch>& rows, double c_eo, PitchforkBranch::Kind kind) {
  for (const auto& b : rows) {
    if (std::abs(b.c_eo - c_eo) < 1e-12 && b.kind == kind) return b;
  }
  throw std::logic_error("missing branch");
}

LockPattern locked(int n, int m, Relation relation, double offset) {
  LockPattern p;
  p.n = n;
  p.m = m;
  p.relation = relation;
  p.phase_difference = offset;
  p.ratio_locked = true;
  return p;
}

}  // namespace

TEST_CASE("rng draws are reproducible and in range") {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  Rng c(7);
  const double v = c.uniform(-2.0, 3.0);
  CHECK(v >= -2.0);
  CHECK(v < 3.0);
}

TEST_CASE("fixed point boundary of the OE pair follows the saddle-node line") {
  // Equilibrium: sin(x - y) = 1 / c_oe and 1 - b cos y + c_eo / c_oe = 0, which
  // loses its solution when cos y reaches 1, i.e. c_eo = (b - 1) c_oe.
  const double b = 1.1;
  BoundaryOptions opt;
  opt.c_oe_grid = {1.2, 1.5};
  opt.c_eo_lo = 0.05;
  opt.c_eo_hi = 0.3;
  opt.tol = 1e-4;
  const auto curve = trace_boundary([b](double c_oe, double c_eo) { return ChainSpec::oe_pair(c_oe, c_eo, 1.0, b); },
                                    predicates::fixed_point(), opt, default_initial, "fixed point");
  CHECK(curve.name == "fixed point");
  REQUIRE(curve.points.size() == 2);
  CHECK(curve.omitted.empty());
  for (const auto& p : curve.points) {
    CHECK(std::abs(p.c_eo - (b - 1.0) * p.c_oe) < 1e-3);
  }
  CHECK(curve.points[0].c_oe < curve.points[1].c_oe);
}

TEST_CASE("boundary grid points without a flip are omitted") {
  BoundaryOptions opt;
  opt.c_oe_grid = {0.5, 1.5};
  opt.c_eo_lo = 0.05;
  opt.c_eo_hi = 0.3;
  // Below c_oe = 1 the oscillator never stops, so the predicate is false at both ends.
  const auto curve = trace_boundary([](double c_oe, double c_eo) { return ChainSpec::oe_pair(c_oe, c_eo); },
                                    predicates::fixed_point(), opt);
  REQUIRE(curve.points.size() == 1);
  CHECK(curve.points[0].c_oe == 1.5);
  REQUIRE(curve.omitted.size() == 1);
  CHECK(curve.omitted[0] == 0.5);
}

TEST_CASE("cold and branch warm starts agree on the firing onset") {
  BoundaryOptions opt;
  opt.c_oe_grid = {0.5};
  opt.c_eo_lo = 0.05;
  opt.c_eo_hi = 0.6;
  opt.tol = 1e-3;
  const SpecFamily family = [](double c_oe, double c_eo) { return ChainSpec::oe_pair(c_oe, c_eo); };
  opt.warm_start = WarmStart::Cold;
  const auto cold = trace_boundary(family, predicates::excitable_fires(), opt);
  opt.warm_start = WarmStart::Branch;
  const auto warm = trace_boundary(family, predicates::excitable_fires(), opt);
  REQUIRE(cold.points.size() == 1);
  REQUIRE(warm.points.size() == 1);
  CHECK(std::abs(cold.points[0].c_eo - warm.points[0].c_eo) < 5e-3);
  CHECK(cold.points[0].c_eo > 0.2);
  CHECK(cold.points[0].c_eo < 0.25);
}

TEST_CASE("homotopy line validation and parametrisation") {
  HomotopyLine line{{0.1, 0.6}, {0.95, 0.2}, 11};
  CHECK_NOTHROW(line.validate());
  const auto mid = line.at(0.5);
  CHECK(mid.first == doctest::Approx(0.525));
  CHECK(mid.second == doctest::Approx(0.4));
  CHECK(line.at(0.0) == line.start);
  CHECK(line.at(1.0) == line.end);

  HomotopyLine few = line;
  few.samples = 1;
  CHECK_THROWS_AS(few.validate(), std::invalid_argument);
  HomotopyLine outside = line;
  outside.end = {1.2, 0.2};
  CHECK_THROWS_AS(outside.validate(), std::invalid_argument);
}

TEST_CASE("persistence requires the same locked class") {
  const LockPattern sync = locked(0, 1, Relation::Synchronous, 0.0);
  CHECK(persists(sync, locked(0, 1, Relation::Mixed, 0.3)));
  CHECK_FALSE(persists(sync, locked(0, 1, Relation::Mixed, 2.5)));
  CHECK_FALSE(persists(sync, locked(1, 1, Relation::Synchronous, 0.0)));
  LockPattern drifting = locked(0, 1, Relation::Unlocked, 0.0);
  CHECK_FALSE(persists(sync, drifting));
  const LockPattern anti = locked(1, 2, Relation::AntiPhase, kPi);
  CHECK(persists(anti, locked(2, 4, Relation::Mixed, -2.8)));
  CHECK_FALSE(persists(anti, locked(1, 2, Relation::Synchronous, 0.0)));
}

TEST_CASE("torus initial data is seeded and wrapped") {
  const ChainSpec spec = ChainSpec::chain(1, 0.5, 0.3, 0.0);
  const auto a = torus_initials(spec, 16, 3);
  const auto b = torus_initials(spec, 16, 3);
  const auto c = torus_initials(spec, 16, 4);
  REQUIRE(a.size() == 16);
  CHECK(a == b);
  CHECK(a != c);
  for (const auto& s : a) {
    REQUIRE(s.size() == spec.dimension());
    for (double v : s) {
      CHECK(v >= 0.0);
      CHECK(v < kTwoPi);
    }
  }
}

TEST_CASE("OEO chain collapses onto a single synchronous attractor") {
  const ChainSpec spec = ChainSpec::chain(1, 0.5, 0.5, 0.0);
  const AttractorSet set = bistability_scan(spec, 12, 5, ProbeSettings{});
  CHECK(set.n_ic == 12);
  CHECK(set.unclassified == 0);
  REQUIRE(set.attractors.size() == 1);
  CHECK(set.attractors[0].pattern.relation == Relation::Synchronous);
  CHECK(set.attractors[0].basin_fraction == doctest::Approx(1.0));
  CHECK(set.region_label() == set.attractors[0].pattern.label());
}

TEST_CASE("bistability scan is reproducible under a fixed seed") {
  const ChainSpec spec = ChainSpec::chain(2, 0.78, 0.13, 0.5);
  const AttractorSet a = bistability_scan(spec, 6, 11, ProbeSettings{});
  const AttractorSet b = bistability_scan(spec, 6, 11, ProbeSettings{});
  CHECK(a.region_label() == b.region_label());
  REQUIRE(a.attractors.size() == b.attractors.size());
  for (std::size_t i = 0; i < a.attractors.size(); ++i) {
    CHECK(a.attractors[i].count == b.attractors[i].count);
    CHECK(a.attractors[i].representative_state == b.attractors[i].representative_state);
  }
  CHECK(a.contains("0:1-m"));
  CHECK_FALSE(a.contains("1:1-s"));
}

TEST_CASE("pitchfork of the subthreshold OEEO orbits") {
  using K = PitchforkBranch::Kind;
  const ChainSpec base = ChainSpec::chain(2, 0.78, 0.1, 0.5);
  const auto rows = pitchfork_diagram(base, {0.10, 0.13, 0.15});
  REQUIRE(rows.size() == 12);

  const auto& sync_lo = branch(rows, 0.10, K::Synchronous);
  CHECK(sync_lo.found);
  CHECK(sync_lo.stable);
  CHECK(std::abs(sync_lo.phase_difference) < 1e-6);
  CHECK_FALSE(branch(rows, 0.10, K::AntiPhase).stable);
  CHECK_FALSE(branch(rows, 0.10, K::MixedPlus).found);

  const auto& plus = branch(rows, 0.13, K::MixedPlus);
  const auto& minus = branch(rows, 0.13, K::MixedMinus);
  REQUIRE(plus.found);
  REQUIRE(minus.found);
  CHECK(plus.stable);
  CHECK(minus.stable);
  CHECK(std::abs(plus.phase_difference) > 0.5);
  CHECK(std::abs(plus.phase_difference) < kPi - 0.5);
  CHECK(std::abs(plus.phase_difference + minus.phase_difference) < 1e-6);
  CHECK(plus.period == doctest::Approx(minus.period).epsilon(1e-8));
  CHECK_FALSE(branch(rows, 0.13, K::Synchronous).stable);
  const auto& anti_mid = branch(rows, 0.13, K::AntiPhase);
  CHECK(anti_mid.found);
  CHECK_FALSE(anti_mid.stable);

  const auto& anti_hi = branch(rows, 0.15, K::AntiPhase);
  CHECK(anti_hi.found);
  CHECK(anti_hi.stable);
  CHECK(std::abs(std::abs(anti_hi.phase_difference) - kPi) < 1e-6);
  CHECK_FALSE(branch(rows, 0.15, K::Synchronous).stable);
}

TEST_CASE("pitchfork rejects chains without the exchange symmetry") {
  ChainSpec spec = ChainSpec::chain(2, 0.78, 0.1, 0.5);
  spec.d = 0.05;
  CHECK_THROWS_AS(pitchfork_diagram(spec, {0.1}), std::invalid_argument);
  CHECK_THROWS_AS(pitchfork_diagram(ChainSpec::oe_pair(0.5, 0.1), {0.1}), std::invalid_argument);
}

TEST_CASE("firing ratio predicates allow one spike of slack") {
  ProbeResult r;
  r.firing_counts = {101, 50};
  CHECK(predicates::ratio_at_least(0.5)(r));
  CHECK_FALSE(predicates::ratio_above(0.5)(r));
  r.firing_counts = {101, 40};
  CHECK_FALSE(predicates::ratio_at_least(0.5)(r));
  r.firing_counts = {101, 60};
  CHECK(predicates::ratio_above(0.5)(r));
  r.firing_counts = {2, 2};
  CHECK_FALSE(predicates::ratio_at_least(0.5)(r));
}

TEST_CASE("pairwise offsets use circular distance") {
  CHECK(min_pairwise_offset({0.1}) == std::numeric_limits<double>::infinity());
  CHECK(max_pairwise_offset({0.1}) == 0.0);
  const std::vector<double> offs{3.1, -3.1, 0.0};
  CHECK(min_pairwise_offset(offs) == doctest::Approx(kTwoPi - 6.2));
  CHECK(max_pairwise_offset(offs) == doctest::Approx(3.1));
}
