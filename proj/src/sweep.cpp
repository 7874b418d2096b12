#include "activemedia/sweep.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <numeric>
#include <optional>
#include <iostream>
#include <limits>
#include <stdexcept>

namespace activemedia {

void normalize_state(const PhaseChain&, std::vector<double>& state) {
  for (double& v : state) v = wrap_two_pi(v);
}

namespace predicates {

// Cell 0 is x and cell 1 is y_1 in every chain layout.
ProbePredicate excitable_fires() {
  return [](const ProbeResult& r) { return r.firing_counts.at(1) > 0; };
}

ProbePredicate one_to_one() {
  return [](const ProbeResult& r) {
    const auto x = static_cast<long long>(r.firing_counts.at(0));
    const auto y = static_cast<long long>(r.firing_counts.at(1));
    return x >= 3 && std::llabs(x - y) <= 1;
  };
}

ProbePredicate fixed_point() {
  return [](const ProbeResult& r) { return r.firing_counts.at(0) < 2; };
}

ProbePredicate ratio_at_least(double q) {
  return [q](const ProbeResult& r) {
    const auto x = static_cast<double>(r.firing_counts.at(0));
    return x >= 3 && static_cast<double>(r.firing_counts.at(1)) >= q * x - 1.0;
  };
}

ProbePredicate ratio_above(double q) {
  return [q](const ProbeResult& r) {
    const auto x = static_cast<double>(r.firing_counts.at(0));
    return x >= 3 && static_cast<double>(r.firing_counts.at(1)) > q * x + 1.0;
  };
}

ProbePredicate pattern_is(int n, int m, Relation relation) {
  return [=](const ProbeResult& r) {
    if (!r.classified || !r.pattern.ratio_locked) return false;
    const LockPattern red = r.pattern.reduced();
    LockPattern want;
    want.n = n;
    want.m = m;
    want = want.reduced();
    return red.n == want.n && red.m == want.m && r.pattern.relation == relation;
  };
}

}  // namespace predicates

PhaseState default_initial(const ChainSpec& spec) { return rest_state(spec); }

namespace {

std::string label_of(const ProbeResult& r) { return r.classified ? r.pattern.label() : "unclassified"; }

}  // namespace

BoundaryCurve trace_boundary(const SpecFamily& family, const ProbePredicate& predicate,
                             const BoundaryOptions& options, const InitialProtocol& initial, std::string name) {
  if (!(options.c_eo_hi > options.c_eo_lo) || !(options.tol > 0.0)) {
    throw std::invalid_argument("trace_boundary: need c_eo_hi > c_eo_lo and tol > 0");
  }
  const std::size_t n = options.c_oe_grid.size();
  std::vector<std::optional<BoundaryPoint>> found(n);

  parallel_for(n, [&](std::size_t i) {
    const double c_oe = options.c_oe_grid[i];
    auto run = [&](double c_eo, const std::vector<double>* warm) {
      const ChainSpec spec = family(c_oe, c_eo);
      spec.validate();
      return probe(PhaseChain(spec), warm ? *warm : initial(spec), options.probe);
    };
    double lo = options.c_eo_lo;
    double hi = options.c_eo_hi;
    ProbeResult r_lo = run(lo, nullptr);
    ProbeResult r_hi = run(hi, nullptr);
    const bool p_lo = predicate(r_lo);
    if (p_lo == predicate(r_hi)) return;
    // Branch mode continues from the lower end, whose state stays on the
    // same side of the flip throughout the bisection.
    while (hi - lo > options.tol) {
      const double mid = 0.5 * (lo + hi);
      const bool warm = options.warm_start == WarmStart::Branch;
      ProbeResult r_mid = run(mid, warm ? &r_lo.final_state : nullptr);
      if (predicate(r_mid) == p_lo) {
        lo = mid;
        r_lo = std::move(r_mid);
      } else {
        hi = mid;
        r_hi = std::move(r_mid);
      }
    }
    found[i] = BoundaryPoint{c_oe, 0.5 * (lo + hi), label_of(r_lo), label_of(r_hi)};
  });

  BoundaryCurve curve;
  curve.name = std::move(name);
  for (std::size_t i = 0; i < n; ++i) {
    if (found[i]) {
      curve.points.push_back(*found[i]);
    } else {
      curve.omitted.push_back(options.c_oe_grid[i]);
      std::cerr << "trace_boundary" << (curve.name.empty() ? "" : " [" + curve.name + "]")
                << ": no predicate flip at c_oe = " << options.c_oe_grid[i] << ", point omitted\n";
    }
  }
  std::sort(curve.points.begin(), curve.points.end(),
            [](const BoundaryPoint& a, const BoundaryPoint& b) { return a.c_oe < b.c_oe; });
  return curve;
}

void HomotopyLine::validate() const {
  if (samples < 2) throw std::invalid_argument("samples: homotopy needs at least 2 samples");
  for (double v : {start.first, start.second, end.first, end.second}) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw std::invalid_argument("homotopy endpoints must lie in [0, 1] x [0, 1]");
    }
  }
}

bool persists(const LockPattern& target, const LockPattern& observed) {
  if (!observed.ratio_locked || observed.relation == Relation::Unlocked ||
      observed.relation == Relation::FixedPoint) {
    return false;
  }
  const LockPattern a = target.reduced();
  const LockPattern b = observed.reduced();
  if (a.n != b.n || a.m != b.m) return false;
  if (target.relation == Relation::Single) return observed.relation == Relation::Single;
  return std::abs(wrap_pi(observed.phase_difference - target.phase_difference)) < kPi / 2.0;
}

std::vector<HeterogeneityPoint> max_heterogeneity(const ChainSpec& base, const HomotopyLine& line,
                                                  const LockPattern& target, const HeterogeneityOptions& options) {
  line.validate();
  if (!(options.d_hi > options.d_lo) || options.d_lo < 0.0 || !(options.tol > 0.0)) {
    throw std::invalid_argument("max_heterogeneity: need 0 <= d_lo < d_hi and tol > 0");
  }
  const auto samples = static_cast<std::size_t>(line.samples);
  std::vector<HeterogeneityPoint> out(samples);

  parallel_for(samples, [&](std::size_t i) {
    const double p = static_cast<double>(i) / static_cast<double>(samples - 1);
    const auto [c_oe, c_eo] = line.at(p);
    HeterogeneityPoint& pt = out[i];
    pt.p = p;
    pt.c_oe = c_oe;
    pt.c_eo = c_eo;
    ChainSpec spec = base;
    spec.c_oe = c_oe;
    spec.c_eo = c_eo;
    spec.end_frequencies.reset();

    auto run = [&](double d, const std::vector<double>& start) {
      spec.d = d;
      return probe(PhaseChain(spec), start, options.probe);
    };
    auto matches = [&](const ProbeResult& r) { return r.classified && r.pattern.reduced().same_class(target.reduced()); };

    // Locate the target state at the lower end of the d bracket.
    std::vector<std::vector<double>> starts{rest_state(spec, 0.0, 0.0), rest_state(spec, 0.0, kPi)};
    Rng rng(options.seed + 7919 * i);
    for (int k = 0; k < options.search_starts; ++k) {
      std::vector<double> s(spec.dimension());
      for (double& v : s) v = rng.uniform(0.0, kTwoPi);
      starts.push_back(std::move(s));
    }
    std::optional<ProbeResult> anchor;
    for (const auto& s : starts) {
      ProbeResult r = run(options.d_lo, s);
      if (matches(r)) {
        anchor = std::move(r);
        break;
      }
    }
    if (!anchor) return;
    pt.present = true;
    const LockPattern reference = anchor->pattern;

    double lo = options.d_lo;
    double hi = options.d_hi;
    std::vector<double> warm = anchor->final_state;
    ProbeResult r_hi = run(hi, warm);
    if (r_hi.classified && persists(reference, r_hi.pattern)) {
      pt.d_max = hi;
      return;
    }
    while (hi - lo > options.tol) {
      const double mid = 0.5 * (lo + hi);
      ProbeResult r = run(mid, warm);
      if (r.classified && persists(reference, r.pattern)) {
        lo = mid;
        warm = r.final_state;
      } else {
        hi = mid;
      }
    }
    pt.d_max = lo;
  });
  return out;
}

bool AttractorSet::contains(const std::string& label) const {
  return std::any_of(attractors.begin(), attractors.end(),
                     [&](const AttractorEntry& e) { return e.pattern.label() == label; });
}

std::string AttractorSet::region_label() const {
  std::string s;
  for (const auto& e : attractors) {
    if (!s.empty()) s += '|';
    s += e.pattern.label();
  }
  return s.empty() ? "none" : s;
}

std::vector<PhaseState> torus_initials(const ChainSpec& spec, int n_ic, std::uint64_t seed) {
  if (n_ic < 1) throw std::invalid_argument("n_ic: must be at least 1");
  Rng rng(seed);
  std::vector<PhaseState> out(static_cast<std::size_t>(n_ic), PhaseState(spec.dimension()));
  for (auto& s : out) {
    for (double& v : s) v = rng.uniform(0.0, kTwoPi);
  }
  return out;
}

AttractorSet bistability_scan(const ChainSpec& spec, int n_ic, std::uint64_t seed, const ProbeSettings& settings) {
  spec.validate();
  return collect_attractors(PhaseChain(spec), torus_initials(spec, n_ic, seed), settings);
}

std::string to_string(PitchforkBranch::Kind kind) {
  switch (kind) {
    case PitchforkBranch::Kind::Synchronous: return "synchronous";
    case PitchforkBranch::Kind::AntiPhase: return "anti-phase";
    case PitchforkBranch::Kind::MixedPlus: return "mixed+";
    case PitchforkBranch::Kind::MixedMinus: return "mixed-";
  }
  return "unknown";
}

namespace {

// Shooting works on the two-oscillator chain with x pinned to pi, so the
// unknowns are (y_1..y_N, z, tau).
struct Shooter {
  const PhaseChain& sys;
  IntegratorConfig config;
  bool half_swap = false;

  std::size_t n() const { return sys.dimension(); }

  std::vector<double> flow(std::vector<double> u, double t) const {
    advance(sys, u, t, config);
    return u;
  }

  std::vector<double> mirror(const std::vector<double>& u) const { return {u.rbegin(), u.rend()}; }

  std::vector<double> residual(const std::vector<double>& u, double tau) const {
    const std::vector<double> end = flow(u, tau);
    const std::vector<double> ref = half_swap ? mirror(u) : u;
    std::vector<double> r(n());
    for (std::size_t i = 0; i < n(); ++i) {
      const double diff = end[i] - ref[i];
      r[i] = diff - kTwoPi * std::round(diff / kTwoPi);
    }
    return r;
  }
};

std::vector<double> unknowns_to_state(const std::vector<double>& q) {
  std::vector<double> u(q.size());
  u[0] = kPi;
  for (std::size_t i = 1; i < q.size(); ++i) u[i] = q[i - 1];
  return u;
}

/// Time from the start of the orbit to the first firing of the last cell.
double z_offset(const Shooter& sh, const std::vector<double>& u, double period) {
  IntegratorConfig cfg = sh.config;
  cfg.t_transient = 0.0;
  cfg.t_record = period * 1.5;
  cfg.record_states = false;
  const Trajectory tr = integrate(sh.sys, u, cfg);
  const auto& tz = tr.firings.back();
  if (tz.empty()) return 0.0;
  // Newton refinement of the interpolated crossing of z through pi.
  double t_fire = tz.front();
  const std::size_t last = sh.n() - 1;
  std::vector<double> deriv(sh.n());
  for (int it = 0; it < 4; ++it) {
    const std::vector<double> v = sh.flow(u, t_fire);
    const double target = kPi + kTwoPi * std::round((v[last] - kPi) / kTwoPi);
    sh.sys(v, deriv);
    t_fire -= (v[last] - target) / deriv[last];
  }
  return wrap_pi(kTwoPi * t_fire / period);
}

}  // namespace

PeriodicOrbit shoot_orbit(const ChainSpec& spec, std::vector<double> guess, double period_guess, bool half_swap,
                          const PitchforkOptions& options) {
  if (!spec.second_oscillator) throw std::invalid_argument("shoot_orbit: needs both oscillators");
  const PhaseChain sys(spec);
  IntegratorConfig cfg;
  cfg.dt = options.dt;
  Shooter sh{sys, cfg, half_swap};
  const std::size_t n = sh.n();
  if (guess.size() != n) throw std::invalid_argument("shoot_orbit: guess dimension mismatch");

  // Flow the guess forward until x crosses pi (mod 2 pi), then refine the
  // crossing by secant steps.
  {
    const double target = kPi + kTwoPi * std::floor((guess[0] - kPi) / kTwoPi) + kTwoPi;
    std::vector<double> prev = guess;
    for (int k = 0; k < 1000000 && guess[0] < target; ++k) {
      prev = guess;
      guess = sh.flow(guess, cfg.dt);
    }
    double h = cfg.dt * (target - prev[0]) / (guess[0] - prev[0]);
    for (int it = 0; it < 3; ++it) {
      guess = sh.flow(prev, h);
      std::vector<double> deriv(n);
      sys(guess, deriv);
      h -= (guess[0] - target) / deriv[0];
    }
  }

  std::vector<double> q(n);
  for (std::size_t i = 1; i < n; ++i) q[i - 1] = wrap_two_pi(guess[i]);
  q[n - 1] = half_swap ? 0.5 * period_guess : period_guess;

  PeriodicOrbit orbit;
  auto eval = [&](const std::vector<double>& qq) {
    return sh.residual(unknowns_to_state(qq), qq[n - 1]);
  };
  std::vector<double> r = eval(q);
  const double h = 1e-7;
  for (int iter = 0; iter < options.newton_max_iter; ++iter) {
    double norm = 0.0;
    for (double v : r) norm = std::max(norm, std::abs(v));
    orbit.residual = norm;
    if (norm < options.newton_tol) {
      orbit.converged = true;
      break;
    }
    Eigen::MatrixXd jac(n, n);
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<double> qp = q;
      qp[j] += h;
      const std::vector<double> rp = eval(qp);
      for (std::size_t i = 0; i < n; ++i) jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (rp[i] - r[i]) / h;
    }
    Eigen::VectorXd rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs(static_cast<Eigen::Index>(i)) = -r[i];
    const Eigen::VectorXd delta = jac.fullPivLu().solve(rhs);
    if (!delta.allFinite()) break;
    // Damped update: halve until the residual decreases.
    double lambda = 1.0;
    bool accepted = false;
    for (int k = 0; k < 12; ++k) {
      std::vector<double> qn = q;
      for (std::size_t i = 0; i < n; ++i) qn[i] += lambda * delta(static_cast<Eigen::Index>(i));
      if (qn[n - 1] <= 0.0) {
        lambda *= 0.5;
        continue;
      }
      std::vector<double> rn = eval(qn);
      double nn = 0.0;
      for (double v : rn) nn = std::max(nn, std::abs(v));
      if (nn < norm) {
        q = std::move(qn);
        r = std::move(rn);
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) break;
  }
  if (!orbit.converged) {
    double norm = 0.0;
    for (double v : r) norm = std::max(norm, std::abs(v));
    orbit.residual = norm;
    orbit.converged = norm < options.newton_tol;
  }

  orbit.state = unknowns_to_state(q);
  orbit.period = half_swap ? 2.0 * q[n - 1] : q[n - 1];

  // Monodromy over the full period by finite differences.
  const std::vector<double> base = sh.flow(orbit.state, orbit.period);
  Eigen::MatrixXd mono(n, n);
  const double eps = 1e-7;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> u = orbit.state;
    u[j] += eps;
    const std::vector<double> e = sh.flow(u, orbit.period);
    for (std::size_t i = 0; i < n; ++i) mono(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (e[i] - base[i]) / eps;
  }
  const Eigen::EigenSolver<Eigen::MatrixXd> solver(mono, false);
  for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) orbit.multipliers.push_back(solver.eigenvalues()(k));
  orbit.phase_difference = z_offset(sh, orbit.state, orbit.period);
  return orbit;
}

namespace {

double max_nontrivial_multiplier(const PeriodicOrbit& orbit) {
  std::size_t trivial = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < orbit.multipliers.size(); ++k) {
    const double dist = std::abs(orbit.multipliers[k] - 1.0);
    if (dist < best) {
      best = dist;
      trivial = k;
    }
  }
  double m = 0.0;
  for (std::size_t k = 0; k < orbit.multipliers.size(); ++k) {
    if (k != trivial) m = std::max(m, std::abs(orbit.multipliers[k]));
  }
  return m;
}

PitchforkBranch to_branch(PitchforkBranch::Kind kind, double c_eo, const PeriodicOrbit& orbit) {
  PitchforkBranch b;
  b.kind = kind;
  b.c_eo = c_eo;
  b.found = orbit.converged;
  if (!orbit.converged) return b;
  b.phase_difference = orbit.phase_difference;
  b.period = orbit.period;
  b.max_multiplier = max_nontrivial_multiplier(orbit);
  b.stable = b.max_multiplier < 1.0 - 1e-6;
  return b;
}

}  // namespace

std::vector<PitchforkBranch> pitchfork_diagram(const ChainSpec& base, const std::vector<double>& c_eo_values,
                                               const PitchforkOptions& options) {
  if (!base.second_oscillator || base.omega_x() != base.omega_z()) {
    throw std::invalid_argument("pitchfork_diagram: requires a two-oscillator chain with d = 0");
  }
  IntegratorConfig cfg;
  cfg.dt = options.dt;
  const double tol_rel = 0.05;
  // The half-swap condition is also met by orbits that return to their mirror
  // image after a full period; those are not anti-phase.
  const auto is_anti = [&](const PeriodicOrbit& o, double period_guess) {
    return o.converged && std::abs(o.phase_difference) > kPi - tol_rel && o.period < 1.5 * period_guess;
  };
  const auto is_mixed = [&](const PeriodicOrbit& o) {
    const double off = std::abs(o.phase_difference);
    return o.converged && off > tol_rel && off < kPi - tol_rel;
  };

  // Anti-phase orbits are continued downwards in c_eo from where they attract.
  std::vector<std::size_t> order(c_eo_values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return c_eo_values[a] > c_eo_values[b]; });

  std::vector<std::array<PitchforkBranch, 4>> rows(c_eo_values.size());
  std::optional<PeriodicOrbit> last_anti;
  for (std::size_t i : order) {
    ChainSpec spec = base;
    spec.c_eo = c_eo_values[i];
    spec.validate();
    const PhaseChain sys(spec);
    const double t_guess = kTwoPi / std::sqrt(std::max(1e-6, 1.0 - spec.c_oe * spec.c_oe));
    auto& row = rows[i];

    // Synchronous orbit: symmetric data stays on the synchrony manifold.
    std::vector<double> sync = rest_state(spec, 0.0, 0.0);
    advance(sys, sync, 200.0, cfg);
    const PeriodicOrbit sync_orbit = shoot_orbit(spec, sync, t_guess, false, options);
    row[0] = to_branch(PitchforkBranch::Kind::Synchronous, spec.c_eo, sync_orbit);
    const double period_guess = sync_orbit.converged ? sync_orbit.period : t_guess;

    std::vector<double> anti = rest_state(spec, 0.0, kPi);
    advance(sys, anti, options.settle, cfg);
    PeriodicOrbit anti_orbit = shoot_orbit(spec, anti, period_guess, true, options);
    if (!is_anti(anti_orbit, period_guess) && last_anti) {
      anti_orbit = shoot_orbit(spec, last_anti->state, last_anti->period, true, options);
    }
    row[1] = to_branch(PitchforkBranch::Kind::AntiPhase, spec.c_eo, anti_orbit);
    if (is_anti(anti_orbit, period_guess)) {
      last_anti = anti_orbit;
    } else {
      row[1].found = false;
    }

    // Mixed orbits: settle from an asymmetric start; the partner orbit is
    // sought from the mirror image of the first.
    std::vector<double> u = rest_state(spec, 0.0, 1.0);
    advance(sys, u, options.settle, cfg);
    const PeriodicOrbit plus = shoot_orbit(spec, u, period_guess, false, options);
    row[2] = to_branch(PitchforkBranch::Kind::MixedPlus, spec.c_eo, plus);
    row[3] = PitchforkBranch{PitchforkBranch::Kind::MixedMinus, spec.c_eo};
    if (is_mixed(plus)) {
      const std::vector<double> mirrored(plus.state.rbegin(), plus.state.rend());
      row[3] = to_branch(PitchforkBranch::Kind::MixedMinus, spec.c_eo,
                         shoot_orbit(spec, mirrored, plus.period, false, options));
    } else {
      row[2].found = false;
    }
  }

  std::vector<PitchforkBranch> out;
  for (auto& row : rows) out.insert(out.end(), row.begin(), row.end());
  return out;
}

std::vector<LongChainRun> long_chain_runs(const ChainSpec& spec, const std::vector<std::uint64_t>& seeds,
                                          const ProbeSettings& settings) {
  spec.validate();
  if (!spec.second_oscillator) throw std::invalid_argument("long_chain_runs: needs both oscillators");
  const PhaseChain sys(spec);
  std::vector<LongChainRun> runs(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t i) {
    Rng rng(seeds[i]);
    LongChainRun& run = runs[i];
    run.seed = seeds[i];
    run.x0 = rng.uniform(0.0, kTwoPi);
    run.z0 = rng.uniform(0.0, kTwoPi);
    const ProbeResult r = probe(sys, rest_state(spec, run.x0, run.z0), settings);
    run.classified = r.classified;
    run.pattern = r.pattern;
  });
  return runs;
}

double min_pairwise_offset(const std::vector<double>& offsets) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    for (std::size_t j = i + 1; j < offsets.size(); ++j) best = std::min(best, std::abs(wrap_pi(offsets[i] - offsets[j])));
  }
  return best;
}

double max_pairwise_offset(const std::vector<double>& offsets) {
  double worst = 0.0;
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    for (std::size_t j = i + 1; j < offsets.size(); ++j) worst = std::max(worst, std::abs(wrap_pi(offsets[i] - offsets[j])));
  }
  return worst;
}

}  // namespace activemedia
