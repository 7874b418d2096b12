#include "activemedia/analysis.hpp"

#include <algorithm>
#include <complex>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace activemedia {

std::string to_string(Relation r) {
  switch (r) {
    case Relation::Synchronous: return "synchronous";
    case Relation::AntiPhase: return "anti-phase";
    case Relation::Mixed: return "mixed";
    case Relation::Unlocked: return "unlocked";
    case Relation::FixedPoint: return "fixed-point";
    case Relation::Single: return "single";
  }
  return "unknown";
}

std::string suffix(Relation r) {
  switch (r) {
    case Relation::Synchronous: return "s";
    case Relation::AntiPhase: return "a";
    case Relation::Mixed: return "m";
    case Relation::Unlocked: return "u";
    case Relation::FixedPoint: return "fp";
    case Relation::Single: return "o";
  }
  return "?";
}

Relation relation_from_string(const std::string& s) {
  for (Relation r : {Relation::Synchronous, Relation::AntiPhase, Relation::Mixed, Relation::Unlocked,
                     Relation::FixedPoint, Relation::Single}) {
    if (s == to_string(r) || s == suffix(r)) return r;
  }
  throw std::invalid_argument("unknown relation '" + s + "'");
}

std::string LockPattern::label() const {
  std::ostringstream os;
  if (relation == Relation::FixedPoint) return "0:0";
  if (ratio_locked || m > 0) {
    os << n << ':' << m;
  } else {
    os << "q" << firing_ratio;
  }
  if (relation != Relation::Single) os << '-' << suffix(relation);
  return os.str();
}

LockPattern pattern_from_label(const std::string& label) {
  LockPattern p;
  p.ratio_locked = true;
  if (label == "0:0") {
    p.n = 0;
    p.m = 0;
    p.relation = Relation::FixedPoint;
    return p;
  }
  const auto colon = label.find(':');
  const auto dash = label.find('-', colon == std::string::npos ? 0 : colon);
  const std::string bad = "pattern_from_label: cannot parse '" + label + "'";
  if (colon == std::string::npos || colon == 0) throw std::invalid_argument(bad);
  try {
    std::size_t used = 0;
    p.n = std::stoi(label.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument(bad);
    const std::string m_text = label.substr(colon + 1, dash == std::string::npos ? std::string::npos : dash - colon - 1);
    p.m = std::stoi(m_text, &used);
    if (used != m_text.size()) throw std::invalid_argument(bad);
  } catch (const std::logic_error&) {
    throw std::invalid_argument(bad);
  }
  if (p.n < 0 || p.m < 1) throw std::invalid_argument(bad);
  p.relation = dash == std::string::npos ? Relation::Single : relation_from_string(label.substr(dash + 1));
  p.firing_ratio = static_cast<double>(p.n) / p.m;
  return p;
}

LockPattern LockPattern::reduced() const {
  LockPattern r = *this;
  const int g = std::gcd(n, m);
  if (g > 1) {
    r.n /= g;
    r.m /= g;
  }
  return r;
}

std::optional<std::pair<int, int>> rational_approximation(double value, int max_den, double tol) {
  // The first denominator that fits is already in lowest terms.
  for (int q = 1; q <= max_den; ++q) {
    const int p = static_cast<int>(std::lround(value * q));
    if (std::abs(value - static_cast<double>(p) / q) <= tol) return std::make_pair(p, q);
  }
  return std::nullopt;
}

namespace {

std::size_t count_in(const std::vector<double>& events, double lo, double hi) {
  const auto a = std::lower_bound(events.begin(), events.end(), lo);
  const auto b = std::lower_bound(events.begin(), events.end(), hi);
  return static_cast<std::size_t>(b - a);
}

struct CircularStats {
  double mean = 0.0;
  double spread = 0.0;
};

CircularStats circular_stats(const std::vector<double>& angles) {
  std::complex<double> s(0.0, 0.0);
  for (double a : angles) s += std::polar(1.0, a);
  s /= static_cast<double>(angles.size());
  const double r = std::min(1.0, std::abs(s));
  return {std::arg(s), r >= 1.0 ? 0.0 : std::sqrt(-2.0 * std::log(r))};
}

}  // namespace

LockPattern classify_locking(const Trajectory& trajectory, const ChainLayout& layout,
                             const ClassifyTolerances& tol) {
  LockPattern pattern;
  const auto& tx = trajectory.firings.at(layout.x);
  if (tx.size() < 3) {
    pattern.n = 0;
    pattern.m = 0;
    pattern.relation = Relation::FixedPoint;
    pattern.ratio_locked = true;
    pattern.excitable_rates.assign(layout.excitable.size(), 0.0);
    return pattern;
  }
  const std::size_t cycles = tx.size() - 1;
  if (cycles < static_cast<std::size_t>(2 * tol.max_denominator)) {
    throw std::invalid_argument("classify_locking: window holds " + std::to_string(cycles) +
                                " oscillator cycles, need at least " +
                                std::to_string(2 * tol.max_denominator));
  }
  const double window = tx.back() - tx.front();
  const double mean_period = window / static_cast<double>(cycles);

  const std::vector<double> empty;
  const auto& t_ref = layout.excitable.empty() ? empty : trajectory.firings.at(layout.excitable.front());
  const auto* tz = layout.z ? &trajectory.firings.at(*layout.z) : nullptr;

  // Cycle windows open slightly before each x spike so that spikes coincident
  // with it (exact synchrony) are always counted in the same cycle.
  const double slack = 1e-6 * mean_period;
  std::vector<std::size_t> e_count(cycles), z_count(cycles);
  std::vector<double> isi(cycles);
  for (std::size_t k = 0; k < cycles; ++k) {
    isi[k] = tx[k + 1] - tx[k];
    e_count[k] = count_in(t_ref, tx[k] - slack, tx[k + 1] - slack);
    z_count[k] = tz ? count_in(*tz, tx[k] - slack, tx[k + 1] - slack) : 0;
  }
  for (std::size_t e : layout.excitable) {
    pattern.excitable_rates.push_back(static_cast<double>(count_in(trajectory.firings.at(e), tx.front(), tx.back())) /
                                      static_cast<double>(cycles));
  }
  const double total_e = static_cast<double>(std::accumulate(e_count.begin(), e_count.end(), std::size_t{0}));
  pattern.firing_ratio = total_e / static_cast<double>(cycles);

  // Period of the per-cycle sequence over the second half of the window.
  const std::size_t tail = cycles - cycles / 2;
  const std::size_t first = cycles - tail;
  int period = 0;
  for (int p = 1; p <= tol.max_denominator; ++p) {
    const auto up = static_cast<std::size_t>(p);
    if (tail < 2 * up) break;
    bool ok = true;
    for (std::size_t k = first; k + up < cycles && ok; ++k) {
      ok = e_count[k] == e_count[k + up] && z_count[k] == z_count[k + up] &&
           std::abs(isi[k] - isi[k + up]) <= tol.isi_rel * mean_period;
    }
    if (ok) {
      period = p;
      break;
    }
  }
  if (period > 0) {
    pattern.ratio_locked = true;
    pattern.m = period;
    pattern.n = static_cast<int>(
        std::accumulate(e_count.end() - period, e_count.end(), std::size_t{0}));
  } else {
    pattern.ratio_locked = false;
    const auto approx = rational_approximation(pattern.firing_ratio, tol.max_denominator,
                                               1.0 / (2.0 * static_cast<double>(cycles)));
    if (approx) {
      pattern.n = approx->first;
      pattern.m = approx->second;
    } else {
      pattern.n = 0;
      pattern.m = 0;
    }
  }

  if (!tz) {
    pattern.relation = Relation::Single;
    return pattern;
  }
  if (tz->size() < 3) {
    pattern.relation = Relation::Unlocked;
    return pattern;
  }

  // Offsets of the nearest z spike from each x spike, in units of the mean
  // oscillator period.
  std::vector<double> offsets;
  std::vector<std::size_t> cycle_index;
  for (std::size_t k = first; k <= cycles; ++k) {
    const double t = tx[k];
    const auto it = std::lower_bound(tz->begin(), tz->end(), t);
    double best = std::numeric_limits<double>::infinity();
    if (it != tz->end()) best = *it - t;
    if (it != tz->begin() && std::abs(*(it - 1) - t) < std::abs(best)) best = *(it - 1) - t;
    offsets.push_back(wrap_pi(kTwoPi * best / mean_period));
    cycle_index.push_back(k);
  }

  const auto all_within = [&](double centre) {
    return std::all_of(offsets.begin(), offsets.end(),
                       [&](double o) { return std::abs(wrap_pi(o - centre)) <= tol.sync; });
  };
  const CircularStats overall = circular_stats(offsets);
  pattern.phase_difference = wrap_pi(overall.mean);
  if (all_within(0.0)) {
    pattern.relation = Relation::Synchronous;
    return pattern;
  }
  if (all_within(kPi)) {
    pattern.relation = Relation::AntiPhase;
    return pattern;
  }
  const std::size_t classes = static_cast<std::size_t>(std::max(period, 1));
  bool stationary = true;
  for (std::size_t r = 0; r < classes && stationary; ++r) {
    std::vector<double> group;
    for (std::size_t i = 0; i < offsets.size(); ++i) {
      if (cycle_index[i] % classes == r) group.push_back(offsets[i]);
    }
    if (group.size() < 2) continue;
    stationary = circular_stats(group).spread < tol.mixed_std;
  }
  pattern.relation = stationary ? Relation::Mixed : Relation::Unlocked;
  return pattern;
}

namespace {

// Longest time spent looking for the next section crossing.
double window_guard(const RotationOptions& options) { return 0.25 * (options.horizon - options.t_transient); }

}  // namespace

RotationEstimate rotation_number(const ChainSpec& spec, const RotationOptions& options,
                                 std::optional<PhaseState> initial) {
  spec.validate();
  if (!(options.horizon > options.t_transient) || !(options.tol > 0.0)) {
    throw std::invalid_argument("rotation_number: need horizon > t_transient and tol > 0");
  }
  const PhaseChain system(spec);
  PhaseState state = initial ? *initial : rest_state(spec);
  if (state.size() != spec.dimension()) throw std::invalid_argument("rotation_number: initial state dimension mismatch");
  IntegratorConfig config;
  config.dt = options.dt;
  advance(system, state, options.t_transient, config);
  // Sample at x = 0 (mod 2*pi) so locked orbits are measured at a fixed phase.
  const auto to_section = [&](PhaseState& s) {
    const double target = kTwoPi * (std::floor(s[0] / kTwoPi) + 1.0);
    const double limit = 4.0 * window_guard(options);
    double elapsed = 0.0;
    PhaseState prev = s;
    while (s[0] < target && elapsed < limit) {
      prev = s;
      advance(system, s, config.dt, config);
      elapsed += config.dt;
    }
    if (s[0] < target) return;  // x has stalled; leave the state as is
    std::vector<double> rate(s.size());
    double h = config.dt * (target - prev[0]) / (s[0] - prev[0]);
    for (int it = 0; it < 3; ++it) {
      s = prev;
      advance(system, s, h, config);
      system(s, rate);
      if (rate[0] <= 0.0) break;
      h -= (s[0] - target) / rate[0];
    }
  };
  to_section(state);
  const PhaseState a = state;
  const double window = options.horizon - options.t_transient;
  advance(system, state, 0.75 * window, config);
  to_section(state);
  const PhaseState q = state;
  advance(system, state, 0.25 * window, config);
  to_section(state);

  RotationEstimate est;
  const double dx_full = state[0] - a[0];
  const double dx_tail = state[0] - q[0];
  if (dx_tail < kTwoPi) {
    est.fixed_point = true;
    est.rho = 0.0;
    est.half_width = 0.0;
    est.converged = true;
    return est;
  }
  est.rho = (state[1] - a[1]) / dx_full;
  const double rho_tail = (state[1] - q[1]) / dx_tail;
  est.half_width = std::abs(est.rho - rho_tail);
  est.converged = est.half_width < options.tol;
  return est;
}

ChainSpec synchrony_reduction(const ChainSpec& spec) {
  if (!spec.second_oscillator) throw std::invalid_argument("synchrony_reduction: chain needs both oscillators");
  if (spec.omega_x() != spec.omega_z()) throw std::invalid_argument("synchrony_reduction: requires d = 0");
  if (spec.n_excitable > 2) {
    throw std::invalid_argument("synchrony_reduction: only OEO and OEEO chains reduce to the OE pair");
  }
  ChainSpec reduced = ChainSpec::oe_pair(spec.c_oe, spec.n_excitable == 1 ? 2.0 * spec.c_eo : spec.c_eo,
                                         spec.omega_x(), spec.b);
  reduced.second_harmonic = spec.second_harmonic;
  return reduced;
}

SynchronyRun synchrony_manifold_run(const ChainSpec& spec, const RotationOptions& options) {
  SynchronyRun run;
  run.reduced = synchrony_reduction(spec);
  IntegratorConfig config;
  config.dt = options.dt;
  config.t_transient = options.t_transient;
  config.t_record = options.horizon - options.t_transient;
  config.sample_interval = 0.1;
  run.trajectory = integrate(PhaseChain(run.reduced), rest_state(run.reduced), config);
  run.rotation = rotation_number(run.reduced, options);
  return run;
}

namespace {

double point_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = std::abs(a[i] - b[i]);
    const double wrapped = std::min(diff, std::abs(kTwoPi - diff));
    d = std::max(d, wrapped);
  }
  return d;
}

}  // namespace

bool has_cycle(const std::vector<std::vector<double>>& points, int max_period, double tol) {
  for (int q = 1; q <= max_period; ++q) {
    const auto uq = static_cast<std::size_t>(q);
    if (points.size() <= 2 * uq) continue;
    bool cyclic = true;
    for (std::size_t i = 0; i + uq < points.size() && cyclic; ++i) {
      cyclic = point_distance(points[i], points[i + uq]) < tol;
    }
    if (cyclic) return true;
  }
  return false;
}

std::size_t distinct_points(const std::vector<std::vector<double>>& points, double tol) {
  std::vector<const std::vector<double>*> kept;
  for (const auto& p : points) {
    const bool seen = std::any_of(kept.begin(), kept.end(),
                                  [&](const std::vector<double>* k) { return point_distance(*k, p) < tol; });
    if (!seen) kept.push_back(&p);
  }
  return kept.size();
}

}  // namespace activemedia
