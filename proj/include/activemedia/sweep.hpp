#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "activemedia/analysis.hpp"
#include "activemedia/integrator.hpp"
#include "activemedia/parallel.hpp"
#include "activemedia/phase_model.hpp"

namespace activemedia {

/// Seeded generator with a platform-independent uniform draw.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

struct ProbeSettings {
  IntegratorConfig integrator = IntegratorConfig::phase_defaults();
  ClassifyTolerances tolerances;
};

struct ProbeResult {
  LockPattern pattern;
  /// False when the window was too short to classify.
  bool classified = false;
  std::vector<std::size_t> firing_counts;
  std::vector<double> final_state;
};

template <class S>
void normalize_state(const S&, std::vector<double>&) {}
/// Reduces every phase mod 2*pi; the chain vector field is 2*pi-periodic in each coordinate.
void normalize_state(const PhaseChain&, std::vector<double>& state);

/// Integrates from `initial` and classifies the recorded window.
template <DynamicalSystem S>
ProbeResult probe(const S& sys, std::vector<double> initial, const ProbeSettings& settings) {
  IntegratorConfig config = settings.integrator;
  config.record_states = false;
  const Trajectory traj = integrate(sys, std::move(initial), config);
  ProbeResult result;
  for (const auto& f : traj.firings) result.firing_counts.push_back(f.size());
  result.final_state = traj.final_state;
  normalize_state(sys, result.final_state);
  try {
    result.pattern = classify_locking(traj, sys.layout(), settings.tolerances);
    result.classified = true;
  } catch (const std::invalid_argument&) {
    result.classified = false;
    result.pattern.relation = Relation::Unlocked;
  }
  return result;
}

using SpecFamily = std::function<ChainSpec(double c_oe, double c_eo)>;
using ProbePredicate = std::function<bool(const ProbeResult&)>;
using InitialProtocol = std::function<PhaseState(const ChainSpec&)>;

namespace predicates {
/// Reference E cell fires at least once in the window.
ProbePredicate excitable_fires();
/// Reference E cell fires once per oscillator cycle.
ProbePredicate one_to_one();
/// Oscillator x completes fewer than two cycles in the window.
ProbePredicate fixed_point();
/// E firings per oscillator cycle reach q (up to one spike of window slack).
ProbePredicate ratio_at_least(double q);
/// E firings per oscillator cycle exceed q by more than one spike of slack.
ProbePredicate ratio_above(double q);
ProbePredicate pattern_is(int n, int m, Relation relation);
}  // namespace predicates

enum class WarmStart { Cold, Branch };

struct BoundaryOptions {
  std::vector<double> c_oe_grid;
  double c_eo_lo = 0.0;
  double c_eo_hi = 1.0;
  double tol = 1e-3;
  WarmStart warm_start = WarmStart::Branch;
  ProbeSettings probe;
};

struct BoundaryPoint {
  double c_oe = 0.0;
  double c_eo = 0.0;
  std::string below_label;
  std::string above_label;
};

struct BoundaryCurve {
  std::string name;
  std::vector<BoundaryPoint> points;
  /// Grid values where the predicate did not flip across the bracket.
  std::vector<double> omitted;
};

/// Synchronous rest start (x = z = 0, E cells at rest).
PhaseState default_initial(const ChainSpec& spec);

/// Bisects in c_eo for each c_oe on the grid. Points are ordered by c_oe.
BoundaryCurve trace_boundary(const SpecFamily& family, const ProbePredicate& predicate,
                             const BoundaryOptions& options, const InitialProtocol& initial = default_initial,
                             std::string name = {});

struct HomotopyLine {
  std::pair<double, double> start;
  std::pair<double, double> end;
  int samples = 25;

  void validate() const;
  std::pair<double, double> at(double p) const {
    return {start.first + p * (end.first - start.first), start.second + p * (end.second - start.second)};
  }
  bool operator==(const HomotopyLine&) const = default;
};

struct HeterogeneityOptions {
  double d_lo = 0.0;
  double d_hi = 0.5;
  double tol = 1e-3;
  ProbeSettings probe;
  /// Random starts tried when neither the synchronous nor anti-phase start
  /// reaches the target pattern at d = 0.
  int search_starts = 32;
  std::uint64_t seed = 1;
};

struct HeterogeneityPoint {
  double p = 0.0;
  double c_oe = 0.0;
  double c_eo = 0.0;
  double d_max = 0.0;
  bool present = false;
};

/// Whether `observed` is still the locked state `target` (same n:m, offset
/// stationary and on the same side of +/- pi/2).
bool persists(const LockPattern& target, const LockPattern& observed);

/// d_max(p) along the line: the largest detuning keeping `target` locked.
std::vector<HeterogeneityPoint> max_heterogeneity(const ChainSpec& base, const HomotopyLine& line,
                                                  const LockPattern& target, const HeterogeneityOptions& options);

struct AttractorEntry {
  LockPattern pattern;
  int count = 0;
  double basin_fraction = 0.0;
  std::vector<double> representative_state;
};

struct AttractorSet {
  int n_ic = 0;
  int unclassified = 0;
  std::vector<AttractorEntry> attractors;

  bool contains(const std::string& label) const;
  /// Labels joined with '|', in discovery order.
  std::string region_label() const;
};

/// Probes `initials` and groups the outcomes by LockPattern::same_class.
template <DynamicalSystem S>
AttractorSet collect_attractors(const S& sys, const std::vector<std::vector<double>>& initials,
                                const ProbeSettings& settings) {
  std::vector<ProbeResult> results(initials.size());
  parallel_for(initials.size(), [&](std::size_t i) { results[i] = probe(sys, initials[i], settings); });
  AttractorSet set;
  set.n_ic = static_cast<int>(initials.size());
  for (auto& r : results) {
    if (!r.classified) {
      ++set.unclassified;
      continue;
    }
    auto it = std::find_if(set.attractors.begin(), set.attractors.end(),
                           [&](const AttractorEntry& e) { return e.pattern.same_class(r.pattern); });
    if (it == set.attractors.end()) {
      set.attractors.push_back({r.pattern, 1, 0.0, r.final_state});
    } else {
      ++it->count;
    }
  }
  for (auto& e : set.attractors) e.basin_fraction = static_cast<double>(e.count) / set.n_ic;
  return set;
}

/// Uniform random phases on the torus.
std::vector<PhaseState> torus_initials(const ChainSpec& spec, int n_ic, std::uint64_t seed);

AttractorSet bistability_scan(const ChainSpec& spec, int n_ic, std::uint64_t seed,
                              const ProbeSettings& settings);

struct PitchforkBranch {
  enum class Kind { Synchronous, AntiPhase, MixedPlus, MixedMinus };
  Kind kind = Kind::Synchronous;
  double c_eo = 0.0;
  bool found = false;
  double phase_difference = 0.0;
  bool stable = false;
  double period = 0.0;
  /// Largest Floquet multiplier modulus after removing the neutral one.
  double max_multiplier = 0.0;
};

std::string to_string(PitchforkBranch::Kind kind);

struct PitchforkOptions {
  double dt = 0.005;
  double settle = 6000.0;
  double newton_tol = 1e-10;
  int newton_max_iter = 30;
};

/// Steps c_eo at fixed c_oe for a d = 0 OEEO chain and reports the
/// synchronous, anti-phase and mixed subthreshold orbits with stability.
std::vector<PitchforkBranch> pitchfork_diagram(const ChainSpec& base, const std::vector<double>& c_eo_values,
                                               const PitchforkOptions& options = {});

struct PeriodicOrbit {
  std::vector<double> state;
  double period = 0.0;
  bool converged = false;
  double residual = 0.0;
  std::vector<std::complex<double>> multipliers;
  double phase_difference = 0.0;
};

/// Newton shooting for a periodic orbit of a two-oscillator chain pinned at
/// x = pi. With `half_swap` the orbit is sought with the anti-phase symmetry
/// (state after half a period equals the mirrored state).
PeriodicOrbit shoot_orbit(const ChainSpec& spec, std::vector<double> guess, double period_guess, bool half_swap,
                          const PitchforkOptions& options = {});

struct LongChainRun {
  std::uint64_t seed = 0;
  bool classified = false;
  LockPattern pattern;
  /// Oscillator phases drawn for this seed.
  double x0 = 0.0;
  double z0 = 0.0;
};

/// One run per seed: oscillators at uniform random phases, E cells at rest.
std::vector<LongChainRun> long_chain_runs(const ChainSpec& spec, const std::vector<std::uint64_t>& seeds,
                                          const ProbeSettings& settings);

/// Smallest circular distance between any two offsets; +inf for fewer than two.
double min_pairwise_offset(const std::vector<double>& offsets);
/// Largest circular distance between any two offsets; 0 for fewer than two.
double max_pairwise_offset(const std::vector<double>& offsets);

}  // namespace activemedia
