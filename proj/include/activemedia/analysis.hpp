#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "activemedia/integrator.hpp"
#include "activemedia/layout.hpp"
#include "activemedia/phase_model.hpp"

namespace activemedia {

/// Asymptotic relation between the two oscillators. `Single` is used when the
/// chain has only one oscillator.
enum class Relation { Synchronous, AntiPhase, Mixed, Unlocked, FixedPoint, Single };

std::string to_string(Relation r);
/// Short suffix used in pattern labels: s, a, m, u, fp, o.
std::string suffix(Relation r);
Relation relation_from_string(const std::string& s);

/// n E-cell firings per m O-cell cycles, with the oscillator phase relation.
///
/// `m` is the detected period of the firing sequence in oscillator cycles, so
/// a period-doubled 1:2 orbit is reported as 2:4; reduced() gives the coprime
/// ratio. When the firing sequence has no period up to the denominator bound,
/// `ratio_locked` is false and (n, m) is the closest small rational to the
/// measured firing ratio.
struct LockPattern {
  int n = 0;
  int m = 1;
  Relation relation = Relation::Unlocked;
  /// Spike-time offset of z relative to x in radians, wrapped to (-pi, pi];
  /// positive when x leads.
  double phase_difference = 0.0;
  bool ratio_locked = false;
  double firing_ratio = 0.0;
  /// Firings per oscillator cycle of each E cell, in chain order.
  std::vector<double> excitable_rates;

  /// "n:m-r"; "q<ratio>-r" when the firing ratio has no small rational form.
  std::string label() const;
  LockPattern reduced() const;
  /// Equality on (n, m, relation); the notion used to tell attractors apart.
  bool same_class(const LockPattern& other) const {
    return n == other.n && m == other.m && relation == other.relation &&
           ratio_locked == other.ratio_locked;
  }
};

/// Inverse of LockPattern::label for "n:m-r", "n:m" (single oscillator) and "0:0".
LockPattern pattern_from_label(const std::string& label);

struct ClassifyTolerances {
  double sync = 0.05;
  double mixed_std = 0.02;
  int max_denominator = 8;
  /// Relative inter-spike-interval tolerance used for period detection.
  double isi_rel = 2e-3;
};

/// Classifies a post-transient trajectory. Throws std::invalid_argument when
/// the window holds fewer than 2 * max_denominator oscillator cycles.
LockPattern classify_locking(const Trajectory& trajectory, const ChainLayout& layout,
                             const ClassifyTolerances& tol = {});

/// Best rational p/q with q <= max_den within tol of value.
std::optional<std::pair<int, int>> rational_approximation(double value, int max_den, double tol);

struct RotationEstimate {
  double rho = 0.0;
  double half_width = 0.0;
  bool converged = false;
  bool fixed_point = false;
};

struct RotationOptions {
  double t_transient = 500.0;
  double horizon = 5000.0;
  double tol = 1e-2;
  double dt = 0.005;
};

/// rho = winding(y_1) / winding(x) over [t_transient, horizon].
RotationEstimate rotation_number(const ChainSpec& spec, const RotationOptions& options = {},
                                 std::optional<PhaseState> initial = std::nullopt);

struct SynchronyRun {
  ChainSpec reduced;
  Trajectory trajectory;
  RotationEstimate rotation;
};

/// OE pair obtained by restricting an OEO (c_eo doubled) or OEEO (c_ee
/// terms vanish) chain to x = z, y_j = y_{N+1-j}.
ChainSpec synchrony_reduction(const ChainSpec& spec);
SynchronyRun synchrony_manifold_run(const ChainSpec& spec, const RotationOptions& options = {});

/// True when some period q <= max_period maps every section point to within
/// tol of the point q hits later (after a transient prefix is skipped by the caller).
bool has_cycle(const std::vector<std::vector<double>>& points, int max_period, double tol);
/// Count of points not within tol of an earlier point.
std::size_t distinct_points(const std::vector<std::vector<double>>& points, double tol);

struct LyapunovOptions {
  double delta0 = 1e-8;
  double renorm_interval = 1.0;
  double t_transient = 500.0;
  double t_window = 2000.0;
  IntegratorConfig integrator = IntegratorConfig::phase_defaults();
};

struct LyapunovEstimate {
  double lambda = 0.0;
  double std_error = 0.0;
  std::vector<double> quarter_means;
};

/// Largest Lyapunov exponent by two-trajectory renormalization.
template <DynamicalSystem S>
LyapunovEstimate lyapunov_exponent(const S& sys, std::vector<double> state, const LyapunovOptions& opt) {
  if (!(opt.delta0 > 0.0) || !(opt.renorm_interval > 0.0) || !(opt.t_window >= opt.renorm_interval)) {
    throw std::invalid_argument("lyapunov_exponent: invalid options");
  }
  advance(sys, state, opt.t_transient, opt.integrator);
  const std::size_t n = state.size();
  std::vector<double> dir(n);
  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    dir[i] = (i % 2 == 0 ? 1.0 : -1.0) * (1.0 + 0.1 * static_cast<double>(i));
    norm += dir[i] * dir[i];
  }
  std::vector<double> other(n);
  for (std::size_t i = 0; i < n; ++i) other[i] = state[i] + opt.delta0 * dir[i] / std::sqrt(norm);

  const auto intervals = static_cast<std::size_t>(std::floor(opt.t_window / opt.renorm_interval + 1e-9));
  std::vector<double> rates;
  rates.reserve(intervals);
  for (std::size_t k = 0; k < intervals; ++k) {
    advance(sys, state, opt.renorm_interval, opt.integrator);
    advance(sys, other, opt.renorm_interval, opt.integrator);
    double dist = 0.0;
    for (std::size_t i = 0; i < n; ++i) dist += (other[i] - state[i]) * (other[i] - state[i]);
    dist = std::sqrt(dist);
    if (!std::isfinite(dist) || dist == 0.0) throw IntegrationError("lyapunov_exponent: non-finite growth");
    rates.push_back(std::log(dist / opt.delta0) / opt.renorm_interval);
    for (std::size_t i = 0; i < n; ++i) other[i] = state[i] + (other[i] - state[i]) * opt.delta0 / dist;
  }

  LyapunovEstimate est;
  double total = 0.0;
  for (double r : rates) total += r;
  est.lambda = total / static_cast<double>(rates.size());
  const std::size_t q = std::max<std::size_t>(1, rates.size() / 4);
  for (std::size_t part = 0; part < 4 && part * q < rates.size(); ++part) {
    const std::size_t lo = part * q;
    const std::size_t hi = part == 3 ? rates.size() : std::min(rates.size(), lo + q);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += rates[i];
    est.quarter_means.push_back(s / static_cast<double>(hi - lo));
  }
  double var = 0.0;
  for (double m : est.quarter_means) var += (m - est.lambda) * (m - est.lambda);
  const double k = static_cast<double>(est.quarter_means.size());
  est.std_error = k > 1 ? std::sqrt(var / (k - 1.0) / k) : 0.0;
  return est;
}

}  // namespace activemedia
