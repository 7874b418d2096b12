#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "activemedia/layout.hpp"
#include "activemedia/phase_model.hpp"

namespace activemedia {

template <class S>
concept DynamicalSystem = requires(const S& s, std::span<const double> in, std::span<double> out,
                                   std::size_t i) {
  { s.dimension() } -> std::convertible_to<std::size_t>;
  { s.cell_count() } -> std::convertible_to<std::size_t>;
  { s.firing_rule(i) } -> std::same_as<FiringRule>;
  s(in, out);
};

struct IntegratorConfig {
  enum class Method { Rk4, DormandPrince45 };

  Method method = Method::Rk4;
  double dt = 0.005;
  double abs_tol = 1e-9;
  double rel_tol = 1e-8;
  double t_transient = 500.0;
  double t_record = 1000.0;
  /// Spacing of stored samples; 0 stores every step.
  double sample_interval = 0.0;
  /// When false only firings and the window end states are kept.
  bool record_states = true;

  void validate() const;

  static IntegratorConfig phase_defaults() { return {}; }
  static IntegratorConfig ml_defaults() {
    IntegratorConfig c;
    c.dt = 0.01;
    c.t_transient = 1000.0;
    c.t_record = 4000.0;
    return c;
  }

  bool operator==(const IntegratorConfig&) const = default;
};

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Trajectory {
  std::size_t dimension = 0;
  double t_begin = 0.0;
  double t_end = 0.0;
  std::vector<double> times;
  /// Row-major samples, one row of `dimension` values per entry of `times`.
  std::vector<double> samples;
  std::vector<std::vector<double>> firings;
  std::vector<FiringRule> rules;
  std::vector<double> initial_state;
  std::vector<double> final_state;

  std::size_t size() const { return times.size(); }
  std::span<const double> state(std::size_t i) const {
    return {samples.data() + i * dimension, dimension};
  }
  double at(std::size_t i, std::size_t coordinate) const { return samples[i * dimension + coordinate]; }
};

/// Upward crossings of the cell's firing level, linearly interpolated
/// between stored samples.
std::vector<double> detect_firings(const Trajectory& trajectory, std::size_t cell);

struct PoincareSection {
  std::vector<double> times;
  /// Rows of `dimension` values; phase coordinates wrapped to [0, 2*pi).
  std::vector<std::vector<double>> points;
  bool monotone = true;
};

/// Crossings of `coordinate` through level (mod 2*pi). `wrap_all` reduces
/// every coordinate mod 2*pi (phase systems).
PoincareSection poincare_section(const Trajectory& trajectory, std::size_t coordinate, double level,
                                 bool wrap_all = true);

double wrap_two_pi(double v);
/// Wraps to (-pi, pi].
double wrap_pi(double v);

namespace detail {

template <DynamicalSystem S>
class Rk4Stepper {
 public:
  explicit Rk4Stepper(std::size_t n) : k1_(n), k2_(n), k3_(n), k4_(n), tmp_(n) {}

  void step(const S& sys, std::vector<double>& y, double h) {
    const std::size_t n = y.size();
    sys(y, k1_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + 0.5 * h * k1_[i];
    sys(tmp_, k2_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + 0.5 * h * k2_[i];
    sys(tmp_, k3_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h * k3_[i];
    sys(tmp_, k4_);
    for (std::size_t i = 0; i < n; ++i) y[i] += h / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
  }

 private:
  std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

// Dormand-Prince 5(4) with FSAL and standard step-size control.
template <DynamicalSystem S>
class DormandPrinceStepper {
 public:
  DormandPrinceStepper(std::size_t n, double abs_tol, double rel_tol)
      : abs_tol_(abs_tol), rel_tol_(rel_tol), k_(7, std::vector<double>(n)), tmp_(n), y5_(n) {}

  /// Attempts one step of size h; on success updates y and returns true.
  /// `h_next` receives the proposed next step either way.
  bool try_step(const S& sys, std::vector<double>& y, double h, double& h_next) {
    static constexpr double a21 = 1.0 / 5.0;
    static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                            a54 = -212.0 / 729.0;
    static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                            a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
    static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                            b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
    static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                            e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
    const std::size_t n = y.size();
    auto& k1 = k_[0];
    auto& k2 = k_[1];
    auto& k3 = k_[2];
    auto& k4 = k_[3];
    auto& k5 = k_[4];
    auto& k6 = k_[5];
    auto& k7 = k_[6];
    if (!fsal_valid_) {
      sys(y, k1);
      fsal_valid_ = true;
    }
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h * a21 * k1[i];
    sys(tmp_, k2);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    sys(tmp_, k3);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    sys(tmp_, k4);
    for (std::size_t i = 0; i < n; ++i)
      tmp_[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    sys(tmp_, k5);
    for (std::size_t i = 0; i < n; ++i)
      tmp_[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    sys(tmp_, k6);
    for (std::size_t i = 0; i < n; ++i)
      y5_[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    sys(y5_, k7);

    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e =
          h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double scale = abs_tol_ + rel_tol_ * std::max(std::abs(y[i]), std::abs(y5_[i]));
      err = std::max(err, std::abs(e) / scale);
    }
    const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h_next = h * factor;
    if (!(err <= 1.0)) return false;
    y.swap(y5_);
    k1.swap(k7);
    return true;
  }

 private:
  double abs_tol_;
  double rel_tol_;
  std::vector<std::vector<double>> k_;
  std::vector<double> tmp_, y5_;
  bool fsal_valid_ = false;
};

inline void check_finite(std::span<const double> y, double t) {
  for (double v : y) {
    if (!std::isfinite(v)) {
      throw IntegrationError("non-finite state at t = " + std::to_string(t) +
                             " (check parameter values)");
    }
  }
}

inline void collect_events(std::span<const FiringRule> rules, std::span<const double> prev,
                           std::span<const double> cur, double t_prev, double h,
                           std::vector<std::vector<double>>& firings) {
  for (std::size_t c = 0; c < rules.size(); ++c) {
    const FiringRule& r = rules[c];
    const double a = prev[r.coordinate];
    const double b = cur[r.coordinate];
    if (r.kind == FiringRule::Kind::PhaseCrossing) {
      const double ka = std::floor((a - r.level) / kTwoPi);
      const double kb = std::floor((b - r.level) / kTwoPi);
      for (double k = ka + 1.0; k <= kb; k += 1.0) {
        const double target = r.level + kTwoPi * k;
        firings[c].push_back(t_prev + h * (target - a) / (b - a));
      }
    } else if (a < r.level && b >= r.level) {
      firings[c].push_back(t_prev + h * (r.level - a) / (b - a));
    }
  }
}

}  // namespace detail

/// Advances `state` by `duration` time units without recording.
template <DynamicalSystem S>
void advance(const S& sys, std::vector<double>& state, double duration, const IntegratorConfig& config) {
  if (state.size() != sys.dimension()) throw std::invalid_argument("advance: state dimension mismatch");
  if (duration <= 0.0) return;
  if (config.method == IntegratorConfig::Method::Rk4) {
    detail::Rk4Stepper<S> stepper(state.size());
    const auto steps = static_cast<long long>(std::floor(duration / config.dt + 1e-9));
    for (long long i = 0; i < steps; ++i) stepper.step(sys, state, config.dt);
    const double rest = duration - static_cast<double>(steps) * config.dt;
    if (rest > 1e-12 * config.dt) stepper.step(sys, state, rest);
    detail::check_finite(state, duration);
    return;
  }
  detail::DormandPrinceStepper<S> stepper(state.size(), config.abs_tol, config.rel_tol);
  double t = 0.0;
  double h = config.dt;
  std::vector<double> trial;
  while (t < duration) {
    const double step = std::min(h, duration - t);
    trial = state;
    double h_next = step;
    if (stepper.try_step(sys, trial, step, h_next)) {
      state.swap(trial);
      t += step;
      detail::check_finite(state, t);
    }
    h = h_next;
    if (h < 1e-14 * std::max(1.0, t)) throw IntegrationError("step-size underflow in adaptive integration");
  }
}

/// Integrates over [0, t_transient + t_record]; samples and firings are kept
/// only for the recording window.
template <DynamicalSystem S>
Trajectory integrate(const S& sys, std::vector<double> state, const IntegratorConfig& config) {
  config.validate();
  const std::size_t n = sys.dimension();
  if (state.size() != n) {
    throw std::invalid_argument("integrate: initial state has dimension " + std::to_string(state.size()) +
                                ", system expects " + std::to_string(n));
  }
  detail::check_finite(state, 0.0);
  advance(sys, state, config.t_transient, config);

  Trajectory traj;
  traj.dimension = n;
  traj.t_begin = config.t_transient;
  traj.t_end = config.t_transient + config.t_record;
  traj.firings.resize(sys.cell_count());
  for (std::size_t c = 0; c < sys.cell_count(); ++c) traj.rules.push_back(sys.firing_rule(c));
  traj.initial_state = state;

  auto store = [&](double t, const std::vector<double>& y) {
    if (!config.record_states) return;
    traj.times.push_back(t);
    traj.samples.insert(traj.samples.end(), y.begin(), y.end());
  };
  store(traj.t_begin, state);

  std::vector<double> prev(n);
  if (config.method == IntegratorConfig::Method::Rk4) {
    detail::Rk4Stepper<S> stepper(n);
    const auto steps = static_cast<long long>(std::llround(config.t_record / config.dt));
    const long long stride =
        config.sample_interval > 0.0
            ? std::max<long long>(1, std::llround(config.sample_interval / config.dt))
            : 1;
    for (long long i = 0; i < steps; ++i) {
      const double t_prev = traj.t_begin + static_cast<double>(i) * config.dt;
      prev = state;
      stepper.step(sys, state, config.dt);
      detail::check_finite(state, t_prev + config.dt);
      detail::collect_events(traj.rules, prev, state, t_prev, config.dt, traj.firings);
      if ((i + 1) % stride == 0) store(traj.t_begin + static_cast<double>(i + 1) * config.dt, state);
    }
    traj.t_end = traj.t_begin + static_cast<double>(steps) * config.dt;
  } else {
    detail::DormandPrinceStepper<S> stepper(n, config.abs_tol, config.rel_tol);
    double t = traj.t_begin;
    double last_stored = t;
    double h = config.dt;
    std::vector<double> trial;
    while (t < traj.t_end) {
      const double step = std::min(h, traj.t_end - t);
      trial = state;
      double h_next = step;
      if (stepper.try_step(sys, trial, step, h_next)) {
        prev.swap(state);
        state.swap(trial);
        detail::check_finite(state, t + step);
        detail::collect_events(traj.rules, prev, state, t, step, traj.firings);
        t += step;
        if (t - last_stored >= config.sample_interval || t >= traj.t_end) {
          store(t, state);
          last_stored = t;
        }
      }
      h = h_next;
      if (h < 1e-14 * std::max(1.0, t)) throw IntegrationError("step-size underflow in adaptive integration");
    }
  }
  traj.final_state = state;
  return traj;
}

}  // namespace activemedia
