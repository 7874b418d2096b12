#include "activemedia/integrator.hpp"

#include <iostream>

namespace activemedia {

void IntegratorConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt: must be positive");
  if (!(abs_tol > 0.0)) throw std::invalid_argument("abs_tol: must be positive");
  if (!(rel_tol > 0.0)) throw std::invalid_argument("rel_tol: must be positive");
  if (!(t_transient >= 0.0)) throw std::invalid_argument("t_transient: must be nonnegative");
  if (!(t_record >= 0.0)) throw std::invalid_argument("t_record: must be nonnegative");
  if (!(sample_interval >= 0.0)) throw std::invalid_argument("sample_interval: must be nonnegative");
}

double wrap_two_pi(double v) {
  double r = std::fmod(v, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r -= kTwoPi;
  return r;
}

double wrap_pi(double v) {
  double r = wrap_two_pi(v);
  if (r > kPi) r -= kTwoPi;
  return r;
}

std::vector<double> detect_firings(const Trajectory& trajectory, std::size_t cell) {
  if (cell >= trajectory.rules.size()) throw std::out_of_range("detect_firings: cell index out of range");
  const FiringRule& rule = trajectory.rules[cell];
  std::vector<std::vector<double>> events(1);
  for (std::size_t i = 1; i < trajectory.size(); ++i) {
    const auto prev = trajectory.state(i - 1);
    const auto cur = trajectory.state(i);
    const double t0 = trajectory.times[i - 1];
    detail::collect_events(std::span<const FiringRule>(&rule, 1), prev, cur, t0,
                           trajectory.times[i] - t0, events);
  }
  return events.front();
}

PoincareSection poincare_section(const Trajectory& trajectory, std::size_t coordinate, double level,
                                 bool wrap_all) {
  if (coordinate >= trajectory.dimension) throw std::out_of_range("poincare_section: coordinate out of range");
  PoincareSection section;
  constexpr double kMonotoneTol = 1e-9;
  for (std::size_t i = 1; i < trajectory.size(); ++i) {
    const double a = trajectory.at(i - 1, coordinate);
    const double b = trajectory.at(i, coordinate);
    if (b < a - kMonotoneTol) section.monotone = false;
    const double ka = std::floor((a - level) / kTwoPi);
    const double kb = std::floor((b - level) / kTwoPi);
    for (double k = ka + 1.0; k <= kb; k += 1.0) {
      const double frac = (level + kTwoPi * k - a) / (b - a);
      const auto p = trajectory.state(i - 1);
      const auto q = trajectory.state(i);
      std::vector<double> point(trajectory.dimension);
      for (std::size_t c = 0; c < trajectory.dimension; ++c) {
        const double v = p[c] + frac * (q[c] - p[c]);
        point[c] = wrap_all ? wrap_two_pi(v) : v;
      }
      section.times.push_back(trajectory.times[i - 1] + frac * (trajectory.times[i] - trajectory.times[i - 1]));
      section.points.push_back(std::move(point));
    }
  }
  if (!section.monotone) {
    std::cerr << "warning: poincare_section: coordinate " << coordinate
              << " is not monotone along the trajectory\n";
  }
  return section;
}

}  // namespace activemedia
