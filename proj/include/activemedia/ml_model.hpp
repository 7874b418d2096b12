#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "activemedia/analysis.hpp"
#include "activemedia/integrator.hpp"
#include "activemedia/layout.hpp"
#include "activemedia/sweep.hpp"

namespace activemedia {

/// Morris-Lecar cell; only the applied current varies between cell types.
struct MLParams {
  double I = 43.0;

  static constexpr double g_ca = 4.0, g_k = 8.0, g_l = 2.0;
  static constexpr double e_ca = 120.0, e_k = -84.0, e_l = -60.0;
  static constexpr double phi = 0.3;

  static double m_inf(double v);
  static double w_inf(double v);
  static double tau_w(double v);

  /// Ionic current plus applied current (dV/dt of an isolated cell).
  double dv(double v, double w) const;
  static double dw(double v, double w);
  bool operator==(const MLParams&) const = default;
};

inline constexpr double kOscillatorCurrent = 43.0;
inline constexpr double kExcitableCurrent = 39.0;

/// O-E...E-O gap-junction chain. State is (V, w) per cell in chain order.
struct MLNetwork {
  int n_excitable = 2;
  double I_oscillator = kOscillatorCurrent;
  double I_excitable = kExcitableCurrent;
  double g_oe = 0.1;
  double g_eo = 0.05;
  double g_ee = 0.1;

  std::size_t cell_count() const { return static_cast<std::size_t>(n_excitable) + 2; }
  std::size_t dimension() const { return 2 * cell_count(); }
  ChainLayout layout() const;
  MLParams cell(std::size_t i) const;

  void validate() const;
  bool operator==(const MLNetwork&) const = default;
};

void ml_vector_field(const MLNetwork& net, std::span<const double> state, std::span<double> out);
std::vector<double> ml_vector_field(const MLNetwork& net, std::span<const double> state);

/// Gap-junction current into each cell.
std::vector<double> coupling_currents(const MLNetwork& net, std::span<const double> state);

class MLSystem {
 public:
  explicit MLSystem(MLNetwork net);

  const MLNetwork& network() const { return net_; }
  std::size_t dimension() const { return net_.dimension(); }
  std::size_t cell_count() const { return net_.cell_count(); }
  /// Upward crossing of V = 0 mV.
  FiringRule firing_rule(std::size_t cell) const;
  ChainLayout layout() const { return net_.layout(); }

  void operator()(std::span<const double> state, std::span<double> out) const { ml_vector_field(net_, state, out); }

 private:
  MLNetwork net_;
};

struct MLEquilibrium {
  double v = 0.0;
  double w = 0.0;
  bool stable = false;
};

/// All equilibria of an isolated cell, ascending in V, with linear stability.
std::vector<MLEquilibrium> ml_equilibria(double I);

struct MLLimitCycle {
  double period = 0.0;
  /// One period of (V, w) samples at spacing dt, starting at an upward V = 0 crossing.
  std::vector<double> v;
  std::vector<double> w;
};

/// Stable limit cycle of an isolated cell; throws std::domain_error if the
/// cell settles to rest.
MLLimitCycle ml_limit_cycle(double I, double dt = 0.01);

/// Initial data for scans: x starts at a spike, z at a stratified random
/// phase of the isolated oscillator cycle, E cells near rest (+/- 5 mV).
std::vector<std::vector<double>> ml_initials(const MLNetwork& net, int n_ic, std::uint64_t seed);

LockPattern ml_classify(const MLNetwork& net, const Trajectory& trajectory, const ClassifyTolerances& tol = {});

ProbeSettings ml_probe_defaults();

struct MLRegionPoint {
  double g_oe = 0.0;
  double g_eo = 0.0;
  AttractorSet attractors;
};

std::vector<MLRegionPoint> ml_region_scan(const std::vector<double>& g_oe_values, const std::vector<double>& g_eo_values,
                                          double g_ee, int n_ic, std::uint64_t seed,
                                          const ProbeSettings& settings = ml_probe_defaults());
/// Same scan with currents, chain length and g_ee taken from `base`. Points are
/// ordered with g_oe varying fastest.
std::vector<MLRegionPoint> ml_region_scan(const MLNetwork& base, const std::vector<double>& g_oe_values,
                                          const std::vector<double>& g_eo_values, int n_ic, std::uint64_t seed,
                                          const ProbeSettings& settings = ml_probe_defaults());

}  // namespace activemedia
