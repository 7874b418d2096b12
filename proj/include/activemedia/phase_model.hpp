#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "activemedia/layout.hpp"

namespace activemedia {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Excitable phase dynamics dy/dt = 1 - b cos(y).
struct ExcitableParams {
  double b = 1.1;

  bool is_excitable() const { return b > 1.0; }
  /// Stable rest state y- = -arccos(1/b). Requires is_excitable().
  double rest() const;
  /// Unstable threshold y+ = +arccos(1/b). Requires is_excitable().
  double threshold() const;
};

double f_excitable(double y, double b);

/// O-E...E-O chain. With `second_oscillator == false` the z end is dropped
/// and the chain is O-E...E (the OE pair when n_excitable == 1).
struct ChainSpec {
  double omega = 1.0;
  double d = 0.0;
  int n_excitable = 1;
  double b = 1.1;
  double c_oe = 0.0;
  double c_eo = 0.0;
  double c_ee = 0.0;
  /// Explicit (omega_x, omega_z); supersedes omega +/- d when set.
  std::optional<std::pair<double, double>> end_frequencies;
  bool second_oscillator = true;
  /// Weight a of the O-E coupling waveform sin(u) + a sin(2u). Zero for the
  /// standard model.
  double second_harmonic = 0.0;

  std::size_t dimension() const {
    return static_cast<std::size_t>(n_excitable) + (second_oscillator ? 2 : 1);
  }
  double omega_x() const;
  double omega_z() const;
  ChainLayout layout() const;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  static ChainSpec oe_pair(double c_oe, double c_eo, double omega = 1.0, double b = 1.1);
  static ChainSpec chain(int n_excitable, double c_oe, double c_eo, double c_ee,
                         double omega = 1.0, double d = 0.0, double b = 1.1);

  bool operator==(const ChainSpec&) const = default;
};

/// Unwrapped phases ordered (x, y_1, ..., y_N[, z]).
using PhaseState = std::vector<double>;

/// Evaluates the chain right-hand side into `out`. Throws on dimension mismatch.
void chain_vector_field(const ChainSpec& spec, std::span<const double> state, std::span<double> out);
std::vector<double> chain_vector_field(const ChainSpec& spec, std::span<const double> state);

/// Synchronous initial state: oscillators at `x0`, E cells at rest.
PhaseState rest_state(const ChainSpec& spec, double x0 = 0.0, double z0 = 0.0);

struct OeEquilibrium {
  double x = 0.0;
  double y = 0.0;
  bool saddle_node = false;
};

/// Stable equilibrium of the OE pair, if any.
std::optional<OeEquilibrium> oe_fixed_point(double c_oe, double c_eo, double omega, double b);

struct SnicConversion {
  double b = 0.0;
  double time_scale = 0.0;
};

/// Maps the SNIC normal-form parameter p to (b, 1 + p).
SnicConversion snic_to_b(double p);

/// Phase-chain system for the integrator.
class PhaseChain {
 public:
  explicit PhaseChain(ChainSpec spec);

  const ChainSpec& spec() const { return spec_; }
  std::size_t dimension() const { return spec_.dimension(); }
  std::size_t cell_count() const { return spec_.dimension(); }
  FiringRule firing_rule(std::size_t cell) const;
  ChainLayout layout() const { return spec_.layout(); }

  void operator()(std::span<const double> state, std::span<double> out) const {
    chain_vector_field(spec_, state, out);
  }

 private:
  ChainSpec spec_;
};

}  // namespace activemedia
