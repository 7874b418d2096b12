#include "activemedia/phase_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace activemedia {

namespace {

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw std::invalid_argument(field + ": " + what);
}

inline double waveform(double u, double a) {
  return a == 0.0 ? std::sin(u) : std::sin(u) + a * std::sin(2.0 * u);
}

}  // namespace

double ExcitableParams::rest() const {
  if (!is_excitable()) throw std::domain_error("b: rest state requires b > 1");
  return -std::acos(1.0 / b);
}

double ExcitableParams::threshold() const {
  if (!is_excitable()) throw std::domain_error("b: threshold requires b > 1");
  return std::acos(1.0 / b);
}

double f_excitable(double y, double b) { return 1.0 - b * std::cos(y); }

double ChainSpec::omega_x() const {
  return end_frequencies ? end_frequencies->first : omega + d;
}

double ChainSpec::omega_z() const {
  return end_frequencies ? end_frequencies->second : omega - d;
}

ChainLayout ChainSpec::layout() const {
  ChainLayout layout;
  layout.x = 0;
  for (int j = 1; j <= n_excitable; ++j) layout.excitable.push_back(static_cast<std::size_t>(j));
  if (second_oscillator) layout.z = static_cast<std::size_t>(n_excitable) + 1;
  return layout;
}

void ChainSpec::validate() const {
  require(n_excitable >= 1, "n_excitable", "must be at least 1");
  require(std::isfinite(b) && b >= 0.0, "b", "must be finite and nonnegative");
  require(std::isfinite(c_oe) && c_oe >= 0.0, "c_oe", "must be finite and nonnegative");
  require(std::isfinite(c_eo) && c_eo >= 0.0, "c_eo", "must be finite and nonnegative");
  require(std::isfinite(c_ee) && c_ee >= 0.0, "c_ee", "must be finite and nonnegative");
  require(std::isfinite(second_harmonic), "second_harmonic", "must be finite");
  if (end_frequencies) {
    require(std::isfinite(end_frequencies->first) && end_frequencies->first > 0.0, "omega_x",
            "must be positive");
    require(std::isfinite(end_frequencies->second) && end_frequencies->second > 0.0, "omega_z",
            "must be positive");
  } else {
    require(std::isfinite(omega) && omega > 0.0, "omega", "must be positive");
    require(std::isfinite(d) && d >= 0.0, "d", "must be nonnegative");
  }
}

ChainSpec ChainSpec::oe_pair(double c_oe, double c_eo, double omega, double b) {
  ChainSpec spec;
  spec.omega = omega;
  spec.b = b;
  spec.c_oe = c_oe;
  spec.c_eo = c_eo;
  spec.n_excitable = 1;
  spec.second_oscillator = false;
  return spec;
}

ChainSpec ChainSpec::chain(int n_excitable, double c_oe, double c_eo, double c_ee, double omega,
                           double d, double b) {
  ChainSpec spec;
  spec.n_excitable = n_excitable;
  spec.c_oe = c_oe;
  spec.c_eo = c_eo;
  spec.c_ee = c_ee;
  spec.omega = omega;
  spec.d = d;
  spec.b = b;
  return spec;
}

void chain_vector_field(const ChainSpec& spec, std::span<const double> state, std::span<double> out) {
  const std::size_t dim = spec.dimension();
  if (state.size() != dim || out.size() != dim) {
    throw std::invalid_argument("chain_vector_field: state dimension " + std::to_string(state.size()) +
                                " does not match chain dimension " + std::to_string(dim));
  }
  const std::size_t n = static_cast<std::size_t>(spec.n_excitable);
  const double a = spec.second_harmonic;
  const double x = state[0];
  const double y_first = state[1];
  const double y_last = state[n];

  out[0] = spec.omega_x() + spec.c_oe * waveform(y_first - x, a);

  if (n == 1) {
    double drive = waveform(x - y_first, a);
    if (spec.second_oscillator) drive += waveform(state[2] - y_first, a);
    out[1] = f_excitable(y_first, spec.b) + spec.c_eo * drive;
  } else {
    out[1] = f_excitable(y_first, spec.b) + spec.c_eo * waveform(x - y_first, a) +
             spec.c_ee * std::sin(state[2] - y_first);
    for (std::size_t j = 2; j < n; ++j) {
      const double y = state[j];
      out[j] = f_excitable(y, spec.b) +
               spec.c_ee * (std::sin(state[j - 1] - y) + std::sin(state[j + 1] - y));
    }
    double last = f_excitable(y_last, spec.b) + spec.c_ee * std::sin(state[n - 1] - y_last);
    if (spec.second_oscillator) last += spec.c_eo * waveform(state[n + 1] - y_last, a);
    out[n] = last;
  }

  if (spec.second_oscillator) {
    const double z = state[n + 1];
    out[n + 1] = spec.omega_z() + spec.c_oe * waveform(y_last - z, a);
  }
}

std::vector<double> chain_vector_field(const ChainSpec& spec, std::span<const double> state) {
  std::vector<double> out(spec.dimension());
  chain_vector_field(spec, state, out);
  return out;
}

PhaseState rest_state(const ChainSpec& spec, double x0, double z0) {
  const double y_rest = ExcitableParams{spec.b}.rest();
  PhaseState state(spec.dimension(), y_rest);
  state.front() = x0;
  if (spec.second_oscillator) state.back() = z0;
  return state;
}

std::optional<OeEquilibrium> oe_fixed_point(double c_oe, double c_eo, double omega, double b) {
  if (!(b > 1.0)) throw std::domain_error("oe_fixed_point: requires b > 1");
  constexpr double kRel = 1e-12;
  const double sn_line = (b - 1.0) * c_oe / omega;
  const bool coe_ok = c_oe >= omega * (1.0 - kRel);
  const bool ceo_ok = c_eo <= sn_line * (1.0 + kRel) + kRel;
  if (!coe_ok || !ceo_ok) return std::nullopt;

  const double cos_y = std::clamp((c_eo * omega + c_oe) / (c_oe * b), -1.0, 1.0);
  const double shift = std::asin(std::clamp(omega / c_oe, -1.0, 1.0));
  OeEquilibrium eq;
  // Stable node: y on the rest side (sin y < 0) and cos(x - y) > 0.
  eq.y = -std::acos(cos_y);
  eq.x = eq.y + shift;
  eq.saddle_node = std::abs(c_eo - sn_line) <= kRel * std::max(1.0, sn_line) ||
                   std::abs(c_oe - omega) <= kRel * std::max(1.0, omega);
  return eq;
}

SnicConversion snic_to_b(double p) {
  if (!(p > -1.0)) throw std::domain_error("snic_to_b: requires p > -1");
  return {(1.0 - p) / (1.0 + p), 1.0 + p};
}

PhaseChain::PhaseChain(ChainSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

FiringRule PhaseChain::firing_rule(std::size_t cell) const {
  if (cell >= cell_count()) throw std::out_of_range("firing_rule: cell index out of range");
  return {FiringRule::Kind::PhaseCrossing, cell, kPi};
}

}  // namespace activemedia
