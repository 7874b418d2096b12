#include "activemedia/ml_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace activemedia {

double MLParams::m_inf(double v) { return 0.5 * (1.0 + std::tanh((v + 1.2) / 18.0)); }
double MLParams::w_inf(double v) { return 0.5 * (1.0 + std::tanh((v - 12.0) / 17.4)); }
double MLParams::tau_w(double v) { return 1.0 / std::cosh((v - 12.0) / 34.8); }

double MLParams::dv(double v, double w) const {
  return I - g_ca * m_inf(v) * (v - e_ca) - g_k * w * (v - e_k) - g_l * (v - e_l);
}

double MLParams::dw(double v, double w) { return phi * (w_inf(v) - w) / tau_w(v); }

ChainLayout MLNetwork::layout() const {
  ChainLayout l;
  l.x = 0;
  for (int j = 1; j <= n_excitable; ++j) l.excitable.push_back(static_cast<std::size_t>(j));
  l.z = static_cast<std::size_t>(n_excitable) + 1;
  return l;
}

MLParams MLNetwork::cell(std::size_t i) const {
  const bool oscillator = i == 0 || i + 1 == cell_count();
  return MLParams{oscillator ? I_oscillator : I_excitable};
}

void MLNetwork::validate() const {
  if (n_excitable < 1) throw std::invalid_argument("n_excitable: must be at least 1");
  const auto check = [](double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument(std::string(name) + ": must be finite and nonnegative");
  };
  check(g_oe, "g_oe");
  check(g_eo, "g_eo");
  check(g_ee, "g_ee");
  if (!std::isfinite(I_oscillator)) throw std::invalid_argument("I_oscillator: must be finite");
  if (!std::isfinite(I_excitable)) throw std::invalid_argument("I_excitable: must be finite");
}

namespace {

// Gains (into cell i, into cell i + 1) of the junction between them. O cells
// receive g_oe from their E neighbour; E cells receive g_eo from an O
// neighbour and g_ee from an E neighbour.
std::pair<double, double> junction_gains(const MLNetwork& net, std::size_t i) {
  const std::size_t cells = net.cell_count();
  if (i == 0) return {net.g_oe, net.g_eo};
  if (i + 2 == cells) return {net.g_eo, net.g_oe};
  return {net.g_ee, net.g_ee};
}

}  // namespace

std::vector<double> coupling_currents(const MLNetwork& net, std::span<const double> state) {
  const std::size_t cells = net.cell_count();
  if (state.size() != 2 * cells) throw std::invalid_argument("coupling_currents: state dimension mismatch");
  std::vector<double> cur(cells, 0.0);
  for (std::size_t i = 0; i + 1 < cells; ++i) {
    const double va = state[2 * i];
    const double vb = state[2 * i + 2];
    const auto [into_a, into_b] = junction_gains(net, i);
    cur[i] += into_a * (vb - va);
    cur[i + 1] += into_b * (va - vb);
  }
  return cur;
}

void ml_vector_field(const MLNetwork& net, std::span<const double> state, std::span<double> out) {
  const std::size_t cells = net.cell_count();
  if (state.size() != 2 * cells || out.size() != 2 * cells) {
    throw std::invalid_argument("ml_vector_field: state dimension " + std::to_string(state.size()) +
                                " does not match network dimension " + std::to_string(2 * cells));
  }
  for (std::size_t i = 0; i < cells; ++i) {
    const double v = state[2 * i];
    const double w = state[2 * i + 1];
    out[2 * i] = net.cell(i).dv(v, w);
    out[2 * i + 1] = MLParams::dw(v, w);
  }
  for (std::size_t i = 0; i + 1 < cells; ++i) {
    const double va = state[2 * i];
    const double vb = state[2 * i + 2];
    const auto [into_a, into_b] = junction_gains(net, i);
    out[2 * i] += into_a * (vb - va);
    out[2 * i + 2] += into_b * (va - vb);
  }
}

std::vector<double> ml_vector_field(const MLNetwork& net, std::span<const double> state) {
  std::vector<double> out(state.size());
  ml_vector_field(net, state, out);
  return out;
}

MLSystem::MLSystem(MLNetwork net) : net_(net) { net_.validate(); }

FiringRule MLSystem::firing_rule(std::size_t cell) const {
  if (cell >= cell_count()) throw std::out_of_range("firing_rule: cell index out of range");
  return {FiringRule::Kind::Threshold, 2 * cell, 0.0};
}

std::vector<MLEquilibrium> ml_equilibria(double I) {
  const MLParams p{I};
  const auto g = [&](double v) { return p.dv(v, MLParams::w_inf(v)); };
  std::vector<MLEquilibrium> out;
  const double lo = -100.0, hi = 100.0;
  const int n = 20000;
  double a = lo;
  double ga = g(a);
  for (int i = 1; i <= n; ++i) {
    const double b = lo + (hi - lo) * i / n;
    const double gb = g(b);
    if (ga == 0.0 || (ga < 0.0) != (gb < 0.0)) {
      double l = a, r = b;
      for (int it = 0; it < 200 && r - l > 1e-13; ++it) {
        const double m = 0.5 * (l + r);
        if ((g(m) < 0.0) == (ga < 0.0)) {
          l = m;
        } else {
          r = m;
        }
      }
      MLEquilibrium e;
      e.v = 0.5 * (l + r);
      e.w = MLParams::w_inf(e.v);
      // Jacobian by centered differences.
      const double h = 1e-6;
      const double fvv = (p.dv(e.v + h, e.w) - p.dv(e.v - h, e.w)) / (2 * h);
      const double fvw = (p.dv(e.v, e.w + h) - p.dv(e.v, e.w - h)) / (2 * h);
      const double fwv = (MLParams::dw(e.v + h, e.w) - MLParams::dw(e.v - h, e.w)) / (2 * h);
      const double fww = (MLParams::dw(e.v, e.w + h) - MLParams::dw(e.v, e.w - h)) / (2 * h);
      const double tr = fvv + fww;
      const double det = fvv * fww - fvw * fwv;
      e.stable = tr < 0.0 && det > 0.0;
      out.push_back(e);
    }
    a = b;
    ga = gb;
  }
  return out;
}

namespace {

struct SingleCell {
  MLParams p;
  std::size_t dimension() const { return 2; }
  std::size_t cell_count() const { return 1; }
  FiringRule firing_rule(std::size_t) const { return {FiringRule::Kind::Threshold, 0, 0.0}; }
  void operator()(std::span<const double> s, std::span<double> out) const {
    out[0] = p.dv(s[0], s[1]);
    out[1] = MLParams::dw(s[0], s[1]);
  }
};

}  // namespace

MLLimitCycle ml_limit_cycle(double I, double dt) {
  const SingleCell cell{MLParams{I}};
  IntegratorConfig cfg;
  cfg.dt = dt;
  cfg.t_transient = 500.0;
  cfg.t_record = 300.0;
  cfg.record_states = false;
  const Trajectory tr = integrate(cell, {-40.0, 0.3}, cfg);
  const auto& f = tr.firings[0];
  if (f.size() < 3) throw std::domain_error("ml_limit_cycle: cell does not oscillate at I = " + std::to_string(I));
  MLLimitCycle lc;
  lc.period = f.back() - f[f.size() - 2];

  // Move forward to (approximately) the next spike, then sample one period.
  std::vector<double> s = tr.final_state;
  const double back = tr.t_end - f.back();
  IntegratorConfig step;
  step.dt = dt;
  advance(cell, s, lc.period - back, step);
  const auto steps = static_cast<std::size_t>(std::llround(lc.period / dt));
  lc.v.reserve(steps);
  lc.w.reserve(steps);
  detail::Rk4Stepper<SingleCell> rk(2);
  for (std::size_t i = 0; i < steps; ++i) {
    lc.v.push_back(s[0]);
    lc.w.push_back(s[1]);
    rk.step(cell, s, dt);
  }
  return lc;
}

std::vector<std::vector<double>> ml_initials(const MLNetwork& net, int n_ic, std::uint64_t seed) {
  if (n_ic < 1) throw std::invalid_argument("n_ic: must be at least 1");
  net.validate();
  const MLLimitCycle lc = ml_limit_cycle(net.I_oscillator);
  MLEquilibrium rest{};
  bool have_rest = false;
  for (const auto& e : ml_equilibria(net.I_excitable)) {
    if (e.stable) {
      rest = e;
      have_rest = true;
      break;
    }
  }
  if (!have_rest) throw std::domain_error("ml_initials: excitable current has no stable rest state");
  Rng rng(seed);
  const std::size_t cells = net.cell_count();
  const std::size_t len = lc.v.size();
  std::vector<std::vector<double>> out;
  for (int k = 0; k < n_ic; ++k) {
    std::vector<double> s(2 * cells);
    s[0] = lc.v[0];
    s[1] = lc.w[0];
    const double frac = (static_cast<double>(k) + rng.uniform()) / static_cast<double>(n_ic);
    const auto idx = std::min(len - 1, static_cast<std::size_t>(frac * static_cast<double>(len)));
    s[2 * (cells - 1)] = lc.v[idx];
    s[2 * (cells - 1) + 1] = lc.w[idx];
    for (std::size_t c = 1; c + 1 < cells; ++c) {
      s[2 * c] = rest.v + rng.uniform(-5.0, 5.0);
      s[2 * c + 1] = rest.w;
    }
    out.push_back(std::move(s));
  }
  return out;
}

LockPattern ml_classify(const MLNetwork& net, const Trajectory& trajectory, const ClassifyTolerances& tol) {
  return classify_locking(trajectory, net.layout(), tol);
}

ProbeSettings ml_probe_defaults() {
  ProbeSettings s;
  s.integrator = IntegratorConfig::ml_defaults();
  return s;
}

std::vector<MLRegionPoint> ml_region_scan(const std::vector<double>& g_oe_values, const std::vector<double>& g_eo_values,
                                          double g_ee, int n_ic, std::uint64_t seed, const ProbeSettings& settings) {
  MLNetwork base;
  base.g_ee = g_ee;
  return ml_region_scan(base, g_oe_values, g_eo_values, n_ic, seed, settings);
}

std::vector<MLRegionPoint> ml_region_scan(const MLNetwork& base, const std::vector<double>& g_oe_values,
                                          const std::vector<double>& g_eo_values, int n_ic, std::uint64_t seed,
                                          const ProbeSettings& settings) {
  if (n_ic < 1) throw std::invalid_argument("ml_region_scan: n_ic must be at least 1");
  std::vector<MLRegionPoint> out(g_oe_values.size() * g_eo_values.size());
  parallel_for(out.size(), [&](std::size_t k) {
    MLNetwork net = base;
    net.g_oe = g_oe_values[k % g_oe_values.size()];
    net.g_eo = g_eo_values[k / g_oe_values.size()];
    net.validate();
    const MLSystem sys(net);
    out[k] = {net.g_oe, net.g_eo, collect_attractors(sys, ml_initials(net, n_ic, seed), settings)};
  });
  return out;
}

}  // namespace activemedia
