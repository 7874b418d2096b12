#include "activemedia/weak_coupling.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>

#include "activemedia/phase_model.hpp"

namespace activemedia {

namespace {

constexpr int kSubsteps = 8;

// FFTW planning is not thread-safe; execution is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

double wave(double u, double a) { return std::sin(u) + a * std::sin(2.0 * u); }
double wave_prime(double u, double a) { return std::cos(u) + 2.0 * a * std::cos(2.0 * u); }

std::vector<std::complex<double>> forward_fft(const std::vector<double>& x) {
  const int n = static_cast<int>(x.size());
  std::vector<double> in(x);
  std::vector<std::complex<double>> out(x.size() / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(n, in.data(), reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

/// Unnormalised inverse of a half spectrum for a real signal of length n.
std::vector<double> inverse_fft(std::vector<std::complex<double>> spectrum, std::size_t n) {
  std::vector<double> out(n);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan = fftw_plan_dft_c2r_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(spectrum.data()), out.data(),
                                FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

// Joint RK4 step of (U, w1, w2).
struct Joint {
  double c, a, d, e;  // d: diagonal of A, e: off-diagonal

  std::array<double, 3> rhs(const std::array<double, 3>& y) const {
    const double hu = wave(y[0], a);
    return {1.0 - c * hu, d * y[1] + e * y[2] + hu, e * y[1] + d * y[2]};
  }

  void step(std::array<double, 3>& y, double h) const {
    auto add = [](const std::array<double, 3>& p, const std::array<double, 3>& k, double s) {
      return std::array<double, 3>{p[0] + s * k[0], p[1] + s * k[1], p[2] + s * k[2]};
    };
    const auto k1 = rhs(y);
    const auto k2 = rhs(add(y, k1, 0.5 * h));
    const auto k3 = rhs(add(y, k2, 0.5 * h));
    const auto k4 = rhs(add(y, k3, h));
    for (int i = 0; i < 3; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
};

double max_wave(double a) {
  double m = 0.0;
  for (int i = 0; i < 4096; ++i) m = std::max(m, wave(kTwoPi * i / 4096.0, a));
  return m;
}

}  // namespace

void ReductionInputs::validate() const {
  if (!(c_oe > 0.0 && c_oe < 1.0)) throw std::invalid_argument("c_oe: must lie in (0, 1)");
  if (!(c_ee >= 0.0) || !std::isfinite(c_ee)) throw std::invalid_argument("c_ee: must be nonnegative");
  if (!(b > 1.0) || !std::isfinite(b)) throw std::invalid_argument("b: must exceed 1");
  if (!std::isfinite(second_harmonic)) throw std::invalid_argument("second_harmonic: must be finite");
  if (c_oe * max_wave(second_harmonic) >= 1.0) {
    throw std::invalid_argument("c_oe: the O cell has no periodic orbit for this waveform");
  }
  if (grid_size != 0 && (grid_size < 16 || grid_size % 2 != 0)) {
    throw std::invalid_argument("grid_size: must be an even number >= 16");
  }
}

std::size_t ReductionInputs::resolved_grid() const {
  if (grid_size != 0) return grid_size;
  const double c = std::min(c_oe, 0.99);
  const double target = 2048.0 / std::sqrt(1.0 - c);
  std::size_t n = 2048;
  while (static_cast<double>(n) < target) n *= 2;
  return n;
}

OrbitU periodic_orbit_U(double c_oe, std::size_t grid_size, double second_harmonic) {
  if (!(c_oe >= 0.0 && c_oe < 1.0)) throw std::invalid_argument("c_oe: must lie in [0, 1)");
  if (grid_size < 2) throw std::invalid_argument("grid_size: must be at least 2");
  if (c_oe * max_wave(second_harmonic) >= 1.0) {
    throw std::invalid_argument("c_oe: the O cell has no periodic orbit for this waveform");
  }
  OrbitU orbit;
  // Periodic trapezoid rule: spectrally accurate for a smooth periodic integrand.
  const std::size_t q = std::max<std::size_t>(8192, 4 * grid_size);
  double sum = 0.0;
  for (std::size_t i = 0; i < q; ++i) {
    sum += 1.0 / (1.0 - c_oe * wave(kTwoPi * static_cast<double>(i) / static_cast<double>(q), second_harmonic));
  }
  orbit.period = kTwoPi * sum / static_cast<double>(q);

  const double ds = orbit.period / static_cast<double>(grid_size);
  const Joint joint{c_oe, second_harmonic, 0.0, 0.0};
  std::array<double, 3> y{0.0, 0.0, 0.0};
  orbit.s.resize(grid_size);
  orbit.u.resize(grid_size);
  for (std::size_t i = 0; i < grid_size; ++i) {
    orbit.s[i] = ds * static_cast<double>(i);
    orbit.u[i] = y[0];
    for (int k = 0; k < kSubsteps; ++k) joint.step(y, ds / kSubsteps);
  }
  orbit.endpoint_error = y[0] - kTwoPi;
  return orbit;
}

std::pair<std::pair<double, double>, std::pair<double, double>> rest_matrix(double b, double c_ee) {
  if (!(b > 1.0)) throw std::invalid_argument("b: must exceed 1");
  const double bs = -std::sqrt(b * b - 1.0);
  return {{bs - c_ee, c_ee}, {c_ee, bs - c_ee}};
}

std::pair<double, double> rest_eigenvalues(double b, double c_ee) {
  const double bs = -std::sqrt(b * b - 1.0);
  return {bs - 2.0 * c_ee, bs};
}

std::pair<std::vector<double>, std::vector<double>> forced_response_W(const ReductionInputs& inputs,
                                                                      const OrbitU& orbit, double* residual) {
  const auto [row0, row1] = rest_matrix(inputs.b, inputs.c_ee);
  const Joint joint{inputs.c_oe, inputs.second_harmonic, row0.first, row0.second};
  const std::size_t n = orbit.u.size();
  const double ds = orbit.period / static_cast<double>(n);
  const double h = ds / kSubsteps;

  auto pass = [&](double w1_0, double w2_0, std::vector<double>* w1, std::vector<double>* w2) {
    std::array<double, 3> y{0.0, w1_0, w2_0};
    for (std::size_t i = 0; i < n; ++i) {
      if (w1) (*w1)[i] = y[1];
      if (w2) (*w2)[i] = y[2];
      for (int k = 0; k < kSubsteps; ++k) joint.step(y, h);
    }
    return std::make_pair(y[1], y[2]);
  };

  // Period map W(T) = e^{AT} W(0) + P. A is symmetric with eigenvectors
  // (1, 1) and (1, -1), so (I - e^{AT})^{-1} acts diagonally on sum/difference.
  const auto p = pass(0.0, 0.0, nullptr, nullptr);
  const auto [lam_diff, lam_sum] = rest_eigenvalues(inputs.b, inputs.c_ee);
  const double sum = 0.5 * (p.first + p.second) / (1.0 - std::exp(lam_sum * orbit.period));
  const double diff = 0.5 * (p.first - p.second) / (1.0 - std::exp(lam_diff * orbit.period));
  const double w1_0 = sum + diff;
  const double w2_0 = sum - diff;

  std::vector<double> w1(n), w2(n);
  const auto end = pass(w1_0, w2_0, &w1, &w2);
  if (residual) *residual = std::max(std::abs(end.first - w1_0), std::abs(end.second - w2_0));
  return {std::move(w1), std::move(w2)};
}

double interaction_H(const GFunctionTable& table, double phi) {
  const std::size_t n = table.s.size();
  const double theta = kTwoPi * phi / table.period;
  const auto& c = table.cross_spectrum;
  double s = c[0].real();
  for (std::size_t k = 1; k < n / 2; ++k) {
    s += 2.0 * (c[k] * std::polar(1.0, theta * static_cast<double>(k))).real();
  }
  s += c[n / 2].real() * std::cos(theta * static_cast<double>(n / 2));
  return table.h_constant + table.inputs.c_oe / static_cast<double>(n) * s;
}

double coupling_G(const GFunctionTable& table, double phi) {
  return interaction_H(table, -phi) - interaction_H(table, phi);
}

double coupling_G_prime(const GFunctionTable& table, double phi) {
  const double e = table.period / 8192.0;
  return (coupling_G(table, phi + e) - coupling_G(table, phi - e)) / (2.0 * e);
}

GFunctionTable reduce(const ReductionInputs& inputs) {
  inputs.validate();
  GFunctionTable t;
  t.inputs = inputs;
  const std::size_t n = inputs.resolved_grid();
  const double c = inputs.c_oe;
  const double a = inputs.second_harmonic;

  const OrbitU orbit = periodic_orbit_U(c, n, a);
  t.period = orbit.period;
  t.s = orbit.s;
  t.u = orbit.u;
  auto [w1, w2] = forced_response_W(inputs, orbit, &t.w_residual);
  t.w1 = std::move(w1);
  t.w2 = std::move(w2);
  t.u_prime.resize(n);
  t.m.resize(n);
  double base = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    t.u_prime[i] = 1.0 - c * wave(t.u[i], a);
    t.m[i] = wave_prime(t.u[i], a) / t.u_prime[i];
    base += t.m[i] * t.w1[i];
  }
  t.h_constant = c / static_cast<double>(n) * base;

  // sum_j m_j w2(s_j + phi) = (1/N) sum_k W_k conj(M_k) e^{2 pi i k phi / T}.
  const auto wk = forward_fft(t.w2);
  const auto mk = forward_fft(t.m);
  t.cross_spectrum.resize(wk.size());
  for (std::size_t k = 0; k < wk.size(); ++k) t.cross_spectrum[k] = wk[k] * std::conj(mk[k]) / static_cast<double>(n);

  // On the grid the correlation is an inverse transform of the cross spectrum.
  const std::vector<double> corr = inverse_fft(t.cross_spectrum, n);
  t.h.resize(n);
  for (std::size_t i = 0; i < n; ++i) t.h[i] = t.h_constant + c / static_cast<double>(n) * corr[i];
  t.g.resize(n);
  for (std::size_t i = 0; i < n; ++i) t.g[i] = t.h[(n - i) % n] - t.h[i];

  t.g_prime_zero = coupling_G_prime(t, 0.0);
  t.g_prime_half = coupling_G_prime(t, 0.5 * t.period);

  // G(0) = G(T/2) = 0 identically; other zeros from sign changes on the grid,
  // skipping the cells adjacent to those two.
  t.zeros.push_back({0.0, t.g_prime_zero < 0.0});
  const std::size_t half = n / 2;
  std::vector<GZero> interior;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (i == half - 1 || i == half || i + 1 == n - 1) continue;
    if ((t.g[i] < 0.0) == (t.g[i + 1] < 0.0)) continue;
    double lo = t.s[i];
    double hi = t.s[i + 1];
    const bool lo_neg = coupling_G(t, lo) < 0.0;
    for (int it = 0; it < 60 && hi - lo > 1e-13 * t.period; ++it) {
      const double mid = 0.5 * (lo + hi);
      if ((coupling_G(t, mid) < 0.0) == lo_neg) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const double z = 0.5 * (lo + hi);
    interior.push_back({z, coupling_G_prime(t, z) < 0.0});
  }
  for (const auto& z : interior) {
    if (z.phi < 0.5 * t.period) t.zeros.push_back(z);
  }
  t.zeros.push_back({0.5 * t.period, t.g_prime_half < 0.0});
  for (const auto& z : interior) {
    if (z.phi > 0.5 * t.period) t.zeros.push_back(z);
  }
  return t;
}

namespace {

template <class F>
double bisect_sign(F f, std::pair<double, double> bracket, double tol, const char* what) {
  double lo = bracket.first;
  double hi = bracket.second;
  if (!(hi > lo) || !(tol > 0.0)) throw std::invalid_argument("bracket: need lo < hi and tol > 0");
  const bool lo_pos = f(lo) > 0.0;
  if (lo_pos == (f(hi) > 0.0)) {
    throw std::domain_error(std::string(what) + " does not change sign on [" + std::to_string(lo) + ", " +
                            std::to_string(hi) + "]");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if ((f(mid) > 0.0) == lo_pos) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double critical_coe(double b, double c_ee, const CriticalOptions& options, double second_harmonic) {
  auto g0 = [&](double c) {
    ReductionInputs in;
    in.c_oe = c;
    in.c_ee = c_ee;
    in.b = b;
    in.second_harmonic = second_harmonic;
    return reduce(in).g_prime_zero;
  };
  return bisect_sign(g0, options.bracket, options.tol, "G'(0)");
}

SymmetryBreaking symmetry_breaking_check(double a, double b, double c_ee, const CriticalOptions& options) {
  auto table = [&](double c) {
    ReductionInputs in;
    in.c_oe = c;
    in.c_ee = c_ee;
    in.b = b;
    in.second_harmonic = a;
    return reduce(in);
  };
  SymmetryBreaking out;
  out.synchrony_critical =
      bisect_sign([&](double c) { return table(c).g_prime_zero; }, options.bracket, options.tol, "G'(0)");
  out.antiphase_critical =
      bisect_sign([&](double c) { return table(c).g_prime_half; }, options.bracket, options.tol, "G'(T/2)");
  return out;
}

}  // namespace activemedia
