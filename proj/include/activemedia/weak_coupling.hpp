#pragma once

#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

namespace activemedia {

/// Inputs of the weak-coupling reduction of the OEEO chain (c_eo -> 0).
struct ReductionInputs {
  double c_oe = 0.5;
  double c_ee = 0.5;
  double b = 1.1;
  /// O-E waveform sin(u) + a sin(2u); a = 0 is the symmetric default.
  double second_harmonic = 0.0;
  /// Grid size; 0 picks 2048 / sqrt(1 - c_oe) rounded up to a power of two.
  std::size_t grid_size = 0;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  std::size_t resolved_grid() const;
  bool operator==(const ReductionInputs&) const = default;
};

struct OrbitU {
  double period = 0.0;
  std::vector<double> s;
  std::vector<double> u;
  /// U(T) - 2*pi from the integration, a check on the quadrature period.
  double endpoint_error = 0.0;
};

/// T from periodic trapezoid quadrature and U on a uniform grid of [0, T).
OrbitU periodic_orbit_U(double c_oe, std::size_t grid_size, double second_harmonic = 0.0);

/// The 2x2 linearisation of the E pair at rest.
std::pair<std::pair<double, double>, std::pair<double, double>> rest_matrix(double b, double c_ee);
/// Eigenvalues of rest_matrix, ascending.
std::pair<double, double> rest_eigenvalues(double b, double c_ee);

struct GZero {
  double phi = 0.0;
  bool stable = false;
};

struct GFunctionTable {
  ReductionInputs inputs;
  double period = 0.0;
  std::vector<double> s;
  std::vector<double> u;
  std::vector<double> u_prime;
  std::vector<double> m;
  std::vector<double> w1;
  std::vector<double> w2;
  std::vector<double> h;
  std::vector<double> g;
  std::vector<GZero> zeros;
  double g_prime_zero = 0.0;
  double g_prime_half = 0.0;
  /// max |W(T) - W(0)| of the periodic forced response.
  double w_residual = 0.0;

  // Spectral data for evaluating H off the grid.
  double h_constant = 0.0;
  std::vector<std::complex<double>> cross_spectrum;
};

/// The T-periodic solution of W' = A W + (h(U), 0), sampled on the U grid.
std::pair<std::vector<double>, std::vector<double>> forced_response_W(const ReductionInputs& inputs,
                                                                      const OrbitU& orbit, double* residual = nullptr);

/// Full reduction: U, W, m, H and G on the grid, zeros of G, G'(0), G'(T/2).
GFunctionTable reduce(const ReductionInputs& inputs);

/// H(phi), phi taken mod T, with trigonometric interpolation of w2.
double interaction_H(const GFunctionTable& table, double phi);
/// G(phi) = H(-phi) - H(phi).
double coupling_G(const GFunctionTable& table, double phi);
/// Centered difference of G with step T / 8192.
double coupling_G_prime(const GFunctionTable& table, double phi);

struct CriticalOptions {
  std::pair<double, double> bracket{0.3, 0.9};
  double tol = 1e-4;
};

/// c_oe where G'(0) changes sign. Throws std::domain_error without a sign
/// change on the bracket.
double critical_coe(double b, double c_ee, const CriticalOptions& options = {}, double second_harmonic = 0.0);

struct SymmetryBreaking {
  double synchrony_critical = 0.0;
  double antiphase_critical = 0.0;
};

/// Separate sign-change locations of G'(0) and G'(T/2) for the waveform
/// sin(u) + a sin(2u).
SymmetryBreaking symmetry_breaking_check(double a, double b, double c_ee, const CriticalOptions& options = {});

}  // namespace activemedia
