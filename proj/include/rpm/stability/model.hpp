#pragma once

#include <cmath>
#include <complex>

#include "rpm/core/errors.hpp"

namespace rpm::stability {

/// Parameters of the single-bottleneck AIMD fluid model with reverse-path
/// marking. Delays in seconds, c in packets per second, x_star in packets.
struct FluidParams {
  double a = 1.0;
  double b = 0.5;
  double c = 0;
  double tau_f = 0;   // sender to bottleneck
  double tau_r = 0;   // rest of the forward loop
  double tau_rs = 0;  // bottleneck back to the sender on the reverse path
  double tau_q = 0;   // queueing delay
  double x_star = 0;
  double eta = 0;

  double d() const { return tau_f + tau_r + tau_q; }
  double d_s() const { return tau_f + tau_rs; }

  /// Splits d_s evenly between tau_f and tau_rs and puts the rest of d into tau_r.
  static FluidParams from_delays(double c, double d, double d_s, double a = 1.0, double b = 0.5);

  /// Throws ConfigError unless d > d_s > 0, c > 0, a > 0 and 0 < b < 1. A
  /// negative eta is accepted: the recipe can produce one and callers report it.
  void validate() const;
};

struct DerivedCoeffs {
  double gamma = 0;
  double alpha = 0;  // eta * a / d^2
  double omega = 0;  // b * c^2 * eta
};

DerivedCoeffs derive(const FluidParams& p);

/// abc / (a + b c^2 d^2).
template <class Real>
Real gamma_of(const Real& a, const Real& b, const Real& c, const Real& d) {
  return a * b * c / (a + b * c * c * d * d);
}

/// Checked double-precision form; throws ConfigError on non-positive inputs.
double gamma(double a, double b, double c, double d);

/// Marking factor that makes the real point s a root of the characteristic
/// function for a = 1, b = 1/2:
///   ((e^{-sd} - e^{-s d_s} - 2) s gamma - s^2) / (e^{-sd}/d^2 + c^2 e^{-s d_s}/2)
template <class Real>
Real eta_for(const Real& s, const Real& d, const Real& d_s, const Real& c, const Real& gamma) {
  using std::exp;
  const Real e = exp(-s * d);
  const Real es = exp(-s * d_s);
  return ((e - es - 2) * s * gamma - s * s) / (e / (d * d) + c * c * es / 2);
}

/// Real-axis characteristic function for arbitrary scalar types:
///   s^2 + (2 - e^{-sd} + e^{-s d_s}) gamma s + alpha e^{-sd} + omega e^{-s d_s}
template <class Real>
Real char_function_real(const Real& s, const Real& eta, const Real& a, const Real& b, const Real& c,
                        const Real& d, const Real& d_s) {
  using std::exp;
  const Real g = gamma_of(a, b, c, d);
  const Real e = exp(-s * d);
  const Real es = exp(-s * d_s);
  const Real alpha = eta * a / (d * d);
  const Real omega = b * c * c * eta;
  return s * s + (2 - e + es) * g * s + alpha * e + omega * es;
}

/// Characteristic function at complex s.
std::complex<double> char_residual(std::complex<double> s, double eta, const FluidParams& p);

/// d/ds of char_residual.
std::complex<double> char_derivative(std::complex<double> s, double eta, const FluidParams& p);

/// Sum of the moduli of the terms of char_residual; the natural scale for
/// judging a residual.
double char_scale(std::complex<double> s, double eta, const FluidParams& p);

/// (-sqrt(D) - d gamma + gamma d_s - 1) / (gamma (d^2 - d_s^2)) with
/// D = 5d^2g^2 - 2d g^2 d_s + 2dg - 3g^2 d_s^2 - 2g d_s + 1.
/// Throws ConfigError for d == d_s, gamma <= 0, D < 0 or a non-negative result.
double s_star(double gamma, double d, double d_s);

}  // namespace rpm::stability
