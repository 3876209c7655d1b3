#include "rpm/stability/model.hpp"

namespace rpm::stability {

using cplx = std::complex<double>;

FluidParams FluidParams::from_delays(double c, double d, double d_s, double a, double b) {
  FluidParams p;
  p.a = a;
  p.b = b;
  p.c = c;
  p.tau_f = d_s / 2;
  p.tau_rs = d_s / 2;
  p.tau_r = d - d_s / 2;
  p.tau_q = 0;
  return p;
}

void FluidParams::validate() const {
  if (!(c > 0)) throw ConfigError("capacity c must be positive");
  if (!(a > 0)) throw ConfigError("additive increase a must be positive");
  if (!(b > 0 && b < 1)) throw ConfigError("decrease factor b must lie in (0, 1)");
  if (tau_f < 0 || tau_r < 0 || tau_rs < 0 || tau_q < 0) throw ConfigError("delays must be non-negative");
  if (!(d_s() > 0)) throw ConfigError("short loop delay d_s must be positive");
  if (!(d() > d_s())) throw ConfigError("loop delay d must exceed d_s");
  if (!std::isfinite(eta)) throw ConfigError("eta must be finite");
}

DerivedCoeffs derive(const FluidParams& p) {
  const double d = p.d();
  return {gamma(p.a, p.b, p.c, d), p.eta * p.a / (d * d), p.b * p.c * p.c * p.eta};
}

double gamma(double a, double b, double c, double d) {
  if (!(a > 0 && b > 0 && c > 0 && d > 0)) throw ConfigError("gamma needs positive a, b, c, d");
  return gamma_of(a, b, c, d);
}

namespace {

struct Terms {
  cplx s2, damping, delayed, short_loop;
  cplx e, es;
  double g;
};

Terms terms(cplx s, double eta, const FluidParams& p) {
  const auto k = derive(p);
  const double d = p.d();
  const double ds = p.d_s();
  Terms t;
  t.g = k.gamma;
  t.e = std::exp(-s * d);
  t.es = std::exp(-s * ds);
  t.s2 = s * s;
  t.damping = (2.0 - t.e + t.es) * k.gamma * s;
  t.short_loop = p.b * p.c * p.c * eta * t.es;
  t.delayed = eta * p.a / (d * d) * t.e;
  return t;
}

}  // namespace

cplx char_residual(cplx s, double eta, const FluidParams& p) {
  const auto t = terms(s, eta, p);
  return t.s2 + t.damping + t.delayed + t.short_loop;
}

cplx char_derivative(cplx s, double eta, const FluidParams& p) {
  const auto t = terms(s, eta, p);
  const double d = p.d();
  const double ds = p.d_s();
  return 2.0 * s + (2.0 - t.e + t.es) * t.g + (d * t.e - ds * t.es) * t.g * s - d * t.delayed - ds * t.short_loop;
}

double char_scale(cplx s, double eta, const FluidParams& p) {
  const auto t = terms(s, eta, p);
  return std::abs(t.s2) + t.g * std::abs(s) * (2.0 + std::abs(t.e) + std::abs(t.es)) + std::abs(t.delayed) +
         std::abs(t.short_loop);
}

double s_star(double gamma, double d, double d_s) {
  if (d == d_s) throw ConfigError("s* undefined for d == d_s");
  if (!(gamma > 0)) throw ConfigError("s* undefined for gamma <= 0");
  const double g = gamma;
  const double disc = 5 * d * d * g * g - 2 * d * g * g * d_s + 2 * d * g - 3 * g * g * d_s * d_s - 2 * g * d_s + 1;
  if (disc < 0) throw ConfigError("s*: negative discriminant");
  const double s = (-std::sqrt(disc) - d * g + g * d_s - 1) / (g * (d * d - d_s * d_s));
  if (!std::isfinite(s)) throw ConfigError("s*: non-finite result");
  if (!(s < 0)) throw ConfigError("s*: result is not negative");
  return s;
}

}  // namespace rpm::stability
