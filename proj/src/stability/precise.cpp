#include "rpm/stability/precise.hpp"

#include <algorithm>
#include <boost/multiprecision/mpfr.hpp>
#include <cmath>

namespace rpm::stability {

namespace mp = boost::multiprecision;

IdentityCheck recipe_identity(double s, double c, double d, double d_s) {
  if (!(c > 0 && d > 0 && d_s > 0)) throw ConfigError("identity check needs positive c, d, d_s");
  IdentityCheck out;
  out.s = s;
  // e^{|s| d} needs |s| d / ln 2 bits above the working precision.
  const double span = std::abs(s) * std::max(d, d_s);
  out.precision_bits = static_cast<unsigned>(1.45 * span) + 200;

  using Real = mp::mpfr_float;
  const auto saved = Real::default_precision();
  Real::default_precision(static_cast<unsigned>(std::ceil(out.precision_bits * 0.30103)) + 1);
  {
    const Real S{s}, C{c}, D{d}, DS{d_s}, A{1}, B{0.5};
    const Real g = gamma_of(A, B, C, D);
    const Real eta = eta_for(S, D, DS, C, g);
    const Real f = char_function_real(S, eta, A, B, C, D, DS);
    out.eta = eta.convert_to<double>();
    out.residual = mp::abs(f).convert_to<double>();
  }
  Real::default_precision(saved);

  const double g = gamma_of(1.0, 0.5, c, d);
  const double eta = eta_for(s, d, d_s, c, g);
  out.eta_finite_in_double = std::isfinite(eta);
  out.residual_double = std::abs(char_function_real(s, eta, 1.0, 0.5, c, d, d_s));
  return out;
}

}  // namespace rpm::stability
