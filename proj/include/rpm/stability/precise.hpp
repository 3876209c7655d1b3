#pragma once

#include "rpm/stability/model.hpp"

namespace rpm::stability {

struct IdentityCheck {
  double s = 0;
  double eta = 0;         // rounded to double
  double residual = 0;    // |F(s, eta)| evaluated in extended precision, rounded
  unsigned precision_bits = 0;
  bool eta_finite_in_double = false;  // eta_for<double> gives a finite value
  double residual_double = 0;         // same identity evaluated purely in double (may be inf/nan)
};

/// Evaluates eta_for(s) and char_residual(s, eta) with a = 1, b = 1/2 in
/// MPFR arithmetic. The precision grows with |s| max(d, d_s) so that the
/// cancellation between e^{-sd}-sized terms still leaves a meaningful result.
IdentityCheck recipe_identity(double s, double c, double d, double d_s);

}  // namespace rpm::stability
