#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "rpm/stability/model.hpp"

namespace rpm::stability {

struct Region {
  double re_min = 0;
  double re_max = 0;
  double im_min = 0;
  double im_max = 0;

  bool contains(std::complex<double> z) const {
    return z.real() >= re_min && z.real() <= re_max && z.imag() >= im_min && z.imag() <= im_max;
  }
};

/// Re in [-5/d, 0.5/d], Im in [0, 20/d]. Roots come in conjugate pairs, so
/// the lower half plane is implied.
Region standard_region(double d);

struct RootSearchOptions {
  std::size_t nx = 256;
  std::size_t ny = 512;
  int max_iter = 60;
  double rel_tol = 1e-12;   // |F| / char_scale at convergence
  double dedup_tol = 1e-8;  // relative distance under which two roots merge
};

struct RootSet {
  std::vector<std::complex<double>> roots;  // Im >= 0, sorted by real part, descending
  std::size_t seeds = 0;
  std::size_t failures = 0;  // seeds whose Newton iteration did not converge in the region
  double max_re() const;     // -inf when empty
};

/// Roots of the characteristic function inside `r`, found by damped Newton
/// from the local minima of |F|/scale on a lattice over the region.
RootSet find_dominant_roots(const FluidParams& p, double eta, const Region& r, const RootSearchOptions& opt = {});

/// Number of zeros enclosed by the rectangle, by the argument principle
/// (winding of F along the boundary, `per_side` samples per edge, refined
/// where the phase jumps). Independent of the Newton search.
int count_zeros(const FluidParams& p, double eta, const Region& r, std::size_t per_side = 4096);

}  // namespace rpm::stability
