#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rpm/stability/model.hpp"

namespace rpm::stability {

/// Rectangular lattice of complex points: nx columns over [re_min, re_max] and
/// ny rows over [im_min, im_max], row-major with the imaginary part per row.
struct Lattice {
  double re_min = 0;
  double re_max = 0;
  double im_min = 0;
  double im_max = 0;
  std::size_t nx = 2;
  std::size_t ny = 2;

  double re(std::size_t i) const;
  double im(std::size_t j) const;
};

enum class KernelIsa { Scalar, Avx2 };

std::string_view to_string(KernelIsa isa);

/// Best variant this CPU supports, unless overridden.
KernelIsa active_kernel();
/// Pins the variant used by the dispatching overload (nullopt: auto).
void force_kernel(std::optional<KernelIsa> isa);
bool kernel_supported(KernelIsa isa);

/// |F(z)| / char_scale(z) for every lattice point, written to `out`
/// (size nx * ny). The scalar variant is the reference.
void char_modulus_grid(const FluidParams& p, double eta, const Lattice& g, std::span<double> out, KernelIsa isa);
std::vector<double> char_modulus_grid(const FluidParams& p, double eta, const Lattice& g);

}  // namespace rpm::stability
