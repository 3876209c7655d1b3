#include "rpm/stability/roots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rpm/stability/kernel.hpp"

namespace rpm::stability {

using cplx = std::complex<double>;

Region standard_region(double d) {
  if (!(d > 0)) throw ConfigError("region needs d > 0");
  return {-5.0 / d, 0.5 / d, 0.0, 20.0 / d};
}

double RootSet::max_re() const {
  double m = -std::numeric_limits<double>::infinity();
  for (auto z : roots) m = std::max(m, z.real());
  return m;
}

namespace {

struct Newton {
  cplx z;
  bool ok = false;
};

Newton polish(const FluidParams& p, double eta, cplx z, const Region& r, const RootSearchOptions& opt) {
  const double span = std::max(r.re_max - r.re_min, r.im_max - r.im_min);
  for (int it = 0; it < opt.max_iter; ++it) {
    const cplx f = char_residual(z, eta, p);
    const double scale = char_scale(z, eta, p);
    if (std::abs(f) <= opt.rel_tol * scale) return {z, true};
    const cplx df = char_derivative(z, eta, p);
    if (df == cplx{}) return {z, false};
    cplx step = f / df;
    // Near s = 0 every term vanishes with s and the relative test cannot pass;
    // a negligible Newton step is then the convergence criterion.
    if (std::abs(step) <= 1e-14 * span) return {z - step, true};
    // Damping: never jump more than a tenth of the region, and halve until |F| drops.
    if (std::abs(step) > 0.1 * span) step *= 0.1 * span / std::abs(step);
    double lambda = 1.0;
    cplx next = z - step;
    for (int k = 0; k < 30 && std::abs(char_residual(next, eta, p)) >= std::abs(f); ++k) {
      lambda *= 0.5;
      next = z - lambda * step;
    }
    if (!std::isfinite(next.real()) || !std::isfinite(next.imag())) return {z, false};
    if (std::abs(next - z) <= 1e-15 * std::max(1.0, std::abs(z))) {
      const bool ok = std::abs(char_residual(next, eta, p)) <= 1e-9 * char_scale(next, eta, p);
      return {next, ok};
    }
    z = next;
  }
  return {z, false};
}

}  // namespace

RootSet find_dominant_roots(const FluidParams& p, double eta, const Region& r, const RootSearchOptions& opt) {
  p.validate();
  if (!(r.re_max > r.re_min && r.im_max > r.im_min)) throw ConfigError("empty search region");
  if (opt.nx < 3 || opt.ny < 3) throw ConfigError("root search lattice needs at least 3x3 points");

  const Lattice g{r.re_min, r.re_max, r.im_min, r.im_max, opt.nx, opt.ny};
  const auto m = char_modulus_grid(p, eta, g);
  const auto at = [&](std::size_t i, std::size_t j) { return m[j * g.nx + i]; };

  // |F|/scale tends to a constant as s -> 0, so a root at the origin leaves no
  // dip in the lattice. Real roots are also seeded from sign changes of F
  // along the real axis.
  std::vector<cplx> seeds;
  if (r.im_min <= 0 && r.im_max >= 0) {
    if (r.re_min <= 0 && r.re_max >= 0) seeds.emplace_back(0.0, 0.0);
    double prev = char_residual({g.re(0), 0.0}, eta, p).real();
    for (std::size_t i = 1; i < g.nx; ++i) {
      const double v = char_residual({g.re(i), 0.0}, eta, p).real();
      if ((prev < 0) != (v < 0)) seeds.emplace_back(0.5 * (g.re(i - 1) + g.re(i)), 0.0);
      prev = v;
    }
  }

  RootSet out;
  const double tol_abs = opt.dedup_tol * std::max(std::abs(r.re_min), std::abs(r.im_max));
  for (std::size_t j = 0; j < g.ny; ++j) {
    for (std::size_t i = 0; i < g.nx; ++i) {
      const double v = at(i, j);
      bool minimum = true;
      for (int dj = -1; dj <= 1 && minimum; ++dj) {
        for (int di = -1; di <= 1; ++di) {
          if (di == 0 && dj == 0) continue;
          const auto ii = static_cast<std::ptrdiff_t>(i) + di;
          const auto jj = static_cast<std::ptrdiff_t>(j) + dj;
          if (ii < 0 || jj < 0 || ii >= static_cast<std::ptrdiff_t>(g.nx) || jj >= static_cast<std::ptrdiff_t>(g.ny))
            continue;
          if (at(static_cast<std::size_t>(ii), static_cast<std::size_t>(jj)) < v) {
            minimum = false;
            break;
          }
        }
      }
      if (minimum) seeds.emplace_back(g.re(i), g.im(j));
    }
  }

  for (const cplx seed : seeds) {
    ++out.seeds;
    auto res = polish(p, eta, seed, r, opt);
    if (!res.ok) {
      ++out.failures;
      continue;
    }
    cplx z = res.z;
    if (z.imag() < 0) z = std::conj(z);
    if (std::abs(z.imag()) <= 1e-9 * std::max(1.0, std::abs(z))) z = {z.real(), 0.0};
    // Converged outside the region: not an error, just not ours.
    const double slack = tol_abs;
    const Region grown{r.re_min - slack, r.re_max + slack, r.im_min - slack, r.im_max + slack};
    if (!grown.contains(z)) continue;
    const bool dup = std::any_of(out.roots.begin(), out.roots.end(), [&](cplx q) {
      return std::abs(q - z) <= opt.dedup_tol * std::max(1.0, std::abs(z)) + tol_abs;
    });
    if (!dup) out.roots.push_back(z);
  }
  std::sort(out.roots.begin(), out.roots.end(), [](cplx x, cplx y) { return x.real() > y.real(); });
  return out;
}

int count_zeros(const FluidParams& p, double eta, const Region& r, std::size_t per_side) {
  p.validate();
  if (per_side < 16) throw ConfigError("argument principle needs at least 16 samples per side");
  const cplx corners[4] = {{r.re_min, r.im_min}, {r.re_max, r.im_min}, {r.re_max, r.im_max}, {r.re_min, r.im_max}};
  double winding = 0;
  // Recursively bisect any step whose phase change exceeds pi/4, so a near-zero on the
  // contour cannot alias.
  const auto segment = [&](auto&& self, cplx a, cplx b, cplx fa, cplx fb, int depth) -> void {
    const double dphi = std::arg(fb / fa);
    if (std::abs(dphi) > std::numbers::pi / 4 && depth < 40) {
      const cplx mid = 0.5 * (a + b);
      const cplx fm = char_residual(mid, eta, p);
      self(self, a, mid, fa, fm, depth + 1);
      self(self, mid, b, fm, fb, depth + 1);
      return;
    }
    winding += dphi;
  };
  for (int k = 0; k < 4; ++k) {
    const cplx a = corners[k];
    const cplx b = corners[(k + 1) % 4];
    cplx prev = a;
    cplx fprev = char_residual(a, eta, p);
    for (std::size_t n = 1; n <= per_side; ++n) {
      const cplx z = a + (b - a) * (static_cast<double>(n) / static_cast<double>(per_side));
      const cplx fz = char_residual(z, eta, p);
      if (fz == cplx{}) throw RuntimeError("zero on the counting contour");
      segment(segment, prev, z, fprev, fz, 0);
      prev = z;
      fprev = fz;
    }
  }
  return static_cast<int>(std::lround(winding / (2 * std::numbers::pi)));
}

}  // namespace rpm::stability
