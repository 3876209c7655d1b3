#pragma once

// Independent numerics for the stability module: s* in 60-digit binary
// floating point, and a cell-by-cell argument-principle root locator.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace oracle {

using Big = boost::multiprecision::cpp_bin_float_50;

inline Big s_star_big(const Big& g, const Big& d, const Big& ds) {
  const Big disc = 5 * d * d * g * g - 2 * d * g * g * ds + 2 * d * g - 3 * g * g * ds * ds - 2 * g * ds + 1;
  return (-sqrt(disc) - d * g + g * ds - 1) / (g * (d * d - ds * ds));
}

// The other root of the same quadratic; s* is the smaller of the pair when
// d > d_s.
inline Big s_plus_big(const Big& g, const Big& d, const Big& ds) {
  const Big disc = 5 * d * d * g * g - 2 * d * g * g * ds + 2 * d * g - 3 * g * g * ds * ds - 2 * g * ds + 1;
  return (sqrt(disc) - d * g + g * ds - 1) / (g * (d * d - ds * ds));
}

// F(s) = s^2 + (2 - e^{-sd} + e^{-sd_s}) g s + alpha e^{-sd} + omega e^{-sd_s}
struct CharFn {
  double g, alpha, omega, d, ds;
  std::complex<double> operator()(std::complex<double> s) const {
    const auto e = std::exp(-s * d);
    const auto es = std::exp(-s * ds);
    return s * s + (2.0 - e + es) * g * s + alpha * e + omega * es;
  }
};

// Winding number of f around the axis-aligned box, sampled densely and with
// phase steps required to stay below pi/2.
template <class F>
int winding(const F& f, double x0, double x1, double y0, double y1, int n) {
  const std::complex<double> c[4] = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
  double total = 0;
  for (int k = 0; k < 4; ++k) {
    const auto a = c[k];
    const auto b = c[(k + 1) % 4];
    int m = n;
    for (int attempt = 0; attempt < 8; ++attempt, m *= 4) {
      double side = 0;
      bool smooth = true;
      auto prev = f(a);
      for (int i = 1; i <= m; ++i) {
        const auto z = a + (b - a) * (static_cast<double>(i) / m);
        const auto fz = f(z);
        const double step = std::arg(fz / prev);
        if (std::abs(step) > std::numbers::pi / 2) smooth = false;
        side += step;
        prev = fz;
      }
      if (smooth || attempt == 7) {
        total += side;
        break;
      }
    }
  }
  return static_cast<int>(std::lround(total / (2 * std::numbers::pi)));
}

struct CellCount {
  double x0, x1, y0, y1;
  int zeros;
};

// Partitions the box into nx * ny cells and counts zeros in each.
template <class F>
std::vector<CellCount> grid_zero_scan(const F& f, double x0, double x1, double y0, double y1, int nx, int ny,
                                      int per_side) {
  std::vector<CellCount> out;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double a = x0 + (x1 - x0) * i / nx, b = x0 + (x1 - x0) * (i + 1) / nx;
      const double c = y0 + (y1 - y0) * j / ny, d = y0 + (y1 - y0) * (j + 1) / ny;
      const int z = winding(f, a, b, c, d, per_side);
      if (z != 0) out.push_back({a, b, c, d, z});
    }
  }
  return out;
}

// Real roots by sign changes of the real restriction on a uniform grid.
template <class F>
std::vector<double> real_sign_changes(const F& f, double x0, double x1, int n) {
  std::vector<double> out;
  double prev = f(std::complex<double>{x0, 0}).real();
  for (int i = 1; i <= n; ++i) {
    const double x = x0 + (x1 - x0) * i / n;
    const double v = f(std::complex<double>{x, 0}).real();
    if ((prev < 0) != (v < 0)) out.push_back(x);
    prev = v;
  }
  return out;
}

}  // namespace oracle
