#include "rpm/stability/kernel.hpp"

#include <atomic>
#include <cmath>

#if defined(__x86_64__)
#include <immintrin.h>
#endif

namespace rpm::stability {

double Lattice::re(std::size_t i) const {
  return re_min + (re_max - re_min) * static_cast<double>(i) / static_cast<double>(nx - 1);
}

double Lattice::im(std::size_t j) const {
  return im_min + (im_max - im_min) * static_cast<double>(j) / static_cast<double>(ny - 1);
}

std::string_view to_string(KernelIsa isa) { return isa == KernelIsa::Avx2 ? "avx2" : "scalar"; }

namespace {

std::atomic<int> g_forced{-1};

// Per-column and per-row factors shared by both variants: along a row only
// the real part changes, so e^{-x d} is tabulated per column and the phase
// e^{-i y d} per row.
struct Tables {
  double gamma, alpha, omega;
  std::vector<double> x, ed, eds;  // per column
};

Tables make_tables(const FluidParams& p, double eta, const Lattice& g) {
  const auto k = derive(p);
  Tables t{k.gamma, eta * p.a / (p.d() * p.d()), p.b * p.c * p.c * eta, {}, {}, {}};
  t.x.resize(g.nx);
  t.ed.resize(g.nx);
  t.eds.resize(g.nx);
  for (std::size_t i = 0; i < g.nx; ++i) {
    t.x[i] = g.re(i);
    t.ed[i] = std::exp(-t.x[i] * p.d());
    t.eds[i] = std::exp(-t.x[i] * p.d_s());
  }
  return t;
}

void row_scalar(const Tables& t, double y, double cd, double sd, double cds, double sds, std::size_t nx, double* out) {
  for (std::size_t i = 0; i < nx; ++i) {
    const double x = t.x[i];
    // E = ed (cd - i sd), Es = eds (cds - i sds)
    const double er = t.ed[i] * cd, ei = -t.ed[i] * sd;
    const double sr = t.eds[i] * cds, si = -t.eds[i] * sds;
    const double mr = 2.0 - er + sr, mi = -ei + si;  // 2 - E + Es
    const double fr = x * x - y * y + t.gamma * (mr * x - mi * y) + t.alpha * er + t.omega * sr;
    const double fi = 2.0 * x * y + t.gamma * (mr * y + mi * x) + t.alpha * ei + t.omega * si;
    const double az = std::sqrt(x * x + y * y);
    const double scale = az * az + t.gamma * az * (2.0 + t.ed[i] + t.eds[i]) + std::abs(t.alpha) * t.ed[i] +
                         std::abs(t.omega) * t.eds[i];
    out[i] = std::sqrt(fr * fr + fi * fi) / scale;
  }
}

#if defined(__x86_64__)
__attribute__((target("avx2,fma"))) void row_avx2(const Tables& t, double y, double cd, double sd, double cds,
                                                   double sds, std::size_t nx, double* out) {
  const __m256d vy = _mm256_set1_pd(y), vcd = _mm256_set1_pd(cd), vsd = _mm256_set1_pd(sd);
  const __m256d vcds = _mm256_set1_pd(cds), vsds = _mm256_set1_pd(sds);
  const __m256d g = _mm256_set1_pd(t.gamma), al = _mm256_set1_pd(t.alpha), om = _mm256_set1_pd(t.omega);
  const __m256d aal = _mm256_set1_pd(std::abs(t.alpha)), aom = _mm256_set1_pd(std::abs(t.omega));
  const __m256d two = _mm256_set1_pd(2.0), zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= nx; i += 4) {
    const __m256d x = _mm256_loadu_pd(&t.x[i]);
    const __m256d ed = _mm256_loadu_pd(&t.ed[i]);
    const __m256d eds = _mm256_loadu_pd(&t.eds[i]);
    const __m256d er = _mm256_mul_pd(ed, vcd);
    const __m256d ei = _mm256_sub_pd(zero, _mm256_mul_pd(ed, vsd));
    const __m256d sr = _mm256_mul_pd(eds, vcds);
    const __m256d si = _mm256_sub_pd(zero, _mm256_mul_pd(eds, vsds));
    const __m256d mr = _mm256_add_pd(_mm256_sub_pd(two, er), sr);
    const __m256d mi = _mm256_add_pd(_mm256_sub_pd(zero, ei), si);
    // Same operation order as the scalar loop, no contraction, so results match bit for bit
    // up to the final square root.
    __m256d fr = _mm256_sub_pd(_mm256_mul_pd(x, x), _mm256_mul_pd(vy, vy));
    fr = _mm256_add_pd(fr, _mm256_mul_pd(g, _mm256_sub_pd(_mm256_mul_pd(mr, x), _mm256_mul_pd(mi, vy))));
    fr = _mm256_add_pd(fr, _mm256_mul_pd(al, er));
    fr = _mm256_add_pd(fr, _mm256_mul_pd(om, sr));
    __m256d fi = _mm256_mul_pd(_mm256_mul_pd(two, x), vy);
    fi = _mm256_add_pd(fi, _mm256_mul_pd(g, _mm256_add_pd(_mm256_mul_pd(mr, vy), _mm256_mul_pd(mi, x))));
    fi = _mm256_add_pd(fi, _mm256_mul_pd(al, ei));
    fi = _mm256_add_pd(fi, _mm256_mul_pd(om, si));
    const __m256d az = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(x, x), _mm256_mul_pd(vy, vy)));
    __m256d scale = _mm256_mul_pd(az, az);
    scale = _mm256_add_pd(scale, _mm256_mul_pd(_mm256_mul_pd(g, az), _mm256_add_pd(_mm256_add_pd(two, ed), eds)));
    scale = _mm256_add_pd(scale, _mm256_mul_pd(aal, ed));
    scale = _mm256_add_pd(scale, _mm256_mul_pd(aom, eds));
    const __m256d mod = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(fr, fr), _mm256_mul_pd(fi, fi)));
    _mm256_storeu_pd(out + i, _mm256_div_pd(mod, scale));
  }
  if (i < nx) {
    Tables tail{t.gamma, t.alpha, t.omega, {t.x.begin() + static_cast<std::ptrdiff_t>(i), t.x.end()},
                {t.ed.begin() + static_cast<std::ptrdiff_t>(i), t.ed.end()},
                {t.eds.begin() + static_cast<std::ptrdiff_t>(i), t.eds.end()}};
    row_scalar(tail, y, cd, sd, cds, sds, nx - i, out + i);
  }
}
#endif

}  // namespace

bool kernel_supported(KernelIsa isa) {
  if (isa == KernelIsa::Scalar) return true;
#if defined(__x86_64__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

KernelIsa active_kernel() {
  const int forced = g_forced.load();
  if (forced >= 0) return static_cast<KernelIsa>(forced);
  return kernel_supported(KernelIsa::Avx2) ? KernelIsa::Avx2 : KernelIsa::Scalar;
}

void force_kernel(std::optional<KernelIsa> isa) {
  if (isa && !kernel_supported(*isa)) throw ConfigError("kernel variant not supported on this CPU");
  g_forced.store(isa ? static_cast<int>(*isa) : -1);
}

void char_modulus_grid(const FluidParams& p, double eta, const Lattice& g, std::span<double> out, KernelIsa isa) {
  if (g.nx < 2 || g.ny < 2) throw ConfigError("lattice needs at least 2x2 points");
  if (out.size() != g.nx * g.ny) throw ContractViolation("lattice output size mismatch");
  if (!kernel_supported(isa)) throw ConfigError("kernel variant not supported on this CPU");
  const auto t = make_tables(p, eta, g);
  for (std::size_t j = 0; j < g.ny; ++j) {
    const double y = g.im(j);
    const double cd = std::cos(y * p.d()), sd = std::sin(y * p.d());
    const double cds = std::cos(y * p.d_s()), sds = std::sin(y * p.d_s());
    double* row = out.data() + j * g.nx;
#if defined(__x86_64__)
    if (isa == KernelIsa::Avx2) {
      row_avx2(t, y, cd, sd, cds, sds, g.nx, row);
      continue;
    }
#endif
    row_scalar(t, y, cd, sd, cds, sds, g.nx, row);
  }
}

std::vector<double> char_modulus_grid(const FluidParams& p, double eta, const Lattice& g) {
  std::vector<double> out(g.nx * g.ny);
  char_modulus_grid(p, eta, g, out, active_kernel());
  return out;
}

}  // namespace rpm::stability
