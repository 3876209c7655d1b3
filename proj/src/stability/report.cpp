#include "rpm/stability/report.hpp"

#include <cmath>
#include <limits>

namespace rpm::stability {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Stable:
      return "stable";
    case Verdict::Unstable:
      return "unstable";
    case Verdict::Error:
      return "error";
  }
  return "error";
}

double eta_stable(double s, double d, double d_s, double c, double gamma) {
  const double u = std::exp(s * (d - d_s));  // e^{sd} / e^{s d_s}
  const double v = std::exp(s * d);
  return ((1.0 - u - 2.0 * v) * s * gamma - s * s * v) / (1.0 / (d * d) + c * c * u / 2.0);
}

namespace {

// Smallest real root of F on (from, inf), or nullopt. F(+inf) = +inf, so a
// sign change is bracketed by doubling.
std::optional<double> positive_real_root(const FluidParams& p, double eta, double from) {
  const auto f = [&](double x) { return char_residual({x, 0.0}, eta, p).real(); };
  double lo = from;
  double flo = f(lo);
  if (!(flo < 0)) return std::nullopt;  // an even number of crossings is not searched for
  double hi = std::max(2.0 * lo, 1.0);
  for (int k = 0; k < 200 && f(hi) < 0; ++k) {
    lo = hi;
    hi *= 2;
  }
  if (f(hi) < 0) return std::nullopt;
  for (int k = 0; k < 200 && hi - lo > 1e-14 * hi; ++k) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

StabilityRow stability_report(double c, double d, double d_s, const ReportOptions& opt) {
  StabilityRow row;
  row.a = opt.a;
  row.b = opt.b;
  row.c = c;
  row.d = d;
  row.d_s = d_s;
  try {
    auto p = FluidParams::from_delays(c, d, d_s, opt.a, opt.b);
    if (d == d_s) throw ConfigError("d must differ from d_s");
    p.validate();
    row.gamma = gamma(opt.a, opt.b, c, d);
    row.s_star = s_star(row.gamma, d, d_s);
    row.s = opt.s_factor * row.s_star;
    row.eta = opt.eta_scale * eta_stable(row.s, d, d_s, c, row.gamma);
    if (!std::isfinite(row.eta)) throw RuntimeError("eta is not finite");
    p.eta = row.eta;
    const auto k = derive(p);
    row.alpha = k.alpha;
    row.omega = k.omega;

    const Region region = standard_region(d);
    const auto roots = find_dominant_roots(p, row.eta, region, opt.roots);
    row.roots_in_region = roots.roots.size();
    row.max_root_re = roots.max_re();
    if (opt.scan_positive_axis) {
      row.positive_real_root = positive_real_root(p, row.eta, region.re_max);
      if (row.positive_real_root) row.max_root_re = std::max(row.max_root_re, *row.positive_real_root);
    }
    if (roots.roots.empty() && !row.positive_real_root) {
      row.verdict = Verdict::Error;
      row.error = "no roots found";
    } else {
      row.verdict = row.max_root_re < 0 ? Verdict::Stable : Verdict::Unstable;
    }
  } catch (const std::exception& e) {
    row.verdict = Verdict::Error;
    row.error = e.what();
    row.max_root_re = std::numeric_limits<double>::quiet_NaN();
  }
  return row;
}

std::vector<StabilityRow> sweep_ds(double c, double d, std::size_t n, double lo, double hi, const ReportOptions& opt) {
  if (n == 0) throw ConfigError("sweep needs at least one sample");
  if (!(lo > 0 && hi < 1 && lo <= hi)) throw ConfigError("sweep bounds must satisfy 0 < lo <= hi < 1");
  std::vector<StabilityRow> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double f = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    rows.push_back(stability_report(c, d, f * d, opt));
  }
  return rows;
}

void write_stability_header(std::ostream& os) {
  os << "a,b,c,d,d_s,s,gamma,eta,alpha,omega,s_star,max_root_re,verdict\n";
}

void write_stability_row(std::ostream& os, const StabilityRow& r) {
  const auto old = os.precision(17);
  os << r.a << ',' << r.b << ',' << r.c << ',' << r.d << ',' << r.d_s << ',' << r.s << ',' << r.gamma << ',' << r.eta
     << ',' << r.alpha << ',' << r.omega << ',' << r.s_star << ',' << r.max_root_re << ',' << to_string(r.verdict);
  if (r.verdict == Verdict::Error) {
    std::string msg = r.error;
    for (auto& ch : msg)
      if (ch == ',' || ch == '\n') ch = ';';
    os << ": " << msg;
  }
  os << '\n';
  os.precision(old);
}

}  // namespace rpm::stability
