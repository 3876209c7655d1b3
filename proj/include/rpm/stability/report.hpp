#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "rpm/stability/model.hpp"
#include "rpm/stability/roots.hpp"

namespace rpm::stability {

struct ReportOptions {
  double a = 1.0;
  double b = 0.5;
  double s_factor = 1.05;  // s = s_factor * s*
  double eta_scale = 1.0;  // multiplies the recipe eta before the root scan
  RootSearchOptions roots{};
  /// Also bracket real roots on (0.5/d, inf): the window above cannot see them.
  bool scan_positive_axis = true;
};

enum class Verdict { Stable, Unstable, Error };

std::string to_string(Verdict v);

struct StabilityRow {
  double a = 0, b = 0, c = 0, d = 0, d_s = 0;
  double s = 0, gamma = 0, eta = 0, alpha = 0, omega = 0, s_star = 0;
  double max_root_re = 0;
  Verdict verdict = Verdict::Error;
  std::string error;  // set when verdict == Error
  std::size_t roots_in_region = 0;
  std::optional<double> positive_real_root;
};

/// eta_for rewritten with e^{sd} factored out of numerator and denominator;
/// equal to eta_for in exact arithmetic and finite wherever the result is.
double eta_stable(double s, double d, double d_s, double c, double gamma);

/// Never throws for bad parameters: a degenerate (c, d, d_s) yields a row
/// whose verdict is Error and whose error field explains it.
StabilityRow stability_report(double c, double d, double d_s, const ReportOptions& opt = {});

/// n rows with d_s evenly spaced over [lo * d, hi * d].
std::vector<StabilityRow> sweep_ds(double c, double d, std::size_t n, double lo = 0.1, double hi = 0.9,
                                   const ReportOptions& opt = {});

/// a,b,c,d,d_s,s,gamma,eta,alpha,omega,s_star,max_root_re,verdict
void write_stability_header(std::ostream& os);
void write_stability_row(std::ostream& os, const StabilityRow& r);

}  // namespace rpm::stability
