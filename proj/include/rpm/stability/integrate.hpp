#pragma once

#include <vector>

#include "rpm/stability/model.hpp"

namespace rpm::stability {

struct FluidTrajectory {
  double step = 0;
  std::vector<double> t;
  std::vector<double> w;  // window, packets
  std::vector<double> r;  // sending rate w / d, packets per second
  std::vector<double> x;  // bottleneck queue, packets

  double max_x() const;
};

struct FluidInitial {
  double w0 = 1.0;
  double x0 = 0.0;
};

/// Fixed-step RK4 integration of the window equation
///   w' = a/w r(t-d) (1 - eta [x(t - tau_r - tau_q) - x*]+) - b w r(t - d_s) eta [x(t - tau_rs) - x*]+
/// coupled with the fluid queue x' = r(t - tau_f) - c (held at 0 while the
/// queue is empty and the inflow does not exceed c), r = w/d. Delayed values
/// are linearly interpolated from the stored trajectory; the history on
/// [-d, 0] is the constant initial state. After each step w >= 1 and x >= 0.
///
/// Throws ConfigError when step > min(d_s, d)/50 or a non-zero delay is
/// shorter than the step, and RuntimeError when the state stops being finite.
FluidTrajectory integrate_fluid(const FluidParams& p, double horizon, double step, FluidInitial init = {});

}  // namespace rpm::stability
