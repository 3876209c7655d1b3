#include "rpm/stability/integrate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace rpm::stability {

double FluidTrajectory::max_x() const { return x.empty() ? 0.0 : *std::max_element(x.begin(), x.end()); }

namespace {

class History {
 public:
  History(const FluidTrajectory& traj, FluidInitial init) : traj_(traj), init_(init) {}

  // Linear interpolation on the stored grid; constant before t = 0.
  double w(double t) const { return at(traj_.w, init_.w0, t); }
  double x(double t) const { return at(traj_.x, init_.x0, t); }

 private:
  double at(const std::vector<double>& v, double before, double t) const {
    if (t <= 0) return before;
    const double pos = t / traj_.step;
    auto i = static_cast<std::size_t>(pos);
    if (i + 1 >= v.size()) return v.back();
    const double f = pos - static_cast<double>(i);
    return v[i] + f * (v[i + 1] - v[i]);
  }

  const FluidTrajectory& traj_;
  FluidInitial init_;
};

}  // namespace

FluidTrajectory integrate_fluid(const FluidParams& p, double horizon, double step, FluidInitial init) {
  p.validate();
  const double d = p.d();
  const double ds = p.d_s();
  if (!(horizon > 0)) throw ConfigError("horizon must be positive");
  if (!(step > 0) || step > std::min(ds, d) / 50) throw ConfigError("step too large: need step <= min(d_s, d)/50");
  const double lag_mark = p.tau_r + p.tau_q;
  const std::array<double, 5> delays{d, lag_mark, ds, p.tau_rs, p.tau_f};
  for (double tau : delays) {
    if (tau > 0 && tau < step) throw ConfigError("step too large: a delay is shorter than the step");
  }

  FluidTrajectory traj;
  traj.step = step;
  const auto n = static_cast<std::size_t>(std::ceil(horizon / step));
  traj.t.reserve(n + 1);
  traj.w.reserve(n + 1);
  traj.x.reserve(n + 1);
  traj.t.push_back(0);
  traj.w.push_back(init.w0);
  traj.x.push_back(init.x0);
  const History hist(traj, init);

  // Derivative at time t for the stage state (w, x); a zero delay reads the
  // stage state itself.
  auto deriv = [&](double t, double w, double x) {
    auto wd = [&](double tau) { return tau == 0 ? w : hist.w(t - tau); };
    auto xd = [&](double tau) { return tau == 0 ? x : hist.x(t - tau); };
    const double excess_fwd = std::max(xd(lag_mark) - p.x_star, 0.0);
    const double excess_rev = std::max(xd(p.tau_rs) - p.x_star, 0.0);
    const double dw = p.a / w * (wd(d) / d) * (1 - p.eta * excess_fwd) - p.b * w * (wd(ds) / d) * p.eta * excess_rev;
    const double inflow = wd(p.tau_f) / d;
    const double dx = (x > 0 || inflow > p.c) ? inflow - p.c : 0.0;
    return std::array<double, 2>{dw, dx};
  };

  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * step;
    const double w = traj.w.back();
    const double x = traj.x.back();
    const auto k1 = deriv(t, w, x);
    const auto k2 = deriv(t + step / 2, w + step / 2 * k1[0], x + step / 2 * k1[1]);
    const auto k3 = deriv(t + step / 2, w + step / 2 * k2[0], x + step / 2 * k2[1]);
    const auto k4 = deriv(t + step, w + step * k3[0], x + step * k3[1]);
    double wn = w + step / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
    double xn = x + step / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
    if (!std::isfinite(wn) || !std::isfinite(xn)) {
      std::ostringstream msg;
      msg << "fluid state became non-finite at t=" << t + step << " (w=" << wn << ", x=" << xn << ")";
      throw RuntimeError(msg.str());
    }
    traj.t.push_back(t + step);
    traj.w.push_back(std::max(wn, 1.0));
    traj.x.push_back(std::max(xn, 0.0));
  }
  traj.r.reserve(traj.w.size());
  for (double w : traj.w) traj.r.push_back(w / d);
  return traj;
}

}  // namespace rpm::stability
