#pragma once

// Classical fourth-order Runge-Kutta with step-doubling error control: each
// step of size h is compared against two steps of size h/2; the step is
// halved until the difference meets the tolerance and may double again
// (up to dt_max) after an accepted step.

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace birkhoff {

class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double t_reached)
      : std::runtime_error(what), t_reached_(t_reached) {}
  double t_reached() const { return t_reached_; }

 private:
  double t_reached_;
};

struct IntegratorOptions {
  double dt_max = 0.0;    // <= 0 selects the caller's default
  double tol = 1e-13;     // per-step error bound on the max-abs entry
  double dt_min = 1e-10;  // step-size underflow guard
};

template <typename State, typename Rhs>
State rk4_step(const Rhs& rhs, const State& y, double h) {
  const State k1 = rhs(y);
  const State k2 = rhs(State(y + (0.5 * h) * k1));
  const State k3 = rhs(State(y + (0.5 * h) * k2));
  const State k4 = rhs(State(y + h * k3));
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// State at every requested time. `times` must be non-decreasing and
/// non-negative; integration starts from `y0` at t = 0.
template <typename State, typename Rhs>
std::vector<State> integrate_adaptive(const Rhs& rhs, const State& y0, std::span<const double> times,
                                      const IntegratorOptions& opt) {
  if (!(opt.dt_max > 0.0)) throw std::invalid_argument("integrator needs a positive dt_max");
  std::vector<State> out;
  out.reserve(times.size());
  State y = y0;
  double t = 0.0;
  double h = opt.dt_max;
  for (double target : times) {
    if (target < t) throw std::invalid_argument("integrator times must be non-decreasing and >= 0");
    while (t < target) {
      const double remaining = target - t;
      double step = std::min(h, remaining);
      for (;;) {
        const State full = rk4_step(rhs, y, step);
        const State half = rk4_step(rhs, y, 0.5 * step);
        const State twice = rk4_step(rhs, half, 0.5 * step);
        const double err = (twice - full).cwiseAbs().maxCoeff() / 15.0;
        if (err <= opt.tol) {
          y = twice;
          t = step == remaining ? target : t + step;
          if (err < opt.tol / 32.0) h = std::min(opt.dt_max, 2.0 * h);
          break;
        }
        step *= 0.5;
        h = step;
        if (step < opt.dt_min)
          throw IntegrationError("step size underflow at t = " + std::to_string(t), t);
      }
    }
    out.push_back(y);
  }
  return out;
}

}  // namespace birkhoff
