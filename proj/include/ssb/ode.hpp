#pragma once

// Adaptive Runge-Kutta-Fehlberg 7(8) driver with a caller-owned step loop.
// The stepper itself comes from Boost.Odeint; step control, the error norm,
// the magnitude guard and step recording are done here.

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <sstream>

#include <boost/numeric/odeint/stepper/runge_kutta_fehlberg78.hpp>

#include "ssb/errors.hpp"

namespace ssb::ode {

struct Options {
  double rtol = 1e-10;
  double atol = 1e-14;
  double initial_step = 0.0;  // 0 -> 1% of the interval
  double max_step = std::numeric_limits<double>::infinity();
  double min_step_rel = 1e-12;  // floor is min_step_rel * max(|r|, 1e-6)
  std::size_t max_steps = 20'000'000;
  double guard = std::numeric_limits<double>::infinity();  // bound on |value|
};

struct Stats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  double smallest_step = std::numeric_limits<double>::infinity();
  double largest_step = 0.0;
};

// N = 2: real scalar second-order ODE (y, y').
// N = 4: complex scalar second-order ODE (Re y, Im y, Re y', Im y').
template <std::size_t N>
class Integrator {
  static_assert(N == 2 || N == 4, "state must be (y, y') real or complex");

 public:
  using state_type = std::array<double, N>;
  using Rhs = std::function<void(double, const state_type&, state_type&)>;

  Integrator(Rhs rhs, Options opt) : rhs_(std::move(rhs)), opt_(opt) {}

  const Stats& stats() const { return stats_; }
  const Options& options() const { return opt_; }

  // Advance y from r0 to r1. obs(r, y) is called after every accepted step.
  template <class Obs>
  state_type integrate(double r0, state_type y, double r1, Obs&& obs) {
    if (r0 == r1) return y;
    const double dir = r1 > r0 ? 1.0 : -1.0;
    double r = r0;
    if (h_ == 0.0 || h_ * dir < 0.0) {
      h_ = opt_.initial_step > 0 ? dir * opt_.initial_step : 0.01 * (r1 - r0);
    }
    std::size_t steps = 0;
    auto sys = [this](const state_type& x, state_type& dx, double t) { rhs_(t, x, dx); };
    state_type ynew;
    state_type yerr;
    while ((r1 - r) * dir > 0) {
      if (++steps > opt_.max_steps) fail(IntegrationError::Kind::step_limit, r, "step limit reached");
      double h = dir * std::min(std::abs(h_), opt_.max_step);
      bool clipped = false;
      if ((r + h - r1) * dir >= 0 || std::abs(r1 - (r + h)) <= 1e-13 * std::abs(r1)) {
        h = r1 - r;
        clipped = true;
      }
      const double floor = opt_.min_step_rel * std::max(std::abs(r), 1e-6);
      if (std::abs(h) < floor && !clipped) fail(IntegrationError::Kind::step_underflow, r, "step size underflow");
      stepper_.do_step(sys, y, r, ynew, h, yerr);
      const double en = error_norm(y, ynew, yerr);
      if (!std::isfinite(en)) {
        h_ = 0.25 * h;
        ++stats_.rejected;
        if (std::abs(h_) < floor) fail(IntegrationError::Kind::non_finite, r, "non-finite state");
        continue;
      }
      if (en <= 1.0) {
        r = clipped ? r1 : r + h;
        y = ynew;
        ++stats_.accepted;
        stats_.smallest_step = std::min(stats_.smallest_step, std::abs(h));
        stats_.largest_step = std::max(stats_.largest_step, std::abs(h));
        if (magnitude(y) > opt_.guard) fail(IntegrationError::Kind::divergence, r, "solution magnitude exceeded guard");
        obs(r, y);
        const double fac = en == 0.0 ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(en, -1.0 / 8.0)));
        if (!clipped || fac < 1.0) h_ = h * fac;
      } else {
        ++stats_.rejected;
        h_ = h * std::max(0.1, 0.9 * std::pow(en, -1.0 / 8.0));
      }
    }
    return y;
  }

  state_type integrate(double r0, const state_type& y, double r1) {
    return integrate(r0, y, r1, [](double, const state_type&) {});
  }

  // One unadapted step of size h. Used for dense output inside an accepted step.
  state_type single_step(double r0, const state_type& y, double h) {
    auto sys = [this](const state_type& x, state_type& dx, double t) { rhs_(t, x, dx); };
    state_type out;
    state_type err;
    stepper_.do_step(sys, y, r0, out, h, err);
    return out;
  }

  void derivative(double r, const state_type& y, state_type& dy) const { rhs_(r, y, dy); }

 private:
  static double magnitude(const state_type& y) {
    if constexpr (N == 4) return std::hypot(y[0], y[1]);
    else return std::abs(y[0]);
  }

  double error_norm(const state_type& y0, const state_type& y1, const state_type& e) const {
    if constexpr (N == 4) {
      const double sv = opt_.atol + opt_.rtol * std::max(std::hypot(y0[0], y0[1]), std::hypot(y1[0], y1[1]));
      const double sd = opt_.atol + opt_.rtol * std::max(std::hypot(y0[2], y0[3]), std::hypot(y1[2], y1[3]));
      return std::max(std::hypot(e[0], e[1]) / sv, std::hypot(e[2], e[3]) / sd);
    } else {
      const double sv = opt_.atol + opt_.rtol * std::max(std::abs(y0[0]), std::abs(y1[0]));
      const double sd = opt_.atol + opt_.rtol * std::max(std::abs(y0[1]), std::abs(y1[1]));
      return std::max(std::abs(e[0]) / sv, std::abs(e[1]) / sd);
    }
  }

  [[noreturn]] static void fail(IntegrationError::Kind kind, double r, const char* msg) {
    std::ostringstream os;
    os.precision(10);
    os << msg << " at r = " << r;
    throw IntegrationError(kind, r, os.str());
  }

  Rhs rhs_;
  Options opt_;
  Stats stats_;
  double h_ = 0.0;
  boost::numeric::odeint::runge_kutta_fehlberg78<state_type> stepper_;
};

}  // namespace ssb::ode
