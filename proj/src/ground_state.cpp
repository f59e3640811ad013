#include "ssb/ground_state.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ssb/errors.hpp"
#include "ssb/grid.hpp"
#include "ssb/hermite.hpp"
#include "ssb/ode.hpp"

namespace ssb {

namespace {

using State = std::array<double, 2>;

struct Stop {};

enum class Shot { under, over };

struct ShotResult {
  Shot kind;
  double radius;  // where the trajectory left the funnel
};

double nonlinearity(double q, double p) { return std::pow(std::abs(q), p - 1.0) * q; }

ode::Integrator<2>::Rhs gs_rhs(int d, double p) {
  return [d, p](double r, const State& y, State& dy) {
    dy[0] = y[1];
    dy[1] = -(d - 1) / r * y[1] + y[0] - nonlinearity(y[0], p);
  };
}

State series_start(int d, double p, double q0, double eps) {
  const double c = (q0 - nonlinearity(q0, p)) / d;
  return {q0 + 0.5 * c * eps * eps, c * eps};
}

ode::Options shoot_options(double tol) {
  ode::Options o;
  o.rtol = std::clamp(tol * 1e-2, 1e-14, 1e-8);
  o.atol = 1e-30;
  o.max_step = 0.05;
  return o;
}

ShotResult shoot(int d, double p, double q0, double tol, const GroundStateOptions& opt) {
  ode::Integrator<2> integ(gs_rhs(d, p), shoot_options(tol));
  ShotResult res{Shot::under, opt.r_max};
  try {
    integ.integrate(opt.eps_start, series_start(d, p, q0, opt.eps_start), opt.r_max, [&](double r, const State& y) {
      if (y[0] < 0) {
        res = {Shot::over, r};
        throw Stop{};
      }
      if (y[1] > 0) {
        res = {Shot::under, r};
        throw Stop{};
      }
    });
  } catch (const Stop&) {
  }
  return res;
}

// Decaying solution of the linear tail equation y'' + (d-1)/r y' - y = 0 and its derivative.
std::pair<double, double> decaying_linear(int d, double r) {
  const double nu = 0.5 * d - 1.0;
  const double s = std::pow(r, -nu);
  return {s * std::cyl_bessel_k(std::abs(nu), r), -s * std::cyl_bessel_k(std::abs(nu + 1.0), r)};
}

std::size_t node_index(double r, double h) { return static_cast<std::size_t>(std::llround(r / h)); }

}  // namespace

double closed_form_soliton_1d(double p, double r) {
  if (!(p > 1)) throw DomainError("closed_form_soliton_1d: p must exceed 1");
  if (r < 0) throw DomainError("closed_form_soliton_1d: r must be non-negative");
  const double x = 0.5 * (p - 1) * r;
  const double e = std::exp(-x);
  const double sech = 2 * e / (1 + e * e);
  return std::pow(0.5 * (p + 1), 1 / (p - 1)) * std::pow(sech, 2 / (p - 1));
}

double closed_form_soliton_1d_derivative(double p, double r) {
  const double x = 0.5 * (p - 1) * r;
  return -closed_form_soliton_1d(p, r) * std::tanh(x);
}

std::pair<double, double> GroundState::eval(double r) const {
  if (r < 0) throw DomainError("ground state evaluated at negative radius");
  if (r >= r_max()) {
    const double g = std::pow(r, -0.5 * (d - 1)) * std::exp(-r);
    const double v = kappa * g * (1 + kappa_c / r);
    const double dv = kappa * g * (-(1 + kappa_c / r) * (1 + 0.5 * (d - 1) / r) - kappa_c / (r * r));
    return {v, dv};
  }
  std::size_t i = std::min(static_cast<std::size_t>(r / h), grid.size() - 2);
  const double t = (r - grid[i]) / h;
  return hermite5({q[i], qp[i], qpp[i]}, {q[i + 1], qp[i + 1], qpp[i + 1]}, h, t);
}

double GroundState::second(double r, double qv, double qd) const {
  if (r == 0.0) return (qv - nonlinearity(qv, p)) / d;
  return -(d - 1) / r * qd + qv - nonlinearity(qv, p);
}

double GroundState::residual_sup() const {
  // Q' is odd: mirror ghost nodes so the stencils near r = 0 stay centered.
  constexpr std::size_t ghost = 5;
  std::vector<double> ext(grid.size() + ghost);
  for (std::size_t k = 0; k < ghost; ++k) ext[k] = -qp[ghost - k];
  std::copy(qp.begin(), qp.end(), ext.begin() + ghost);
  const grid::Uniform g{-h * ghost, h, ext.size()};
  const auto dext = grid::derivative(g, ext, 1, 11);
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double r = grid[i];
    const double qdd = dext[i + ghost];
    const double lap = r == 0.0 ? d * qdd : qdd + (d - 1) / r * qp[i];
    worst = std::max(worst, std::abs(lap - q[i] + nonlinearity(q[i], p)));
  }
  return worst;
}

GroundState solve_ground_state(int d, double p, double tol, const GroundStateOptions& opt) {
  if (d < 1) throw ConfigError("dimension must be at least 1");
  if (!(p > 1)) throw ConfigError("exponent p must exceed 1");
  if (d >= 3 && !(p < (d + 2.0) / (d - 2.0))) throw ConfigError("exponent p must be energy subcritical");
  if (!(tol > 0)) throw ConfigError("shooting tolerance must be positive");

  // Geometric scan for an (under, over) pair.
  double lo = 0.0;
  double hi = 0.0;
  ShotResult shot_lo{};
  ShotResult shot_hi{};
  {
    double prev = opt.bracket_lo;
    ShotResult prev_shot = shoot(d, p, prev, tol, opt);
    bool found = false;
    for (int k = 1; k < opt.scan_points && !found; ++k) {
      const double q0 = opt.bracket_lo * std::pow(opt.bracket_hi / opt.bracket_lo, double(k) / (opt.scan_points - 1));
      const ShotResult s = shoot(d, p, q0, tol, opt);
      if (prev_shot.kind == Shot::under && s.kind == Shot::over) {
        lo = prev;
        hi = q0;
        shot_lo = prev_shot;
        shot_hi = s;
        found = true;
      }
      prev = q0;
      prev_shot = s;
    }
    if (!found) {
      std::ostringstream os;
      os << "no shooting bracket for Q(0) in [" << opt.bracket_lo << ", " << opt.bracket_hi << "]";
      throw ConfigError(os.str());
    }
  }

  int iter = 0;
  while (hi - lo > 4e-16 * hi) {
    if (++iter > opt.max_bisections) {
      std::ostringstream os;
      os.precision(17);
      os << "ground-state bisection did not converge; bracket [" << lo << ", " << hi << "]";
      throw NumericalError(os.str());
    }
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const ShotResult s = shoot(d, p, mid, tol, opt);
    if (s.kind == Shot::over) {
      hi = mid;
      shot_hi = s;
    } else {
      lo = mid;
      shot_lo = s;
    }
  }

  GroundState gs;
  gs.d = d;
  gs.p = p;
  gs.h = opt.step;
  gs.q0 = 0.5 * (lo + hi);
  gs.shoot_tol = tol;
  gs.bisections = iter;
  gs.departure_radius = std::min(shot_lo.radius, shot_hi.radius);

  const std::size_t n = node_index(opt.r_max, opt.step) + 1;
  gs.grid.resize(n);
  gs.q.resize(n);
  gs.qp.resize(n);
  gs.qpp.resize(n);
  for (std::size_t i = 0; i < n; ++i) gs.grid[i] = opt.step * static_cast<double>(i);
  const double r_end = gs.grid.back();

  const std::size_t im = std::max<std::size_t>(node_index(std::min(opt.match_radius, 0.5 * gs.departure_radius), opt.step), 10);
  gs.junction_radius = gs.grid[im];

  // Two-sided polish: forward from the series start, backward from the decaying
  // linear tail, with (Q(0), tail amplitude) fixed by C^1 continuity at the junction.
  const auto opts = shoot_options(tol);
  auto forward = [&](double q0, bool record) {
    ode::Integrator<2> integ(gs_rhs(d, p), opts);
    State y = series_start(d, p, q0, opt.eps_start);
    double r = opt.eps_start;
    if (record) {
      gs.q[0] = q0;
      gs.qp[0] = 0.0;
    }
    for (std::size_t i = 1; i <= im; ++i) {
      y = integ.integrate(r, y, gs.grid[i]);
      r = gs.grid[i];
      if (record) {
        gs.q[i] = y[0];
        gs.qp[i] = y[1];
      }
    }
    return y;
  };
  const auto [k_end, kd_end] = decaying_linear(d, r_end);
  auto backward = [&](double amp, bool record) {
    ode::Integrator<2> integ(gs_rhs(d, p), opts);
    State y{amp * k_end, amp * kd_end};
    double r = r_end;
    if (record) {
      gs.q[n - 1] = y[0];
      gs.qp[n - 1] = y[1];
    }
    for (std::size_t i = n - 1; i-- > im;) {
      y = integ.integrate(r, y, gs.grid[i]);
      r = gs.grid[i];
      if (record && i > im) {
        gs.q[i] = y[0];
        gs.qp[i] = y[1];
      }
    }
    return y;
  };
  double q0 = gs.q0;
  State yf = forward(q0, false);
  double amp = yf[0] / decaying_linear(d, gs.junction_radius).first;
  State yb = backward(amp, false);
  const double scale = std::abs(yf[0]) + std::abs(yf[1]);
  for (int k = 0; k < 8; ++k) {
    const double f0 = yf[0] - yb[0];
    const double f1 = yf[1] - yb[1];
    if (std::abs(f0) + std::abs(f1) <= 1e-14 * scale) break;
    const double dq = 1e-8 * q0;
    const double da = 1e-6 * amp;
    const State yf2 = forward(q0 + dq, false);
    const State yb2 = backward(amp + da, false);
    const double j00 = (yf2[0] - yf[0]) / dq, j01 = -(yb2[0] - yb[0]) / da;
    const double j10 = (yf2[1] - yf[1]) / dq, j11 = -(yb2[1] - yb[1]) / da;
    const double det = j00 * j11 - j01 * j10;
    q0 -= (f0 * j11 - j01 * f1) / det;
    amp -= (j00 * f1 - j10 * f0) / det;
    yf = forward(q0, false);
    yb = backward(amp, false);
  }
  gs.q0 = q0;
  forward(q0, true);
  const State at_junction = backward(amp, true);
  gs.junction_slope_mismatch = std::abs(at_junction[1] - gs.qp[im]) / std::abs(gs.qp[im]);

  for (std::size_t i = 0; i < n; ++i) gs.qpp[i] = gs.second(gs.grid[i], gs.q[i], gs.qp[i]);

  for (std::size_t i = 1; i < n; ++i) {
    if (!(gs.q[i] > 0) || !(gs.q[i] < gs.q[i - 1])) {
      std::ostringstream os;
      os << "ground state lost monotone positivity at r = " << gs.grid[i];
      throw NumericalError(os.str());
    }
  }

  const KappaFit fit = [&] {
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = gs.q[i] * std::pow(gs.grid[i], 0.5 * (d - 1)) * std::exp(gs.grid[i]);
    return fit_tail(gs.grid, y, d, 0.5 * r_end, r_end);
  }();
  gs.kappa = fit.kappa;
  gs.kappa_c = fit.c;
  const MassIntegral m = mass_integral(gs);
  gs.n_c = m.value;
  gs.n_c_error = m.error;
  return gs;
}

KappaFit fit_tail(const std::vector<double>& r, const std::vector<double>& y, int, double lo, double hi) {
  // Normal equations for y ~ a + b/r.
  double s00 = 0, s01 = 0, s11 = 0, t0 = 0, t1 = 0;
  std::size_t m = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] < lo - 1e-12 || r[i] > hi + 1e-12) continue;
    const double u = 1.0 / r[i];
    s00 += 1;
    s01 += u;
    s11 += u * u;
    t0 += y[i];
    t1 += y[i] * u;
    ++m;
  }
  if (m < 10) throw ConfigError("tail fit window holds fewer than 10 nodes");
  const double det = s00 * s11 - s01 * s01;
  const double a = (t0 * s11 - t1 * s01) / det;
  const double b = (s00 * t1 - s01 * t0) / det;
  KappaFit fit;
  fit.kappa = a;
  fit.c = b / a;
  fit.nodes = m;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] < lo - 1e-12 || r[i] > hi + 1e-12) continue;
    fit.max_residual = std::max(fit.max_residual, std::abs(y[i] - a - b / r[i]));
  }
  return fit;
}

double fit_kappa(const GroundState& gs) {
  std::vector<double> y(gs.grid.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    y[i] = gs.q[i] * std::pow(gs.grid[i], 0.5 * (gs.d - 1)) * std::exp(gs.grid[i]);
  const double R = gs.r_max();
  const KappaFit f = fit_tail(gs.grid, y, gs.d, 0.5 * R, R);
  if (!(f.kappa > 0)) throw NumericalError("fitted kappa is not positive");
  return f.kappa;
}

MassIntegral mass_integral(const GroundState& gs) {
  std::vector<double> f(gs.grid.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = gs.q[i] * gs.q[i] * std::pow(gs.grid[i], gs.d - 1);
  const grid::Uniform g{0.0, gs.h, gs.grid.size()};
  const grid::Quadrature quad = grid::integrate(g, f);
  const double R = gs.r_max();
  const double tail = gs.kappa * gs.kappa * 0.5 * std::exp(-2 * R);
  return {quad.value + tail, quad.error + tail};
}

}  // namespace ssb
