#pragma once

#include <utility>
#include <vector>

namespace ssb {

struct GroundStateOptions {
  double r_max = 30.0;        // R_Q, outer end of the table
  double step = 0.01;         // tabulation spacing
  double eps_start = 1e-6;    // series start radius
  double bracket_lo = 1.0;    // geometric scan for Q(0)
  double bracket_hi = 10.0;
  int scan_points = 25;
  int max_bisections = 200;
  double match_radius = 6.0;  // forward/backward junction (capped by half the departure radius)
};

// Radial ground state Q of Q'' + (d-1)/r Q' - Q + Q^p = 0 tabulated on a uniform grid.
// Treat as immutable once returned by solve_ground_state.
struct GroundState {
  int d = 1;
  double p = 3.0;
  double h = 0.01;
  std::vector<double> grid;
  std::vector<double> q;
  std::vector<double> qp;
  std::vector<double> qpp;  // from the equation
  double q0 = 0.0;
  double kappa = 0.0;
  double kappa_c = 0.0;  // 1/r coefficient of the tail fit
  double n_c = 0.0;
  double n_c_error = 0.0;
  double shoot_tol = 0.0;
  double departure_radius = 0.0;  // where the bisection trajectories leave the funnel
  double junction_radius = 0.0;
  double junction_slope_mismatch = 0.0;
  int bisections = 0;

  double r_max() const { return grid.back(); }
  // (Q, Q') at any r >= 0; uses the fitted tail beyond the table.
  std::pair<double, double> eval(double r) const;
  double value(double r) const { return eval(r).first; }
  double second(double r, double qv, double qd) const;
  // sup over interior nodes of |Q'' + (d-1)/r Q' - Q + Q^p| with Q'' by finite differences.
  double residual_sup() const;
};

double closed_form_soliton_1d(double p, double r);
double closed_form_soliton_1d_derivative(double p, double r);

GroundState solve_ground_state(int d, double p, double tol, const GroundStateOptions& opt = {});

struct KappaFit {
  double kappa = 0.0;
  double c = 0.0;
  double max_residual = 0.0;  // max |y - kappa(1 + c/r)| over the window
  std::size_t nodes = 0;
};

// Least squares of Q r^{(d-1)/2} e^r against kappa (1 + c/r) on [R/2, R].
KappaFit fit_tail(const std::vector<double>& r, const std::vector<double>& y, int d, double lo, double hi);
double fit_kappa(const GroundState& gs);

struct MassIntegral {
  double value = 0.0;
  double error = 0.0;
};
MassIntegral mass_integral(const GroundState& gs);

}  // namespace ssb
