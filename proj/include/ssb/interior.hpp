#pragma once

#include <cstddef>
#include <vector>

#include "ssb/boundary.hpp"
#include "ssb/grid.hpp"
#include "ssb/ground_state.hpp"

namespace ssb {

// Ground-state constants of the linearized operators, independent of b.
//   L+ = -d^2 - (d-1)/r d + 1 - p Q^{p-1},  L- = -d^2 - (d-1)/r d + 1 - Q^{p-1}.
// A: L+A = 0, A(0) = 1; D: decaying L+ solution with W(A,D) r^{d-1} = 1;
// B: L-B = -Q, B(0) = 0. A ~ kappa_A r^{-(d-1)/2} e^r, B ~ kappa_B r^{-(d-1)/2} e^r.
struct LinearizedConstants {
  int d = 1;
  double p = 5.0;
  double kappa_A = 0.0;
  double kappa_B = 0.0;
  KappaFit fit_A;
  KappaFit fit_B;
  double fit_lo = 10.0;
  double fit_hi = 20.0;
  // Tables on the ground-state spacing over [0, fit_hi]; D only from d_start on for d >= 2.
  double h = 0.01;
  std::vector<double> A, Ap, D, Dp, B;
  double d_start = 0.0;
};

LinearizedConstants linearized_constants(const GroundState& gs);

// Basis tabulated on a uniform grid over [0, r_K].
struct LinearizedBasis {
  const GroundState* gs = nullptr;
  int d = 1;
  double p = 5.0;
  double r_K = 0.0;
  grid::Uniform g;
  std::vector<double> r, Q, Qp;
  std::vector<double> A, Ap, D, Dp, B, Bp;
  std::vector<double> Dw;  // D r^{d-1}, finite at r = 0
  std::vector<double> w;   // r^{d-1}
  double kappa_A = 0.0;
  double kappa_B = 0.0;
};

// Interval count for [0, r_K]: spacing <= min(0.01, r_K/400), even count.
std::size_t default_intervals(double r_K);

LinearizedBasis build_basis(const GroundState& gs, const LinearizedConstants& lc, double r_K,
                            std::size_t intervals = 0);
LinearizedBasis build_basis(const GroundState& gs, double r_K);

// Discrete operators with finite differences (even extension through r = 0).
std::vector<double> apply_lplus(const LinearizedBasis& basis, const std::vector<double>& f);
std::vector<double> apply_lminus(const LinearizedBasis& basis, const std::vector<double>& f);
// Same with f' supplied (no parity assumed); only f'' comes from differences of f'.
std::vector<double> apply_lplus(const LinearizedBasis& basis, const std::vector<double>& f,
                                const std::vector<double>& fd);
std::vector<double> apply_lminus(const LinearizedBasis& basis, const std::vector<double>& f,
                                 const std::vector<double>& fd);

struct GridFunction {
  std::vector<double> v;
  std::vector<double> dv;
};

// H+(f) = -{A int_r^{r_K} f D s^{d-1} ds + D int_0^r f A s^{d-1} ds}
GridFunction green_hplus(const LinearizedBasis& basis, const std::vector<double>& f);
// H-(f) = -Q int_0^r [int_0^s f Q t^{d-1} dt] / (Q^2 s^{d-1}) ds
GridFunction green_hminus(const LinearizedBasis& basis, const std::vector<double>& f);

// N+(f) = sup |f/Q|, N-(f) = sup |(1+r)^{d-1} Q f|
double norm_plus(const LinearizedBasis& basis, const std::vector<double>& f);
double norm_minus(const LinearizedBasis& basis, const std::vector<double>& f);

struct InteriorOptions {
  int max_iter = 200;
  double tol = 1e-13;  // sup-norm delta, relative to Q(0)
};

struct InteriorSolution {
  double b = 0.0;
  double sigma = 0.0;
  double gamma = 0.0;
  double p = 5.0;
  int d = 1;
  const LinearizedBasis* basis = nullptr;
  std::vector<double> phi_p, phi_pd, phi_m, phi_md;
  std::vector<cplx> P, Pd;
  std::vector<double> deltas;
  bool converged = false;

  // sup |P'' + (d-1)/r P' + (b^2 r^2/4 - 1 - i b sigma) P + |P|^{p-1} P|, P'' by differences of P'.
  double residual_sup() const;
};

InteriorSolution picard_interior(const LinearizedBasis& basis, double b, double sigma, double gamma,
                                 const InteriorOptions& opt = {});

BoundaryState interior_at_matchpoint(const InteriorSolution& sol);

// Direct IVP for P from a series start at the origin, P'(0) = 0.
BoundaryState shoot_interior(double b, double sigma, double p, int d, cplx P0, double r_end, double rtol = 1e-12);

struct OracleReport {
  cplx P0{};
  int newton_iterations = 0;
  BoundaryState shot;         // at r_K
  BoundaryState picard;       // at r_K
  double rel_dev_rK = 0.0;    // |P_shot - P_pic| / |P_pic| at r_K (value and derivative, max)
  double max_dev_half = 0.0;  // max |P_shot - P_pic| / sup|P| over grid nodes in [r_K/2, r_K]
};

// Choose P0 so that the shot matches the Picard solution at r_K/2, then compare on [r_K/2, r_K].
OracleReport shoot_interior_oracle(const InteriorSolution& sol, double rtol = 1e-12);

}  // namespace ssb
