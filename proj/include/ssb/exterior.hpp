#pragma once

#include <array>
#include <complex>
#include <utility>
#include <vector>

#include "ssb/boundary.hpp"
#include "ssb/farfield.hpp"
#include "ssb/ode.hpp"

namespace ssb {

// r_K = b^{-1/2}, r_J = 2/b (turning point), r_I = b^{-2}, R_far >= r_I.
struct RegionLayout {
  double b = 0.0;
  double r_K = 0.0;
  double r_J = 0.0;
  double r_I = 0.0;
  double R_far = 0.0;

  // R_far <= 0 picks the default max(b^{-2}, 50).
  static RegionLayout make(double b, double R_far = 0.0);
};

struct ExteriorParams {
  double b = 0.0;
  double sigma = 0.0;
  double rho = 0.0;
  double p = 5.0;
  int d = 1;
  bool nonlinear = true;  // off: linear equation, used for checks
};

struct ExteriorOptions {
  double rtol = 1e-10;
  double atol_rel = 1e-14;  // absolute tolerance relative to |U(R_far)|
  double guard = 1e6;       // abort when |U| > guard * |U(R_far)|
  bool record = true;       // keep accepted steps for dense output
};

using State4 = std::array<double, 4>;

// U'' = -(b^2 r^2/4 - 1 - (d-1)(d-3)/(4r^2) - i b sigma) U - r^{-(d-1)(p-1)/2} |U|^{p-1} U.
ode::Integrator<4>::Rhs exterior_rhs(const ExteriorParams& prm);

// U(R) = rho V+(R), U'(R) = rho V+'(R).
BoundaryState far_field_init(const ExteriorParams& prm, double R_far);

// Same, with lambda+- at R_far corrected for the forcing beyond R_far
// (first-order variation of constants, lambda+(inf) = rho, lambda-(inf) = 0).
BoundaryState far_field_init_corrected(const ExteriorParams& prm, double R_far);

// Values of U are stored as BoundaryState{r, U, U'}; P-variables only in at_rK.
class ExteriorTrajectory {
 public:
  ExteriorParams params;
  RegionLayout layout;
  ExteriorOptions options;
  ode::Stats stats;
  std::vector<double> r;  // accepted steps, descending from R_far to r_K
  std::vector<State4> y;
  BoundaryState at_rK;  // P, P'

  // (U, U') anywhere in [r_K, R_far]: one RK step from the nearest stored node.
  std::pair<cplx, cplx> U(double rr) const;
  // (P, P') with P = r^{-(d-1)/2} U.
  std::pair<cplx, cplx> P(double rr) const;
};

ExteriorTrajectory integrate_exterior(const BoundaryState& init, const RegionLayout& layout,
                                      const ExteriorParams& prm, const ExteriorOptions& opt = {});

// Convenience used by the matcher: corrected init at layout.R_far, integrate to r_K, no recording.
BoundaryState exterior_at_rK(const ExteriorParams& prm, const RegionLayout& layout, const ExteriorOptions& opt);

// lambda+- of U = lambda+ V+ + lambda- V-, U' = lambda+ V+' + lambda- V-' at r.
std::pair<cplx, cplx> lambda_decompose(const ExteriorTrajectory& traj, double r);

// P from U and back.
BoundaryState u_to_p(const BoundaryState& u, int d);

// zeta(tau) = ((3/2) int_0^tau sqrt(t) (1/2) sqrt(4 - t) dt)^{2/3} for tau in [0, 2].
double zeta_map(double tau);

struct TurningPhase {
  double lhs = 0.0;  // (1/(2b)) int_0^{2-sqrt b} sqrt(t) sqrt(4-t) dt
  double rhs = 0.0;  // pi/(2b) - 1/sqrt(b)
};
TurningPhase turning_point_phase(double b);

}  // namespace ssb
