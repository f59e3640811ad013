#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "ssb/errors.hpp"
#include "ssb/exterior.hpp"
#include "ssb/ground_state.hpp"
#include "ssb/interior.hpp"

namespace ssb {

// sigma = (kappa^2/N_c) b^{-1} exp(-pi/b): the small-b root and its inverse.
double b_sigma(double sigma, double kappa, double n_c);
double sigma_of_b(double b, double kappa, double n_c);

// Reference values and box half-widths around them.
struct SigmaScales {
  double sigma = 0.0;
  double b_sigma = 0.0;
  double rho_sigma = 0.0;    // sqrt(2 N_c sigma)
  double gamma_sigma = 0.0;  // b^{1/6} e^{-2/sqrt b}
  double theta_sigma = 0.0;  // b^{1/6} e^{-pi/b} e^{2/sqrt b}
  double b_width = 0.0;      // b_sigma^{13/6}
};
SigmaScales sigma_scales(double sigma, double kappa, double n_c);

struct MatchParams {
  double b = 0.0;
  double rho = 0.0;
  double gamma = 0.0;
  double theta = 0.0;
};

// Scaled coordinates: x = ((b - b_s)/b_s^{13/6}, (rho - rho_s)/rho_s, gamma/gamma_s, theta/theta_s).
// The strict boxes are |x_k| <= 1/2.
std::array<double, 4> to_scaled(const MatchParams& m, const SigmaScales& s);
MatchParams from_scaled(const std::array<double, 4>& x, const SigmaScales& s);
bool in_strict_box(const MatchParams& m, const SigmaScales& s);

// (b_sigma, rho_sigma, 0, 0)
MatchParams initial_guess(double sigma, const GroundState& gs);

struct MatchOptions {
  double tol_newton = 1e-8;  // normalized residual, sup norm
  double tol_ode = 1e-12;    // exterior rtol
  double picard_tol = 1e-13;
  int max_iter = 30;
  double box_relax = 10.0;
  int jobs = 1;
  double r_far = 0.0;     // <= 0: max(b^-2, 50)
  double fd_step = 1e-6;  // in scaled coordinates
  double kappa_b_scale = 1.0;  // test hook, multiplies kappa_B in the residual scale
};

// Everything that does not depend on (b, rho, gamma, theta).
class MatchProblem {
 public:
  MatchProblem(std::shared_ptr<const GroundState> gs, double sigma, MatchOptions opt = {});

  const GroundState& ground_state() const { return *gs_; }
  std::shared_ptr<const GroundState> ground_state_ptr() const { return gs_; }
  const LinearizedConstants& constants() const { return lc_; }
  const SigmaScales& scales() const { return scales_; }
  const MatchOptions& options() const { return opt_; }
  double sigma() const { return scales_.sigma; }
  int d() const { return gs_->d; }
  double p() const { return gs_->p; }

  // S_Re = kappa b^{(d-1)/4} e^{-1/sqrt b}, S_Im = kappa_B sigma b^{1+(d-1)/4} e^{1/sqrt b}
  std::pair<double, double> residual_scales(double b) const;
  ExteriorParams exterior_params(const MatchParams& m) const;
  RegionLayout layout(double b) const;

 private:
  std::shared_ptr<const GroundState> gs_;
  LinearizedConstants lc_;
  SigmaScales scales_;
  MatchOptions opt_;
};

struct ResidualEval {
  std::array<double, 4> v{};  // [Re dP, Re dP', Im dP, Im dP'] / (S_Re, S_Re, S_Im, S_Im)
  bool ok = false;
  std::string failure;  // set when !ok; v then holds a large sentinel
  BoundaryState interior;
  BoundaryState exterior;  // phase-normalized, before e^{i theta}
  double theta_ext = 0.0;  // arg of the normalizing factor applied to the raw exterior state
  double norm() const;
};

constexpr double kResidualSentinel = 1e30;

// Phase that makes the decaying-mode coefficient of the exterior state real and positive;
// the modes have log-derivatives Q'/Q and B'/B at r_K.
double exterior_phase(const BoundaryState& raw, const LinearizedBasis& basis);

ResidualEval match_residual(const MatchParams& m, const MatchProblem& prob);
// Same with explicit tolerances (used for the independent re-check).
ResidualEval match_residual(const MatchParams& m, const MatchProblem& prob, double tol_ode, double picard_tol);

struct MatchedSolution {
  MatchParams params;
  SigmaScales scales;
  double sigma = 0.0;
  double p = 0.0;
  int d = 1;
  std::array<double, 4> residual{};
  double residual_norm = 0.0;
  double jacobian_condition = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  bool strict_box = false;
  std::string message;
  std::vector<std::string> log;
  // re-evaluation at halved ODE and Picard tolerances
  double recheck_norm = 0.0;
  double recheck_agreement = 0.0;

  std::shared_ptr<const GroundState> gs;
  std::shared_ptr<const LinearizedBasis> basis;
  InteriorSolution interior;
  ExteriorTrajectory exterior;  // raw (unrotated) U on [r_K, R_far]
  double theta_ext = 0.0;
  RegionLayout layout;
};

// Thrown by solve_match when Newton stalls; carries the best iterate seen.
class MatchFailure : public NumericalError {
 public:
  MatchFailure(const std::string& what, MatchParams best, double best_norm, int iterations,
               std::vector<std::string> log)
      : NumericalError(what), best(best), best_norm(best_norm), iterations(iterations), log(std::move(log)) {}
  MatchParams best;
  double best_norm;
  int iterations;
  std::vector<std::string> log;
};

// Damped Newton on the scaled parameters, central-difference Jacobian.
// Throws NumericalError if it does not converge (the message carries the best iterate).
MatchedSolution solve_match(const MatchProblem& prob, const MatchParams& start);
MatchedSolution solve_match(double sigma, double p, int d, const MatchOptions& opt = {});

struct LawRow {
  double sigma = 0.0;
  double p = 0.0;
  int d = 1;
  double b = 0.0, b_sigma = 0.0;
  double rho = 0.0, rho_sigma = 0.0;
  double gamma = 0.0, gamma_sigma = 0.0;
  double theta = 0.0, theta_sigma = 0.0;
  double residual = 0.0;
  double jacobian_condition = 0.0;
  int iterations = 0;
  bool converged = false;
  bool strict_box = false;
  bool warm_started = false;
  std::string message;
  double b_dev() const { return b / b_sigma - 1; }
  double rho_dev() const { return rho / rho_sigma - 1; }
};

struct SweepResult {
  std::vector<LawRow> rows;
  std::vector<MatchedSolution> solutions;  // only for converged rows, same order
  std::vector<std::size_t> solution_row;   // row index of each solution
};

// Rows in the given (descending) order, each warm-started from the last converged row.
// p_of_sigma: exponent per row (fixed p, or the coupled p = 1 + 4/(d - 2 sigma)).
SweepResult continuation_sweep(const std::vector<double>& sigmas, int d, double p, bool couple_p,
                               const MatchOptions& opt = {});

// p with s_c = d/2 - 2/(p-1) equal to sigma.
double coupled_exponent(int d, double sigma);

}  // namespace ssb
