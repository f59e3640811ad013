#pragma once

#include <vector>

#include "ssb/boundary.hpp"
#include "ssb/grid.hpp"
#include "ssb/ground_state.hpp"
#include "ssb/matcher.hpp"

namespace ssb {

// One uniform piece of the composite radial grid.
struct ProfileSegment {
  grid::Uniform g;
  std::vector<double> r;
  std::vector<cplx> P, Pd, Psi, Psid;
};

struct ProfileDiagnostics {
  double energy = 0.0;
  double energy_error = 0.0;  // quadrature estimate + size of the tail corrections
  double kinetic = 0.0;
  double potential = 0.0;  // int |Psi|^{p+1}/(p+1) (with the sphere measure)
  double tail_kinetic = 0.0;
  double tail_potential = 0.0;
  bool energy_inconclusive = false;
  double hdot1_dist = 0.0;
  double hdot1_error = 0.0;
  double tail_amp = 0.0;
  double tail_spread = 0.0;
  bool tail_inconclusive = false;
  // log-log slopes over [max(R/4, 4/b), R]
  double dpsi_slope = 0.0;            // of |Psi'|, expected -(d/2 + 1 - sigma)
  double mass_growth_exponent = 0.0;  // 1 + slope of |Psi|^2 r^{d-1}: growth of the truncated mass, ~ 2 sigma
  double eq_residual_sup = 0.0;       // relative, at nodes at least 5 away from the segment ends (except r = 0)
  double jump_P = 0.0;                // |P(r_K+) - P(r_K-)| / |P(r_K)|
  double jump_Pd = 0.0;
};

struct SelfSimilarProfile {
  int d = 1;
  double p = 5.0;
  double b = 0.0;
  double sigma = 0.0;
  double rho = 0.0;
  double r_K = 0.0;
  ProfileSegment inner;  // [0, r_K]
  ProfileSegment outer;  // [r_K, R_far]
  ProfileDiagnostics diag;

  double R_far() const { return outer.r.back(); }
};

struct ProfileOptions {
  double h_outer = 0.005;  // spacing on [r_K, R_far]
};

// Fill Psi, Psi' from P, P' (Psi = e^{-i b r^2/4} P).
void fill_psi(ProfileSegment& s, double b);

// Build a segment from samples on a uniform grid.
ProfileSegment make_segment(const grid::Uniform& g, std::vector<cplx> P, std::vector<cplx> Pd, double b);

SelfSimilarProfile assemble_profile(const MatchedSolution& ms, const ProfileOptions& opt = {});

// Same profile with Psi multiplied by e^{i alpha}.
SelfSimilarProfile rotate(const SelfSimilarProfile& prof, double alpha);

struct EnergyResult {
  double energy = 0.0;
  double error = 0.0;
  double kinetic = 0.0;
  double potential = 0.0;
  double tail_kinetic = 0.0;
  double tail_potential = 0.0;
  bool inconclusive = false;
};
// E = |S^{d-1}| int (|Psi'|^2/2 - |Psi|^{p+1}/(p+1)) r^{d-1} dr, tails from |Psi| ~ A r^{-d/2+sigma},
// |Psi'| ~ C r^{-d/2-1+sigma} fitted at R_far.
EnergyResult energy(const SelfSimilarProfile& prof);

struct DistanceResult {
  double value = 0.0;
  double error = 0.0;
};
// min over alpha of ||Psi - e^{i alpha} Q||_{Hdot^1}, with the sphere measure.
DistanceResult hdot1_distance(const SelfSimilarProfile& prof, const GroundState& gs);

struct TailResult {
  double value = 0.0;
  double spread = 0.0;  // max |y_k - value| / value over the three radii
  bool inconclusive = false;
};
// r^{d/2 - sigma} |Psi| at R, R/sqrt2, R/2, extrapolated in r^{-2} to r = infinity.
TailResult tail_amplitude(const SelfSimilarProfile& prof);

// sup over nodes of |Psi'' + (d-1)/r Psi' - Psi + i b ((d/2 - sigma) Psi + r Psi') + |Psi|^{p-1} Psi|
// relative to the sum of the magnitudes of its terms; Psi'' by differences of Psi'.
// Nodes within 5 of a one-sided stencil end are skipped.
double equation_residual(const SelfSimilarProfile& prof);

// All of the above into prof.diag.
void compute_diagnostics(SelfSimilarProfile& prof, const GroundState& gs);

double sphere_measure(int d);

}  // namespace ssb
