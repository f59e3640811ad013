#pragma once

#include "ssb/boundary.hpp"

namespace ssb {

enum class Branch { plus = 1, minus = -1 };

// theta0(s) = (s/4) sqrt(s^2-4) - ln(sqrt(s^2-4) + s), s >= 2.
double theta0(double s);
double theta0_d(double s);
// theta1(s) = -(1/4) ln(s^2-4) +- sigma ln(sqrt(s^2-4) + s), s > 2.
double theta1(double s, double sigma, Branch br);
double theta1_d(double s, double sigma, Branch br);
double theta1_dd(double s, double sigma, Branch br);
// f = (theta1')^2 + theta1''; V'' + (b^2 r^2/4 - 1 - i b sigma) V = b^2 f(br) V.
double wkb_f(double s, double sigma, Branch br);

struct WkbValue {
  cplx v;
  cplx dv;
};

class FarFieldBasis {
 public:
  FarFieldBasis(double b, double sigma);

  double b() const { return b_; }
  double sigma() const { return sigma_; }
  double floor_radius() const { return 2.05 / b_; }

  // V and V' at r > 2/b (throws DomainError below the 2.05/b floor).
  WkbValue eval(double r, Branch br) const;
  // Real amplitude |V| = b^{1/2} (2b)^{-+sigma} exp(theta1(br)) and full phase.
  double amplitude(double r, Branch br) const;
  double phase(double r, Branch br) const;

  cplx wronskian_exact(double r) const;
  cplx wronskian(double r) const;  // from eval()

 private:
  double b_;
  double sigma_;
  double phase0_;  // (1 + 2 ln(2b)) / (2b)
};

WkbValue v_pm(const FarFieldBasis& basis, double r, Branch br);

// |f(br)| recovered as |V'' + (b^2r^2/4 - 1 - i b sigma)V| / (b^2 |V|), with the
// second derivative of the non-oscillating amplitude taken by finite differences.
double wkb_residual(const FarFieldBasis& basis, double r, Branch br);

}  // namespace ssb
