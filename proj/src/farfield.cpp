#include "ssb/farfield.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "ssb/errors.hpp"
#include "ssb/grid.hpp"

namespace ssb {

namespace {

double sgn(Branch br) { return br == Branch::plus ? 1.0 : -1.0; }

void require_above_turning(double s, const char* who) {
  if (!(s > 2.0)) {
    std::ostringstream os;
    os << who << ": argument " << s << " is not beyond the turning point s = 2";
    throw DomainError(os.str());
  }
}

}  // namespace

double theta0(double s) {
  if (!(s >= 2.0)) throw DomainError("theta0 requires s >= 2");
  const double q = std::sqrt(s * s - 4.0);
  return 0.25 * s * q - std::log(q + s);
}

double theta0_d(double s) {
  if (!(s >= 2.0)) throw DomainError("theta0_d requires s >= 2");
  return 0.5 * std::sqrt(s * s - 4.0);
}

double theta1(double s, double sigma, Branch br) {
  require_above_turning(s, "theta1");
  const double q = std::sqrt(s * s - 4.0);
  return -0.25 * std::log(s * s - 4.0) + sgn(br) * sigma * std::log(q + s);
}

double theta1_d(double s, double sigma, Branch br) {
  require_above_turning(s, "theta1_d");
  const double q2 = s * s - 4.0;
  return -s / (2 * q2) + sgn(br) * sigma / std::sqrt(q2);
}

double theta1_dd(double s, double sigma, Branch br) {
  require_above_turning(s, "theta1_dd");
  const double q2 = s * s - 4.0;
  return (s * s + 4) / (2 * q2 * q2) - sgn(br) * sigma * s / (q2 * std::sqrt(q2));
}

double wkb_f(double s, double sigma, Branch br) {
  const double t = theta1_d(s, sigma, br);
  return t * t + theta1_dd(s, sigma, br);
}

FarFieldBasis::FarFieldBasis(double b, double sigma) : b_(b), sigma_(sigma) {
  if (!(b > 0)) throw ConfigError("far-field basis needs b > 0");
  phase0_ = (1 + 2 * std::log(2 * b)) / (2 * b);
}

double FarFieldBasis::amplitude(double r, Branch br) const {
  const double s = b_ * r;
  return std::sqrt(b_) * std::pow(2 * b_, -sgn(br) * sigma_) * std::exp(theta1(s, sigma_, br));
}

double FarFieldBasis::phase(double r, Branch br) const { return sgn(br) * (phase0_ + theta0(b_ * r) / b_); }

WkbValue FarFieldBasis::eval(double r, Branch br) const {
  if (!(r >= floor_radius())) {
    std::ostringstream os;
    os << "V evaluated at r = " << r << " below the floor 2.05/b = " << floor_radius();
    throw DomainError(os.str());
  }
  const double s = b_ * r;
  const cplx v = std::polar(amplitude(r, br), phase(r, br));
  const cplx logd(b_ * theta1_d(s, sigma_, br), sgn(br) * theta0_d(s));
  return {v, logd * v};
}

cplx FarFieldBasis::wronskian_exact(double r) const {
  const double s = b_ * r;
  return {-2 * b_ * b_ * sigma_ / (s * s - 4), -b_};
}

cplx FarFieldBasis::wronskian(double r) const {
  const WkbValue p = eval(r, Branch::plus);
  const WkbValue m = eval(r, Branch::minus);
  return p.v * m.dv - p.dv * m.v;
}

WkbValue v_pm(const FarFieldBasis& basis, double r, Branch br) { return basis.eval(r, br); }

double wkb_residual(const FarFieldBasis& basis, double r, Branch br) {
  // V = e^{i phi} W with W real; phi'^2 = b^2 r^2/4 - 1 cancels analytically, leaving
  // V''/V + (b^2r^2/4 - 1 - i b sigma) = W''/W + i (2 phi' W'/W + phi'' - b sigma).
  const double b = basis.b();
  const double sigma = basis.sigma();
  const double h = r / 400.0;
  constexpr int half = 4;
  std::vector<double> w(2 * half + 1);
  for (int k = -half; k <= half; ++k) w[k + half] = basis.amplitude(r + k * h, br);
  const grid::Uniform g{r - half * h, h, w.size()};
  const double w1 = grid::derivative(g, w, 1, w.size())[half];
  const double w2 = grid::derivative(g, w, 2, w.size())[half];
  const double s = b * r;
  const double phi_d = sgn(br) * theta0_d(s);
  const double phi_dd = sgn(br) * b * s / (2 * std::sqrt(s * s - 4));
  const double w0 = w[half];
  const cplx res(w2 / w0, 2 * phi_d * w1 / w0 + phi_dd - b * sigma);
  return std::abs(res) / (b * b);
}

}  // namespace ssb
