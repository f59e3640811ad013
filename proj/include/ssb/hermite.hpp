#pragma once

// Quintic Hermite interpolation from value, first and second derivative at both ends.

#include <utility>

namespace ssb {

struct HermiteNode {
  double y;
  double dy;
  double ddy;
};

// Returns (value, derivative) at x0 + t*h.
inline std::pair<double, double> hermite5(const HermiteNode& a, const HermiteNode& b, double h, double t) {
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double t4 = t3 * t;
  const double t5 = t4 * t;
  const double h00 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
  const double h01 = 10 * t3 - 15 * t4 + 6 * t5;
  const double h10 = t - 6 * t3 + 8 * t4 - 3 * t5;
  const double h11 = -4 * t3 + 7 * t4 - 3 * t5;
  const double h20 = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5);
  const double h21 = 0.5 * (t3 - 2 * t4 + t5);
  const double d00 = -30 * t2 + 60 * t3 - 30 * t4;
  const double d10 = 1 - 18 * t2 + 32 * t3 - 15 * t4;
  const double d11 = -12 * t2 + 28 * t3 - 15 * t4;
  const double d20 = 0.5 * (2 * t - 9 * t2 + 12 * t3 - 5 * t4);
  const double d21 = 0.5 * (3 * t2 - 8 * t3 + 5 * t4);
  const double v = a.y * h00 + b.y * h01 + h * (a.dy * h10 + b.dy * h11) + h * h * (a.ddy * h20 + b.ddy * h21);
  const double dv = (a.y - b.y) * d00 / h + (a.dy * d10 + b.dy * d11) + h * (a.ddy * d20 + b.ddy * d21);
  return {v, dv};
}

}  // namespace ssb
