#pragma once

#include <complex>

namespace ssb {

using cplx = std::complex<double>;

// Ai and the combination BB(z) = 2 pi e^{i pi/6} Ai(e^{2 i pi/3} z) on the real line.
// On real s, BB = pi (Bi + i Ai), so Im BB = pi Ai and W(Ai, BB) = 1.
struct AiryPair {
  double s = 0.0;
  double ai = 0.0;
  double ai_d = 0.0;
  cplx bb;
  cplx bb_d;
};

inline constexpr double kAiryMin = -60.0;
inline constexpr double kAiryMax = 40.0;

AiryPair airy_eval(double s);

// exp((2/3) max(0, s)^{3/2}); throws DomainError once the result would overflow.
double omega(double s);

struct AiryBounds {
  double ai_ratio = 0.0;       // |Ai| omega <s>^{1/4}
  double bb_ratio = 0.0;       // |BB| <s>^{1/4} / omega
  double product_ratio = 0.0;  // |Ai BB| <s>^{1/2}
};

AiryBounds airy_bounds_check(double s);

}  // namespace ssb
