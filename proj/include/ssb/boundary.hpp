#pragma once

#include <complex>

namespace ssb {

using cplx = std::complex<double>;

// Value and derivative of a radial function at r.
struct BoundaryState {
  double r = 0.0;
  cplx P{};
  cplx Pd{};
};

}  // namespace ssb
