#include "ssb/airy.hpp"

#include <cmath>
#include <sstream>

#include <boost/math/special_functions/airy.hpp>

#include "ssb/errors.hpp"

namespace ssb {

AiryPair airy_eval(double s) {
  if (!(s >= kAiryMin && s <= kAiryMax)) {
    std::ostringstream os;
    os << "airy_eval: argument " << s << " outside [" << kAiryMin << ", " << kAiryMax << "]";
    throw DomainError(os.str());
  }
  namespace bm = boost::math;
  AiryPair a;
  a.s = s;
  a.ai = bm::airy_ai(s);
  a.ai_d = bm::airy_ai_prime(s);
  a.bb = M_PI * cplx(bm::airy_bi(s), a.ai);
  a.bb_d = M_PI * cplx(bm::airy_bi_prime(s), a.ai_d);
  return a;
}

double omega(double s) {
  const double sp = std::max(0.0, s);
  const double e = (2.0 / 3.0) * sp * std::sqrt(sp);
  if (e > 709.0) throw DomainError("omega: exponent overflows double precision");
  return std::exp(e);
}

AiryBounds airy_bounds_check(double s) {
  const AiryPair a = airy_eval(s);
  const double w = omega(s);
  const double br = std::sqrt(1 + s * s);  // <s>^2
  AiryBounds b;
  b.ai_ratio = std::abs(a.ai) * w * std::pow(br, 0.125);
  b.bb_ratio = std::abs(a.bb) * std::pow(br, 0.125) / w;
  b.product_ratio = std::abs(a.ai * a.bb) * std::pow(br, 0.25);
  return b;
}

}  // namespace ssb
